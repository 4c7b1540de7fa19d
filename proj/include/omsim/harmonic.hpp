#pragma once

#include <span>
#include <vector>

namespace omsim {

// Truncated Fourier series on the base frequency omega:
//   a0 + sum_k [ a_k cos(k omega t) + b_k sin(k omega t) ].
// Harmonic indices are unique, positive and kept sorted.
struct HarmonicSeries {
  struct Term {
    int k;
    double a;  // cos coefficient
    double b;  // sin coefficient
  };

  double omega = 0.0;
  double a0 = 0.0;
  std::vector<Term> harmonics;
  int order = 0;  // perturbative order included (bookkeeping only)

  double evaluate(double t) const;

  // Coefficient accessors; absent harmonics read as zero.
  double cos_coeff(int k) const;
  double sin_coeff(int k) const;
  void add_term(int k, double a, double b);

  int max_harmonic() const { return harmonics.empty() ? 0 : harmonics.back().k; }

  HarmonicSeries& operator+=(const HarmonicSeries& other);
  HarmonicSeries scaled(double f) const;

  // Pointwise product, expanded with the product-to-sum identities
  // (cos cos = 1/2 cos(diff) + 1/2 cos(sum), ...); exact, no aliasing.
  friend HarmonicSeries operator*(const HarmonicSeries& x, const HarmonicSeries& y);

  static HarmonicSeries constant(double omega, double value);
  // amp * cos(k omega t + phase)
  static HarmonicSeries cosine(double omega, int k, double amp, double phase = 0.0);
};

// Exact discrete Fourier projection of N uniform samples over one period
// (sample m at t = m*period/N). Requires N >= 2*max_harmonic + 2.
HarmonicSeries harmonic_projection(std::span<const double> samples, double period,
                                   int max_harmonic);

}  // namespace omsim
