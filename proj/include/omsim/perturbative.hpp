#pragma once

#include <array>
#include <span>
#include <vector>

#include "omsim/covariance.hpp"
#include "omsim/harmonic.hpp"
#include "omsim/params.hpp"

namespace omsim {

// ---------------------------------------------------------------------------
// Single parametric oscillator,  x'' = -w0^2 [1 + alpha cos(nu t)] x - g x' + F.
// The below-threshold regime (alpha < 2 g / w0) reaches a stationary orbit
// instead of amplifying exponentially.
struct ToyOscillator {
  double omega0;  // rad/s
  double gamma;   // rad/s
  double alpha;   // modulation amplitude
  double nu;      // modulation frequency, rad/s
  double force;   // constant drive

  void validate() const;
  bool below_threshold() const { return alpha < 2.0 * gamma / omega0; }
};

// Lorentzian response f(nu) = 1/sqrt((w0^2 - nu^2)^2 + (g nu)^2).
double toy_response(const ToyOscillator& osc);
double toy_response(const ToyOscillator& osc, double nu);

// First-order stationary orbit x(t) ~ F/w0^2 + alpha f(nu) F cos(nu t + psi),
// with the cos/sin split from the driven-oscillator transfer function.
HarmonicSeries toy_first_order_orbit(const ToyOscillator& osc);

// ---------------------------------------------------------------------------
// Matrix-valued harmonic series, used for the drift decomposition S^(n) and
// the covariance orders C^(n).
struct MatrixHarmonicSeries {
  struct Term {
    int k;
    Mat4 a;
    Mat4 b;
  };
  double omega = 0.0;
  Mat4 a0 = Mat4::Zero();
  std::vector<Term> harmonics;
  int order = 0;

  Mat4 evaluate(double t) const;
  void add_term(int k, const Mat4& a, const Mat4& b);
  std::pair<Mat4, Mat4> coeff(int k) const;  // (cos, sin), zero if absent
  int max_harmonic() const { return harmonics.empty() ? 0 : harmonics.back().k; }
  MatrixHarmonicSeries& operator+=(const MatrixHarmonicSeries& other);
  MatrixHarmonicSeries transpose() const;
  // Matrix product x(t) * y(t), expanded termwise (non-commutative).
  friend MatrixHarmonicSeries operator*(const MatrixHarmonicSeries& x,
                                        const MatrixHarmonicSeries& y);
  HarmonicSeries entry(int i, int j) const;
};

// ---------------------------------------------------------------------------
// Order-by-order harmonic-balance solution of the classical means. Order n is
// exactly homogeneous of joint degree n in (epsilon, eta); each order is a
// trigonometric polynomial with harmonics up to n Omega.
struct ClassicalSeries {
  double omega = 0.0;
  int max_order = 0;
  // orders[n][c], components c: 0 = Q, 1 = P, 2 = Re A, 3 = Im A.
  std::vector<std::array<HarmonicSeries, 4>> orders;
  double max_condition = 0.0;  // worst linear-solve condition number

  HarmonicSeries total(int comp) const;
  MeanState evaluate(double t) const;
};

// max_order >= 1; orders beyond 2 reuse the same solve kernel at frequency
// k Omega (needed for the order-six convergence comparison).
ClassicalSeries classical_orders(const DerivedParams& dp, const SystemParams& sys,
                                 const ModulationSpec& mod, int max_order);

struct CovarianceSeries {
  double omega = 0.0;
  int max_order = 0;
  std::vector<MatrixHarmonicSeries> orders;
  double max_condition = 0.0;

  MatrixHarmonicSeries total() const;
  Mat4 evaluate(double t) const;
  HarmonicSeries entry_total(int i, int j) const;
  // (C11 + C22 - 1)/2 as a series; the -1/2 lands in the constant term.
  HarmonicSeries phonon_series() const;
};

CovarianceSeries covariance_orders(const DerivedParams& dp, const SystemParams& sys,
                                   const ModulationSpec& mod,
                                   const ClassicalSeries& classical, int max_order);

// ---------------------------------------------------------------------------
// Fit v(phi) = A + B cos(phi + phi0) through values sampled on a grid of
// relative phases. Exact for >= 3 distinct phases when the data is of this
// form; residual is the rms misfit.
struct PhaseFit {
  double offset = 0.0;     // A
  double amplitude = 0.0;  // B >= 0
  double phase = 0.0;      // phi0 in (-pi, pi]
  double residual = 0.0;
};

PhaseFit phase_decomposition(std::span<const double> phis,
                             std::span<const double> values);

}  // namespace omsim
