#include "omsim/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include "omsim/constants.hpp"
#include "omsim/errors.hpp"

namespace omsim {

double HarmonicSeries::evaluate(double t) const {
  double v = a0;
  for (const Term& h : harmonics) {
    const double ph = h.k * omega * t;
    v += h.a * std::cos(ph) + h.b * std::sin(ph);
  }
  return v;
}

double HarmonicSeries::cos_coeff(int k) const {
  if (k == 0) return a0;
  for (const Term& h : harmonics)
    if (h.k == k) return h.a;
  return 0.0;
}

double HarmonicSeries::sin_coeff(int k) const {
  for (const Term& h : harmonics)
    if (h.k == k) return h.b;
  return 0.0;
}

void HarmonicSeries::add_term(int k, double a, double b) {
  if (k == 0) {
    a0 += a;
    return;
  }
  if (k < 0) {  // cos(-kx) = cos(kx), sin(-kx) = -sin(kx)
    k = -k;
    b = -b;
  }
  auto it = std::lower_bound(harmonics.begin(), harmonics.end(), k,
                             [](const Term& t, int kk) { return t.k < kk; });
  if (it != harmonics.end() && it->k == k) {
    it->a += a;
    it->b += b;
  } else {
    harmonics.insert(it, Term{k, a, b});
  }
}

HarmonicSeries& HarmonicSeries::operator+=(const HarmonicSeries& other) {
  a0 += other.a0;
  for (const Term& h : other.harmonics) add_term(h.k, h.a, h.b);
  return *this;
}

HarmonicSeries HarmonicSeries::scaled(double f) const {
  HarmonicSeries r = *this;
  r.a0 *= f;
  for (Term& h : r.harmonics) {
    h.a *= f;
    h.b *= f;
  }
  return r;
}

HarmonicSeries operator*(const HarmonicSeries& x, const HarmonicSeries& y) {
  HarmonicSeries r;
  r.omega = x.omega != 0.0 ? x.omega : y.omega;
  r.order = x.order + y.order;
  // Treat the constants as harmonic 0 and expand termwise.
  auto terms_of = [](const HarmonicSeries& s) {
    std::vector<HarmonicSeries::Term> t;
    t.push_back({0, s.a0, 0.0});
    t.insert(t.end(), s.harmonics.begin(), s.harmonics.end());
    return t;
  };
  for (const auto& ti : terms_of(x)) {
    for (const auto& tj : terms_of(y)) {
      // (ai c_i + bi s_i)(aj c_j + bj s_j) with c_i = cos(i w t), s_i = sin(i w t):
      //   cos i cos j = [cos(i-j) + cos(i+j)]/2
      //   sin i sin j = [cos(i-j) - cos(i+j)]/2
      //   sin i cos j = [sin(i-j) + sin(i+j)]/2
      //   cos i sin j = [sin(i+j) - sin(i-j)]/2
      const int d = ti.k - tj.k, s = ti.k + tj.k;
      r.add_term(d, 0.5 * (ti.a * tj.a + ti.b * tj.b), 0.5 * (ti.b * tj.a - ti.a * tj.b));
      r.add_term(s, 0.5 * (ti.a * tj.a - ti.b * tj.b), 0.5 * (ti.a * tj.b + ti.b * tj.a));
    }
  }
  return r;
}

HarmonicSeries HarmonicSeries::constant(double omega, double value) {
  HarmonicSeries s;
  s.omega = omega;
  s.a0 = value;
  return s;
}

HarmonicSeries HarmonicSeries::cosine(double omega, int k, double amp, double phase) {
  HarmonicSeries s;
  s.omega = omega;
  if (k == 0) {
    s.a0 = amp * std::cos(phase);
  } else {
    s.add_term(k, amp * std::cos(phase), -amp * std::sin(phase));
  }
  return s;
}

HarmonicSeries harmonic_projection(std::span<const double> samples, double period,
                                   int max_harmonic) {
  const int n = static_cast<int>(samples.size());
  if (max_harmonic < 0 || n < 2 * max_harmonic + 2) {
    throw InvalidParameterError(
        "harmonic_projection: need at least 2*max_harmonic + 2 samples");
  }
  HarmonicSeries s;
  s.omega = 2.0 * constants::pi / period;
  double mean = 0.0;
  for (double v : samples) mean += v;
  s.a0 = mean / n;
  for (int k = 1; k <= max_harmonic; ++k) {
    double ca = 0.0, cb = 0.0;
    for (int m = 0; m < n; ++m) {
      const double ph = 2.0 * constants::pi * k * m / n;
      ca += samples[m] * std::cos(ph);
      cb += samples[m] * std::sin(ph);
    }
    s.add_term(k, 2.0 * ca / n, 2.0 * cb / n);
  }
  return s;
}

}  // namespace omsim
