#include "omsim/metrics.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace omsim {

double phonon_number(const Mat4& C) { return 0.5 * (C(0, 0) + C(1, 1) - 1.0); }

double min_quadrature_variance(const Mat4& C, Block block) {
  const int o = block == Block::mirror ? 0 : 2;
  const double a = C(o, o), c = C(o + 1, o + 1), b = C(o, o + 1);
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

double logarithmic_negativity(const Mat4& C) {
  const double det_a = C.block<2, 2>(0, 0).determinant();
  const double det_b = C.block<2, 2>(2, 2).determinant();
  const double det_k = C.block<2, 2>(0, 2).determinant();
  const double det_c = C.determinant();
  // Partial transposition flips the sign of det K.
  const double sigma = det_a + det_b - 2.0 * det_k;
  const double disc = sigma * sigma - 4.0 * det_c;
  if (disc < -1e-9 * std::max(sigma * sigma, 1.0)) {
    throw UnphysicalInputError(
        "logarithmic_negativity: invariant discriminant negative");
  }
  const double nu2 = 0.5 * (sigma - std::sqrt(std::max(disc, 0.0)));
  if (nu2 <= 0.0) {
    throw UnphysicalInputError("logarithmic_negativity: nu_tilde^2 <= 0");
  }
  return std::max(0.0, -std::log(2.0 * std::sqrt(nu2)));
}

namespace {

// f(x) = ((x+1)/2) log2((x+1)/2) - ((x-1)/2) log2((x-1)/2), f(1) = 0.
double entropy_f(double x) {
  if (x <= 1.0) return 0.0;
  const double hp = 0.5 * (x + 1.0), hm = 0.5 * (x - 1.0);
  return hp * std::log2(hp) - hm * std::log2(hm);
}

}  // namespace

double gaussian_discord(const Mat4& C, Block measured) {
  // The closed form below lives in the vacuum = 1 convention; the bridge
  // (factor 2) is confined here.
  Mat4 Cm = 2.0 * C;
  if (measured == Block::mirror) {
    Mat4 P = Mat4::Zero();
    P(0, 2) = P(1, 3) = P(2, 0) = P(3, 1) = 1.0;
    Cm = P * Cm * P.transpose();
  }
  const double a = Cm.block<2, 2>(0, 0).determinant();
  const double b = Cm.block<2, 2>(2, 2).determinant();
  const double k = Cm.block<2, 2>(0, 2).determinant();
  const double d = Cm.determinant();
  if (a < 1.0 - 1e-9 || b < 1.0 - 1e-9) {
    throw UnphysicalInputError("gaussian_discord: block determinant below vacuum");
  }

  const double delta = a + b + 2.0 * k;
  const double disc = std::sqrt(std::max(delta * delta - 4.0 * d, 0.0));
  const double nu_m = std::sqrt(std::max(0.5 * (delta - disc), 0.0));
  const double nu_p = std::sqrt(std::max(0.5 * (delta + disc), 0.0));
  if (nu_m < 1.0 - 1e-6) {
    throw UnphysicalInputError("gaussian_discord: state is unphysical (nu- = " +
                               std::to_string(nu_m) + ")");
  }

  // Minimum conditional determinant over Gaussian measurements of mode B.
  double e_min;
  if (std::pow(d - a * b, 2) <= (1.0 + b) * k * k * (a + d)) {
    if (std::abs(b - 1.0) < 1e-12) {
      // b -> 1 forces k -> 0 for physical states; continuous extension.
      e_min = a;
    } else {
      e_min = (2.0 * k * k + (b - 1.0) * (d - a) +
               2.0 * std::abs(k) * std::sqrt(std::max(
                         k * k + (b - 1.0) * (d - a), 0.0))) /
              ((b - 1.0) * (b - 1.0));
    }
  } else {
    const double rad =
        k * k * k * k + (d - a * b) * (d - a * b) - 2.0 * k * k * (a * b + d);
    e_min = (a * b - k * k + d - std::sqrt(std::max(rad, 0.0))) / (2.0 * b);
  }

  const double discord = entropy_f(std::sqrt(b)) - entropy_f(nu_m) -
                         entropy_f(nu_p) + entropy_f(std::sqrt(std::max(e_min, 0.0)));
  // Exact cancellations (product states) can leave tiny negative roundoff.
  return std::max(discord, 0.0);
}

namespace {

struct Extremum {
  double value;
  double t;
};

// Parabolic refinement through the grid extremum and its periodic neighbors.
Extremum refine(const std::vector<double>& v, int idx, double dt, bool maximize) {
  const int n = static_cast<int>(v.size());
  const double vm = v[(idx - 1 + n) % n], v0 = v[idx], vp = v[(idx + 1) % n];
  const double denom = vm - 2.0 * v0 + vp;
  Extremum e{v0, idx * dt};
  // Refine only when the parabola bends the right way.
  if ((maximize && denom < 0.0) || (!maximize && denom > 0.0)) {
    const double off = 0.5 * (vm - vp) / denom;
    if (std::abs(off) <= 1.0) {
      e.value = v0 - 0.125 * (vm - vp) * (vm - vp) / denom;
      e.t = (idx + off) * dt;
    }
  }
  return e;
}

Extremum scan(const std::vector<double>& v, double dt, bool maximize) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (maximize ? v[i] > v[best] : v[i] < v[best]) best = i;
  }
  return refine(v, best, dt, maximize);
}

}  // namespace

MetricsSummary period_extrema(const CovOrbit& orbit, Block discord_measured) {
  const int n = static_cast<int>(orbit.samples.size());
  if (n < 1) throw InvalidParameterError("period_extrema: empty orbit");
  std::vector<double> nv(n), env(n), dv(n), qv(n), xv(n);
  for (int i = 0; i < n; ++i) {
    const Mat4& C = orbit.samples[i];
    nv[i] = phonon_number(C);
    env[i] = logarithmic_negativity(C);
    dv[i] = gaussian_discord(C, discord_measured);
    qv[i] = min_quadrature_variance(C, Block::mirror);
    xv[i] = min_quadrature_variance(C, Block::cavity);
  }
  const double dt = n > 1 ? orbit.period / n : orbit.period;
  MetricsSummary s;
  const Extremum en = scan(nv, dt, true);
  const Extremum ee = scan(env, dt, true);
  const Extremum ed = scan(dv, dt, true);
  const Extremum eq = scan(qv, dt, false);
  const Extremum ex = scan(xv, dt, false);
  s.n_max = en.value;
  s.t_n_max = en.t;
  s.en_max = ee.value;
  s.t_en_max = ee.t;
  s.d_max = ed.value;
  s.t_d_max = ed.t;
  s.qvar_min = eq.value;
  s.t_qvar_min = eq.t;
  s.xvar_min = ex.value;
  s.t_xvar_min = ex.t;
  return s;
}

}  // namespace omsim
