#include "omsim/covariance.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "omsim/interp.hpp"
#include "omsim/ode.hpp"

namespace omsim {

namespace {
constexpr double sqrt2 = 1.4142135623730950488;

using Vec10 = Eigen::Matrix<double, 10, 1>;

// Upper-triangle packing order C11..C14, C22..C24, C33, C34, C44.
constexpr int kRow[10] = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
constexpr int kCol[10] = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};

Vec10 pack(const Mat4& C) {
  Vec10 v;
  for (int i = 0; i < 10; ++i) v[i] = C(kRow[i], kCol[i]);
  return v;
}

Mat4 unpack(const Vec10& v) {
  Mat4 C;
  for (int i = 0; i < 10; ++i) {
    C(kRow[i], kCol[i]) = v[i];
    C(kCol[i], kRow[i]) = v[i];
  }
  return C;
}
}  // namespace

Mat4 drift_matrix(double t, const MeanState& mean, const DerivedParams& dp,
                  const SystemParams& sys, const ModulationSpec& mod) {
  const double spring = 1.0 + mod.epsilon * std::cos(mod.omega1 * t);
  const double det_eff = sys.detuning - dp.g0 * mean.q;
  const double cr = sqrt2 * dp.g0 * mean.a_re;
  const double ci = sqrt2 * dp.g0 * mean.a_im;
  Mat4 S;
  S << 0.0, sys.omega_m, 0.0, 0.0,
      -sys.omega_m * spring, -sys.gamma_m, cr, ci,
      -ci, 0.0, -sys.kappa, det_eff,
      cr, 0.0, -det_eff, -sys.kappa;
  return S;
}

Mat4 noise_matrix(const DerivedParams& dp, const SystemParams& sys) {
  Mat4 N = Mat4::Zero();
  N(1, 1) = sys.gamma_m * dp.coth_factor;
  N(2, 2) = sys.kappa;
  N(3, 3) = sys.kappa;
  return N;
}

Mat4 lyapunov_steady(const Mat4& S, const Mat4& N) {
  const double max_re = Eigen::EigenSolver<Mat4>(S, false)
                            .eigenvalues()
                            .real()
                            .maxCoeff();
  if (!(max_re < 0.0)) {
    throw InstabilityError("lyapunov_steady: drift matrix is not Hurwitz");
  }
  // vec(S C + C S^T) = (I x S + S x I) vec(C), column-major vec.
  Eigen::Matrix<double, 16, 16> L = Eigen::Matrix<double, 16, 16>::Zero();
  for (int i = 0; i < 4; ++i) {
    L.block<4, 4>(4 * i, 4 * i) += S;
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) L(4 * j + k, 4 * i + k) += S(j, i);
    }
  }
  Eigen::Matrix<double, 16, 1> rhs;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) rhs[4 * j + i] = -N(i, j);
  const Eigen::Matrix<double, 16, 1> c = L.partialPivLu().solve(rhs);
  Mat4 C;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) C(i, j) = c[4 * j + i];
  return 0.5 * (C + C.transpose());
}

std::array<double, 2> symplectic_eigenvalues(const Mat4& C) {
  const double det_a = C.block<2, 2>(0, 0).determinant();
  const double det_b = C.block<2, 2>(2, 2).determinant();
  const double det_k = C.block<2, 2>(0, 2).determinant();
  const double det_c = C.determinant();
  const double delta = det_a + det_b + 2.0 * det_k;
  const double disc = std::sqrt(std::max(delta * delta - 4.0 * det_c, 0.0));
  const double lo = std::sqrt(std::max(0.5 * (delta - disc), 0.0));
  const double hi = std::sqrt(std::max(0.5 * (delta + disc), 0.0));
  return {lo, hi};
}

Mat4 CovOrbit::at_phase(double t) const { return periodic_cubic(samples, period, t); }

namespace {

struct CovIntegrator {
  const PeriodicOrbit& orbit;
  const DerivedParams& dp;
  const SystemParams& sys;
  const ModulationSpec& mod;

  Vec10 operator()(double t, const Vec10& y) const {
    const Mat4 C = unpack(y);
    const Mat4 S = drift_matrix(t, orbit.at_phase(t), dp, sys, mod);
    Mat4 dC = S * C + C * S.transpose() + noise_matrix(dp, sys);
    return pack(dC);
  }
};

// Joint (means + covariance) right-hand side for the lockstep fallback.
using Vec14 = Eigen::Matrix<double, 14, 1>;

struct JointIntegrator {
  const DerivedParams& dp;
  const SystemParams& sys;
  const ModulationSpec& mod;

  Vec14 operator()(double t, const Vec14& y) const {
    const MeanState m = MeanState::from_vec(y.head<4>());
    const Mat4 C = unpack(y.tail<10>());
    const Mat4 S = drift_matrix(t, m, dp, sys, mod);
    Vec14 d;
    d.head<4>() = mean_rhs(t, m, dp, sys, mod).vec();
    d.tail<10>() = pack(S * C + C * S.transpose() + noise_matrix(dp, sys));
    return d;
  }
};

void check_physical(const Mat4& C, double tol) {
  const auto nu = symplectic_eigenvalues(C);
  if (nu[0] < 0.5 - tol) {
    throw ConvergenceError(
        "covariance lost physicality (symplectic eigenvalue " +
        std::to_string(nu[0]) + " < 1/2); tighten the integration tolerance");
  }
}

}  // namespace

std::vector<Mat4> evolve_covariance(const Mat4& C0, const PeriodicOrbit& orbit,
                                    const DerivedParams& dp, const SystemParams& sys,
                                    const ModulationSpec& mod, double t0, double t1,
                                    int n_out, const CovarianceOptions& opt) {
  if (n_out < 1 || t1 < t0) {
    throw InvalidParameterError("evolve_covariance: bad output request");
  }
  OdeOptions ode;
  ode.rtol = opt.settle.rtol;
  ode.atol = opt.settle.atol;
  CovIntegrator rhs{orbit, dp, sys, mod};
  Vec10 y = pack(C0);
  const Vec10 atol_scale = Vec10::Ones() + y.cwiseAbs();
  std::vector<Mat4> out;
  out.reserve(n_out);
  double t = t0;
  for (int m = 0; m < n_out; ++m) {
    const double tm = n_out == 1 ? t1 : t0 + (t1 - t0) * (m + 1) / n_out;
    integrate_to(rhs, t, tm, y, ode, &atol_scale);
    t = tm;
    Mat4 C = unpack(y);
    check_physical(C, opt.physicality_tol);
    out.push_back(C);
  }
  return out;
}

CovOrbit steady_periodic_covariance(const DerivedParams& dp, const SystemParams& sys,
                                    const ModulationSpec& mod, int n_samples,
                                    const CovarianceOptions& opt,
                                    const PeriodicOrbit* orbit_in) {
  if (n_samples < 2) {
    throw InvalidParameterError("steady_periodic_covariance: need >= 2 samples");
  }
  mod.validate();
  const double tau = mod.period();

  PeriodicOrbit local_orbit;
  const PeriodicOrbit* orbit = orbit_in;
  if (orbit == nullptr) {
    local_orbit = find_periodic_orbit(dp, sys, mod, 512, opt.settle);
    orbit = &local_orbit;
  }

  // Start from the unmodulated steady state around the fixed point.
  const MeanState fp = fixed_point_unmodulated(dp, sys);
  ModulationSpec unmod;
  unmod.omega1 = mod.common_omega();
  const Mat4 S0 = drift_matrix(0.0, fp, dp, sys, unmod);
  const Mat4 C_init = lyapunov_steady(S0, noise_matrix(dp, sys));

  CovOrbit cov;
  cov.period = tau;
  if (mod.unmodulated()) {
    cov.samples.assign(n_samples, C_init);
    return cov;
  }

  OdeOptions ode;
  ode.rtol = opt.settle.rtol;
  ode.atol = opt.settle.atol;
  Vec10 y = pack(C_init);
  const Vec10 atol_scale = Vec10::Ones() + y.cwiseAbs();

  CovIntegrator rhs{*orbit, dp, sys, mod};
  JointIntegrator joint_rhs{dp, sys, mod};
  Vec14 yj;
  if (opt.lockstep_classical) {
    yj.head<4>() = orbit->at_phase(0.0).vec();
    yj.tail<10>() = y;
  }
  Vec14 atol_scale14;
  atol_scale14.head<4>() = Eigen::Vector4d::Ones() + fp.vec().cwiseAbs();
  atol_scale14.tail<10>() = atol_scale;

  double t = 0.0;
  int streak = 0;
  double gap = 0.0;
  bool closed = false;
  for (int p = 1; p <= opt.settle.max_periods; ++p) {
    const Vec10 prev = opt.lockstep_classical ? Vec10(yj.tail<10>()) : y;
    if (opt.lockstep_classical) {
      integrate_to(joint_rhs, t, t + tau, yj, ode, &atol_scale14);
      y = yj.tail<10>();
    } else {
      integrate_to(rhs, t, t + tau, y, ode, &atol_scale);
    }
    t += tau;
    gap = 0.0;
    for (int i = 0; i < 10; ++i) {
      gap = std::max(gap, std::abs(y[i] - prev[i]) / (1.0 + std::abs(y[i])));
    }
    streak = gap < opt.settle.closure_tol ? streak + 1 : 0;
    if (streak >= opt.settle.consecutive && p >= opt.settle.min_periods) {
      closed = true;
      break;
    }
  }
  if (!closed) {
    throw ConvergenceError(
        "steady_periodic_covariance: no closure after " +
        std::to_string(opt.settle.max_periods) + " periods, gap = " +
        std::to_string(gap));
  }
  cov.settle_time = t;
  cov.settle_gap = gap;

  cov.samples.reserve(n_samples);
  for (int m = 0; m < n_samples; ++m) {
    const Mat4 C = unpack(y);
    check_physical(C, opt.physicality_tol);
    cov.samples.push_back(C);
    const double ta = t + m * tau / n_samples;
    const double tb = t + (m + 1) * tau / n_samples;
    if (opt.lockstep_classical) {
      integrate_to(joint_rhs, ta, tb, yj, ode, &atol_scale14);
      y = yj.tail<10>();
    } else {
      integrate_to(rhs, ta, tb, y, ode, &atol_scale);
    }
  }
  return cov;
}

std::array<double, 4> char_poly_4x4(const Mat4& S) {
  // Faddeev-LeVerrier: traces of powers give the coefficients.
  const double t1 = S.trace();
  const Mat4 S2 = S * S;
  const double t2 = S2.trace();
  const Mat4 S3 = S2 * S;
  const double t3 = S3.trace();
  const double t4 = (S3 * S).trace();
  const double b1 = -t1;
  const double b2 = 0.5 * (t1 * t1 - t2);
  const double b3 = -(t1 * t1 * t1 - 3.0 * t1 * t2 + 2.0 * t3) / 6.0;
  const double b4 = (t1 * t1 * t1 * t1 - 6.0 * t1 * t1 * t2 + 3.0 * t2 * t2 +
                     8.0 * t1 * t3 - 6.0 * t4) /
                    24.0;
  return {b1, b2, b3, b4};
}

double routh_quartic_margin(double b1, double b2, double b3, double b4,
                            bool* marginal) {
  // Normalize the frequency scale so the first-column entries are O(1):
  // l -> w mu with w = max_i |b_i|^(1/i).
  double w = 0.0;
  const double bs[4] = {b1, b2, b3, b4};
  for (int i = 0; i < 4; ++i) {
    w = std::max(w, std::pow(std::abs(bs[i]), 1.0 / (i + 1)));
  }
  if (w == 0.0) return 0.0;  // S = nilpotent shift; marginal by convention
  const double n1 = b1 / w;
  const double n2 = b2 / (w * w);
  const double n3 = b3 / (w * w * w);
  const double n4 = b4 / (w * w * w * w);
  constexpr double eps_rh = 1e-12;
  bool used_eps = false;
  auto pivot = [&](double v) {
    if (std::abs(v) < eps_rh) {
      used_eps = true;
      return v >= 0.0 ? eps_rh : -eps_rh;
    }
    return v;
  };
  // Routh array for mu^4 + n1 mu^3 + n2 mu^2 + n3 mu + n4.
  const double p1 = pivot(n1);
  const double c1 = (p1 * n2 - n3) / p1;
  const double pc1 = pivot(c1);
  const double d1 = (pc1 * n3 - p1 * n4) / pc1;
  if (marginal) *marginal = used_eps;
  return std::min({n1, c1, d1, n4});
}

StabilityReport routh_hurwitz_stable(const DerivedParams& dp, const SystemParams& sys,
                                     const ModulationSpec& mod,
                                     const PeriodicOrbit& orbit) {
  StabilityReport rep;
  rep.stable = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(orbit.samples.size());
  rep.margins.reserve(n);
  for (int m = 0; m < n; ++m) {
    const double t = orbit.period * m / n;
    const Mat4 S = drift_matrix(t, orbit.samples[m], dp, sys, mod);
    const auto b = char_poly_4x4(S);
    bool marg = false;
    const double margin = routh_quartic_margin(b[0], b[1], b[2], b[3], &marg);
    rep.margins.push_back(margin);
    rep.marginal = rep.marginal || marg;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_phase = t;
    }
    if (!(margin > 0.0)) rep.stable = false;
  }
  return rep;
}

}  // namespace omsim
