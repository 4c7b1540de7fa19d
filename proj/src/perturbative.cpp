#include "omsim/perturbative.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace omsim {

namespace {
constexpr double sqrt2 = 1.4142135623730950488;
}

// ---------------------------------------------------------------------------
// Toy oscillator

void ToyOscillator::validate() const {
  if (!(omega0 > 0.0) || !(gamma > 0.0)) {
    throw InvalidParameterError("ToyOscillator: omega0 and gamma must be positive");
  }
  if (!(alpha >= 0.0)) {
    throw InvalidParameterError("ToyOscillator: alpha must be non-negative");
  }
}

double toy_response(const ToyOscillator& osc, double nu) {
  const double x = osc.omega0 * osc.omega0 - nu * nu;
  const double y = osc.gamma * nu;
  return 1.0 / std::sqrt(x * x + y * y);
}

double toy_response(const ToyOscillator& osc) { return toy_response(osc, osc.nu); }

HarmonicSeries toy_first_order_orbit(const ToyOscillator& osc) {
  osc.validate();
  if (!osc.below_threshold()) {
    throw InstabilityError("toy_first_order_orbit: above the parametric threshold "
                           "alpha >= 2 gamma / omega0");
  }
  const double x0 = osc.force / (osc.omega0 * osc.omega0);
  HarmonicSeries s;
  s.omega = osc.nu;
  s.order = 1;
  s.a0 = x0;
  if (osc.alpha > 0.0 && osc.force != 0.0) {
    // First order obeys a driven oscillator with effective forcing
    // -w0^2 cos(nu t) x0, so the particular solution is
    // Re[-w0^2 x0 e^{i nu t} / (w0^2 - nu^2 + i g nu)].
    const double x = osc.omega0 * osc.omega0 - osc.nu * osc.nu;
    const double y = osc.gamma * osc.nu;
    const double d = x * x + y * y;
    const double famp = -osc.omega0 * osc.omega0 * x0 * osc.alpha;
    s.add_term(1, famp * x / d, famp * y / d);
  }
  return s;
}

// ---------------------------------------------------------------------------
// MatrixHarmonicSeries

Mat4 MatrixHarmonicSeries::evaluate(double t) const {
  Mat4 v = a0;
  for (const Term& h : harmonics) {
    const double ph = h.k * omega * t;
    v += h.a * std::cos(ph) + h.b * std::sin(ph);
  }
  return v;
}

void MatrixHarmonicSeries::add_term(int k, const Mat4& a, const Mat4& b) {
  if (k == 0) {
    a0 += a;
    return;
  }
  Mat4 bb = b;
  int kk = k;
  if (kk < 0) {
    kk = -kk;
    bb = -bb;
  }
  auto it = std::lower_bound(harmonics.begin(), harmonics.end(), kk,
                             [](const Term& t, int key) { return t.k < key; });
  if (it != harmonics.end() && it->k == kk) {
    it->a += a;
    it->b += bb;
  } else {
    harmonics.insert(it, Term{kk, a, bb});
  }
}

std::pair<Mat4, Mat4> MatrixHarmonicSeries::coeff(int k) const {
  if (k == 0) return {a0, Mat4::Zero()};
  for (const Term& h : harmonics)
    if (h.k == k) return {h.a, h.b};
  return {Mat4::Zero(), Mat4::Zero()};
}

MatrixHarmonicSeries& MatrixHarmonicSeries::operator+=(const MatrixHarmonicSeries& o) {
  a0 += o.a0;
  for (const Term& h : o.harmonics) add_term(h.k, h.a, h.b);
  return *this;
}

MatrixHarmonicSeries MatrixHarmonicSeries::transpose() const {
  MatrixHarmonicSeries r;
  r.omega = omega;
  r.order = order;
  r.a0 = a0.transpose();
  for (const Term& h : harmonics) {
    r.harmonics.push_back({h.k, h.a.transpose(), h.b.transpose()});
  }
  return r;
}

MatrixHarmonicSeries operator*(const MatrixHarmonicSeries& x,
                               const MatrixHarmonicSeries& y) {
  MatrixHarmonicSeries r;
  r.omega = x.omega != 0.0 ? x.omega : y.omega;
  r.order = x.order + y.order;
  auto terms_of = [](const MatrixHarmonicSeries& s) {
    std::vector<MatrixHarmonicSeries::Term> t;
    t.push_back({0, s.a0, Mat4::Zero()});
    t.insert(t.end(), s.harmonics.begin(), s.harmonics.end());
    return t;
  };
  for (const auto& ti : terms_of(x)) {
    for (const auto& tj : terms_of(y)) {
      const int d = ti.k - tj.k, s = ti.k + tj.k;
      r.add_term(d, 0.5 * (ti.a * tj.a + ti.b * tj.b),
                 0.5 * (ti.b * tj.a - ti.a * tj.b));
      r.add_term(s, 0.5 * (ti.a * tj.a - ti.b * tj.b),
                 0.5 * (ti.a * tj.b + ti.b * tj.a));
    }
  }
  return r;
}

HarmonicSeries MatrixHarmonicSeries::entry(int i, int j) const {
  HarmonicSeries s;
  s.omega = omega;
  s.order = order;
  s.a0 = a0(i, j);
  for (const Term& h : harmonics) {
    if (h.a(i, j) != 0.0 || h.b(i, j) != 0.0) s.add_term(h.k, h.a(i, j), h.b(i, j));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Classical orders

HarmonicSeries ClassicalSeries::total(int comp) const {
  HarmonicSeries s;
  s.omega = omega;
  s.order = max_order;
  for (const auto& ord : orders) s += ord[comp];
  return s;
}

MeanState ClassicalSeries::evaluate(double t) const {
  MeanState m;
  m.q = total(0).evaluate(t);
  m.p = total(1).evaluate(t);
  m.a_re = total(2).evaluate(t);
  m.a_im = total(3).evaluate(t);
  return m;
}

namespace {

// Condition number of the harmonic solve, reported so near-singular systems
// (approaching an instability boundary) are visible to the caller.
template <class M>
double condition_of(const M& mat) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

// Solves x' = J x + F for the harmonic-k component: x = a cos(k w t) + b sin(k w t)
// with forcing fa cos + fb sin. k = 0 reduces to J a = -fa.
struct HarmonicKernel {
  Eigen::Matrix4d J;
  double omega;
  double max_condition = 0.0;

  std::pair<Eigen::Vector4d, Eigen::Vector4d> solve(int k, const Eigen::Vector4d& fa,
                                                    const Eigen::Vector4d& fb) {
    if (k == 0) {
      const auto lu = J.partialPivLu();
      const Eigen::Vector4d a = lu.solve(Eigen::Vector4d(-fa));
      const double cond = condition_of(Eigen::MatrixXd(J));
      max_condition = std::max(max_condition, cond);
      if (!a.allFinite() || cond == std::numeric_limits<double>::infinity()) {
        throw SingularSystemError("harmonic balance: singular constant solve");
      }
      return {a, Eigen::Vector4d::Zero()};
    }
    Eigen::Matrix<double, 8, 8> M;
    const double kw = k * omega;
    M.block<4, 4>(0, 0) = J;
    M.block<4, 4>(0, 4) = -kw * Eigen::Matrix4d::Identity();
    M.block<4, 4>(4, 0) = kw * Eigen::Matrix4d::Identity();
    M.block<4, 4>(4, 4) = J;
    Eigen::Matrix<double, 8, 1> rhs;
    rhs << -fa, -fb;
    const Eigen::Matrix<double, 8, 1> ab = M.partialPivLu().solve(rhs);
    const double cond = condition_of(Eigen::MatrixXd(M));
    max_condition = std::max(max_condition, cond);
    if (!ab.allFinite() || cond == std::numeric_limits<double>::infinity()) {
      throw SingularSystemError("harmonic balance: singular solve at harmonic " +
                                std::to_string(k));
    }
    return {ab.head<4>(), ab.tail<4>()};
  }
};

}  // namespace

ClassicalSeries classical_orders(const DerivedParams& dp, const SystemParams& sys,
                                 const ModulationSpec& mod, int max_order) {
  mod.validate();
  if (max_order < 1) {
    throw InvalidParameterError("classical_orders: max_order must be >= 1");
  }
  const double omega = mod.common_omega();
  const MeanState fp = fixed_point_unmodulated(dp, sys);
  const double det_eff = sys.detuning - dp.g0 * fp.q;

  // Jacobian of the unmodulated means at the fixed point.
  Eigen::Matrix4d J;
  J << 0.0, sys.omega_m, 0.0, 0.0,
      -sys.omega_m, -sys.gamma_m, 2.0 * dp.g0 * fp.a_re, 2.0 * dp.g0 * fp.a_im,
      -dp.g0 * fp.a_im, 0.0, -sys.kappa, det_eff,
      dp.g0 * fp.a_re, 0.0, -det_eff, -sys.kappa;

  ClassicalSeries cs;
  cs.omega = omega;
  cs.max_order = max_order;
  cs.orders.resize(max_order + 1);
  for (int c = 0; c < 4; ++c) {
    cs.orders[0][c] = HarmonicSeries::constant(omega, fp.vec()[c]);
    cs.orders[0][c].order = 0;
  }

  HarmonicKernel kernel{J, omega};
  const HarmonicSeries cos_w = HarmonicSeries::cosine(omega, 1, 1.0);

  for (int n = 1; n <= max_order; ++n) {
    std::array<HarmonicSeries, 4> F;
    for (auto& f : F) f.omega = omega;

    // Spring modulation: -omega_m eps cos(W t) Q^(n-1).
    F[1] += (cos_w * cs.orders[n - 1][0]).scaled(-sys.omega_m * mod.epsilon);
    // Drive modulation enters only once, at first order.
    if (n == 1 && mod.eta > 0.0) {
      F[2] += HarmonicSeries::cosine(omega, 1, dp.drive * mod.eta, mod.phi);
    }
    // Bilinear couplings: terms with both factors of order >= 1 are forcing;
    // the (0, n) parts sit inside J.
    for (int i = 1; i < n; ++i) {
      const int j = n - i;
      F[1] += (cs.orders[i][2] * cs.orders[j][2]).scaled(dp.g0);
      F[1] += (cs.orders[i][3] * cs.orders[j][3]).scaled(dp.g0);
      F[2] += (cs.orders[i][0] * cs.orders[j][3]).scaled(-dp.g0);
      F[3] += (cs.orders[i][0] * cs.orders[j][2]).scaled(dp.g0);
    }

    std::set<int> ks;
    for (int c = 0; c < 4; ++c) {
      if (F[c].a0 != 0.0) ks.insert(0);
      for (const auto& h : F[c].harmonics) ks.insert(h.k);
    }
    for (int c = 0; c < 4; ++c) {
      cs.orders[n][c].omega = omega;
      cs.orders[n][c].order = n;
    }
    for (int k : ks) {
      Eigen::Vector4d fa, fb;
      for (int c = 0; c < 4; ++c) {
        fa[c] = F[c].cos_coeff(k);
        fb[c] = F[c].sin_coeff(k);
      }
      const auto [a, b] = kernel.solve(k, fa, fb);
      for (int c = 0; c < 4; ++c) {
        if (k == 0) {
          cs.orders[n][c].a0 = a[c];
        } else if (a[c] != 0.0 || b[c] != 0.0) {
          cs.orders[n][c].add_term(k, a[c], b[c]);
        }
      }
    }
  }
  cs.max_condition = kernel.max_condition;
  return cs;
}

// ---------------------------------------------------------------------------
// Covariance orders

MatrixHarmonicSeries CovarianceSeries::total() const {
  MatrixHarmonicSeries s;
  s.omega = omega;
  s.order = max_order;
  for (const auto& o : orders) s += o;
  return s;
}

Mat4 CovarianceSeries::evaluate(double t) const { return total().evaluate(t); }

HarmonicSeries CovarianceSeries::entry_total(int i, int j) const {
  return total().entry(i, j);
}

HarmonicSeries CovarianceSeries::phonon_series() const {
  HarmonicSeries s = entry_total(0, 0);
  s += entry_total(1, 1);
  s = s.scaled(0.5);
  s.a0 -= 0.5;
  return s;
}

namespace {

// Drift-matrix increment for classical deviations (dQ, du, dv); linear part
// of S around the operating point shared by all orders.
Mat4 drift_increment(double g0, double dq, double du, double dv) {
  Mat4 M = Mat4::Zero();
  M(1, 2) = sqrt2 * g0 * du;
  M(1, 3) = sqrt2 * g0 * dv;
  M(2, 0) = -sqrt2 * g0 * dv;
  M(2, 3) = -g0 * dq;
  M(3, 0) = sqrt2 * g0 * du;
  M(3, 2) = g0 * dq;
  return M;
}

// Solves S0 X + X S0^T - dX/dt + (Fa cos + Fb sin) = 0 at harmonic k via the
// vectorized operator L = I (x) S0 + S0 (x) I acting on vec(X).
struct LyapunovKernel {
  Eigen::Matrix<double, 16, 16> L;
  double omega;
  double max_condition = 0.0;

  explicit LyapunovKernel(const Mat4& S0, double omega_in) : omega(omega_in) {
    L.setZero();
    for (int i = 0; i < 4; ++i) {
      L.block<4, 4>(4 * i, 4 * i) += S0;
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) L(4 * j + k, 4 * i + k) += S0(j, i);
    }
  }

  static Eigen::Matrix<double, 16, 1> vec(const Mat4& M) {
    Eigen::Matrix<double, 16, 1> v;
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) v[4 * j + i] = M(i, j);
    return v;
  }
  static Mat4 unvec(const Eigen::Matrix<double, 16, 1>& v) {
    Mat4 M;
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) M(i, j) = v[4 * j + i];
    return M;
  }

  std::pair<Mat4, Mat4> solve(int k, const Mat4& Fa, const Mat4& Fb) {
    if (k == 0) {
      const Eigen::Matrix<double, 16, 1> x = L.partialPivLu().solve(-vec(Fa));
      track(condition_of(Eigen::MatrixXd(L)), x.allFinite());
      Mat4 X = unvec(x);
      return {0.5 * (X + X.transpose()), Mat4::Zero()};
    }
    Eigen::Matrix<double, 32, 32> M;
    M.setZero();
    M.block<16, 16>(0, 0) = L;
    M.block<16, 16>(16, 16) = L;
    const double kw = k * omega;
    M.block<16, 16>(0, 16) = -kw * Eigen::Matrix<double, 16, 16>::Identity();
    M.block<16, 16>(16, 0) = kw * Eigen::Matrix<double, 16, 16>::Identity();
    Eigen::Matrix<double, 32, 1> rhs;
    rhs << -vec(Fa), -vec(Fb);
    const Eigen::Matrix<double, 32, 1> x = M.partialPivLu().solve(rhs);
    track(condition_of(Eigen::MatrixXd(M)), x.allFinite());
    Mat4 Xa = unvec(x.head<16>());
    Mat4 Xb = unvec(x.tail<16>());
    return {0.5 * (Xa + Xa.transpose()), 0.5 * (Xb + Xb.transpose())};
  }

 private:
  void track(double cond, bool finite) {
    max_condition = std::max(max_condition, cond);
    if (!finite || cond == std::numeric_limits<double>::infinity()) {
      throw SingularSystemError(
          "covariance harmonic balance: singular vectorized operator");
    }
  }
};

}  // namespace

CovarianceSeries covariance_orders(const DerivedParams& dp, const SystemParams& sys,
                                   const ModulationSpec& mod,
                                   const ClassicalSeries& classical, int max_order) {
  if (max_order < 0 || max_order > classical.max_order) {
    throw InvalidParameterError(
        "covariance_orders: need classical series to the requested order");
  }
  const double omega = classical.omega;

  // Decompose S(t) by perturbative order: S^(0) at the fixed point, and for
  // n >= 1 the classical order-n deviations plus (n = 1) the explicit
  // -omega_m eps cos(W t) spring term.
  std::vector<MatrixHarmonicSeries> S(max_order + 1);
  const MeanState fp{classical.orders[0][0].a0, classical.orders[0][1].a0,
                     classical.orders[0][2].a0, classical.orders[0][3].a0};
  ModulationSpec unmod;
  unmod.omega1 = omega;
  const Mat4 S0 = drift_matrix(0.0, fp, dp, sys, unmod);
  S[0].omega = omega;
  S[0].a0 = S0;
  for (int n = 1; n <= max_order; ++n) {
    S[n].omega = omega;
    S[n].order = n;
    const auto& q = classical.orders[n][0];
    const auto& u = classical.orders[n][2];
    const auto& v = classical.orders[n][3];
    S[n].add_term(0, drift_increment(dp.g0, q.a0, u.a0, v.a0), Mat4::Zero());
    std::set<int> ks;
    for (const auto& h : q.harmonics) ks.insert(h.k);
    for (const auto& h : u.harmonics) ks.insert(h.k);
    for (const auto& h : v.harmonics) ks.insert(h.k);
    for (int k : ks) {
      S[n].add_term(k,
                    drift_increment(dp.g0, q.cos_coeff(k), u.cos_coeff(k),
                                    v.cos_coeff(k)),
                    drift_increment(dp.g0, q.sin_coeff(k), u.sin_coeff(k),
                                    v.sin_coeff(k)));
    }
    if (n == 1 && mod.epsilon > 0.0) {
      Mat4 spring = Mat4::Zero();
      spring(1, 0) = -sys.omega_m * mod.epsilon;
      S[1].add_term(1, spring, Mat4::Zero());
    }
  }

  CovarianceSeries cs;
  cs.omega = omega;
  cs.max_order = max_order;
  cs.orders.resize(max_order + 1);

  cs.orders[0].omega = omega;
  cs.orders[0].a0 = lyapunov_steady(S0, noise_matrix(dp, sys));

  LyapunovKernel kernel(S0, omega);
  for (int n = 1; n <= max_order; ++n) {
    MatrixHarmonicSeries F;
    F.omega = omega;
    for (int i = 1; i <= n; ++i) {
      const MatrixHarmonicSeries SC = S[i] * cs.orders[n - i];
      F += SC;
      F += SC.transpose();
    }
    cs.orders[n].omega = omega;
    cs.orders[n].order = n;
    std::set<int> ks;
    if (!F.a0.isZero(0.0)) ks.insert(0);
    for (const auto& h : F.harmonics) ks.insert(h.k);
    for (int k : ks) {
      const auto [fa, fb] = F.coeff(k);
      const auto [xa, xb] = kernel.solve(k, fa, fb);
      cs.orders[n].add_term(k, xa, xb);
    }
  }
  cs.max_condition = kernel.max_condition;
  return cs;
}

// ---------------------------------------------------------------------------

PhaseFit phase_decomposition(std::span<const double> phis,
                             std::span<const double> values) {
  if (phis.size() != values.size() || phis.size() < 3) {
    throw InvalidParameterError(
        "phase_decomposition: need matching phi/value arrays with >= 3 points");
  }
  const int n = static_cast<int>(phis.size());
  Eigen::MatrixXd M(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    M(i, 0) = 1.0;
    M(i, 1) = std::cos(phis[i]);
    M(i, 2) = std::sin(phis[i]);
    rhs[i] = values[i];
  }
  const Eigen::Vector3d sol =
      M.colPivHouseholderQr().solve(rhs);
  if (!sol.allFinite()) {
    throw InvalidParameterError("phase_decomposition: degenerate phase grid");
  }
  PhaseFit fit;
  fit.offset = sol[0];
  // A + c cos(phi) + s sin(phi) = A + B cos(phi + phi0), B = hypot(c, s),
  // phi0 = atan2(-s, c).
  fit.amplitude = std::hypot(sol[1], sol[2]);
  fit.phase = fit.amplitude > 0.0 ? std::atan2(-sol[2], sol[1]) : 0.0;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = rhs[i] - (sol[0] + sol[1] * M(i, 1) + sol[2] * M(i, 2));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace omsim
