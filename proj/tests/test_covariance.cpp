#include "doctest.h"
#include "omsim/covariance.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

using namespace omsim;

namespace {
ModulationSpec single_mod(const SystemParams& sys, double eps,
                          double omega_factor = 2.0) {
  ModulationSpec m;
  m.epsilon = eps;
  m.omega1 = omega_factor * sys.omega_m;
  m.omega2 = m.omega1;
  return m;
}
}  // namespace

TEST_CASE("drift matrix structure") {
  const SystemParams sys = SystemParams::paper();
  DerivedParams dp = derive(sys);
  const ModulationSpec unmod = single_mod(sys, 0.0);

  SUBCASE("decoupled block-diagonal form") {
    DerivedParams d0 = dp;
    d0.g0 = 0.0;
    const Mat4 S = drift_matrix(0.0, MeanState{0, 0, 100, -5}, d0, sys, unmod);
    CHECK(S(0, 1) == sys.omega_m);
    CHECK(S(1, 0) == -sys.omega_m);
    CHECK(S(1, 1) == -sys.gamma_m);
    CHECK(S(2, 2) == -sys.kappa);
    CHECK(S(3, 3) == -sys.kappa);
    CHECK(S(2, 3) == sys.detuning);
    CHECK(S(3, 2) == -sys.detuning);
    // Structural zeros.
    CHECK(S(0, 0) == 0.0);
    CHECK(S(0, 2) == 0.0);
    CHECK(S(0, 3) == 0.0);
    CHECK(S(1, 2) == 0.0);
    CHECK(S(2, 1) == 0.0);
    CHECK(S(3, 1) == 0.0);
  }

  SUBCASE("spring modulation enters entry (2,1)") {
    const ModulationSpec m = single_mod(sys, 0.2);
    const Mat4 S = drift_matrix(0.0, MeanState{123, 0, 1, 1}, dp, sys, m);
    CHECK(S(1, 0) == doctest::Approx(-1.2 * sys.omega_m).epsilon(1e-14));
  }

  SUBCASE("all eigenvalues damped at the fixed point") {
    const MeanState fp = fixed_point_unmodulated(dp, sys);
    const Mat4 S = drift_matrix(0.0, fp, dp, sys, unmod);
    const auto ev = Eigen::EigenSolver<Mat4>(S, false).eigenvalues();
    for (int i = 0; i < 4; ++i) CHECK(ev[i].real() < 0.0);
  }
}

TEST_CASE("noise matrix") {
  const SystemParams sys = SystemParams::paper();
  const DerivedParams dp = derive(sys);
  const Mat4 N = noise_matrix(dp, sys);
  CHECK(N(0, 0) == 0.0);
  CHECK(N(1, 1) == doctest::Approx(sys.gamma_m * dp.coth_factor).epsilon(1e-15));
  CHECK(N(2, 2) == sys.kappa);
  CHECK(N(3, 3) == sys.kappa);
  CHECK(N(0, 1) == 0.0);
  CHECK(N(2, 3) == 0.0);
}

TEST_CASE("algebraic Lyapunov solve") {
  const SystemParams sys = SystemParams::paper();
  const DerivedParams dp = derive(sys);
  const ModulationSpec unmod = single_mod(sys, 0.0);
  const MeanState fp = fixed_point_unmodulated(dp, sys);
  const Mat4 S = drift_matrix(0.0, fp, dp, sys, unmod);
  const Mat4 N = noise_matrix(dp, sys);
  const Mat4 C = lyapunov_steady(S, N);

  SUBCASE("residual vanishes") {
    const Mat4 R = S * C + C * S.transpose() + N;
    CHECK(R.norm() <= 1e-9 * N.norm());
    CHECK((C - C.transpose()).norm() == 0.0);
  }

  SUBCASE("matches the independent prototype entrywise") {
    Mat4 ref;
    ref << 0.557678360049, 0.0, 0.047930769377, -0.085689014982,
        0.0, 0.526434869349, -0.089353005465, -0.013732255773,
        0.047930769377, -0.089353005465, 0.511971372637, -0.0137197856,
        -0.085689014982, -0.013732255773, -0.0137197856, 0.531430139107;
    CHECK((C - ref).cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("printed baseline within its tolerance") {
    CHECK(C(0, 0) == doctest::Approx(0.56).epsilon(0.04));
  }

  SUBCASE("physical state") {
    const auto nu = symplectic_eigenvalues(C);
    CHECK(nu[0] >= 0.5 - 1e-9);
  }
}

TEST_CASE("decoupled thermal limit is exact") {
  const SystemParams sys = SystemParams::paper();
  DerivedParams dp = derive(sys);
  dp.g0 = 0.0;
  const ModulationSpec unmod = single_mod(sys, 0.0);
  const MeanState fp = fixed_point_unmodulated(dp, sys);
  const Mat4 C = lyapunov_steady(drift_matrix(0.0, fp, dp, sys, unmod),
                                 noise_matrix(dp, sys));
  const double nbar = dp.n_thermal;
  CHECK(std::abs(C(0, 0) - (nbar + 0.5)) < 1e-7 * (nbar + 0.5));
  CHECK(std::abs(C(1, 1) - (nbar + 0.5)) < 1e-7 * (nbar + 0.5));
  CHECK(C(2, 2) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(C(3, 3) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(std::abs(C(0, 2)) < 1e-7);
}

TEST_CASE("lyapunov_steady rejects non-Hurwitz drift") {
  Mat4 S = Mat4::Identity();
  CHECK_THROWS_AS(lyapunov_steady(S, Mat4::Identity()), InstabilityError);
}

TEST_CASE("evolve_covariance holds still when rates vanish") {
  SystemParams sys = SystemParams::paper();
  sys.omega_m = 1e-12;
  sys.gamma_m = 1e-13;
  sys.kappa = 1e-12;
  sys.detuning = 0.0;
  sys.temperature = 0.0;
  DerivedParams dp = derive(sys);
  dp.g0 = 0.0;
  dp.drive = 0.0;
  dp.coth_factor = 1.0;
  dp.n_thermal = 0.0;
  ModulationSpec mod;
  mod.omega1 = 1.0;
  PeriodicOrbit orbit;
  orbit.period = 2.0 * constants::pi;
  orbit.samples.assign(4, MeanState{});
  Mat4 C0 = Mat4::Identity() * 0.7;
  const auto traj = evolve_covariance(C0, orbit, dp, sys, mod, 0.0, 5.0, 3);
  CHECK((traj.back() - C0).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("decoupled mirror thermalizes from vacuum") {
  SystemParams sys = SystemParams::paper();
  sys.gamma_m = sys.omega_m / 500.0;  // fast bath so the test stays cheap
  sys.temperature = 1e-5;
  DerivedParams dp = derive(sys);
  dp.g0 = 0.0;
  const ModulationSpec mod = single_mod(sys, 0.0);
  PeriodicOrbit orbit;
  orbit.period = mod.period();
  orbit.samples.assign(4, fixed_point_unmodulated(dp, sys));
  Mat4 C0 = Mat4::Identity() * 0.5;
  const double t_end = 30.0 / sys.gamma_m;
  const auto traj = evolve_covariance(C0, orbit, dp, sys, mod, 0.0, t_end, 2);
  const double target = dp.n_thermal + 0.5;
  CHECK(traj.back()(0, 0) == doctest::Approx(target).epsilon(1e-3));
  CHECK(traj.back()(1, 1) == doctest::Approx(target).epsilon(1e-3));
}

TEST_CASE("steady periodic covariance") {
  const SystemParams sys = SystemParams::paper();
  const DerivedParams dp = derive(sys);

  SUBCASE("unmodulated orbit is the algebraic solution") {
    const ModulationSpec mod = single_mod(sys, 0.0);
    const CovOrbit cov = steady_periodic_covariance(dp, sys, mod, 8);
    const MeanState fp = fixed_point_unmodulated(dp, sys);
    const Mat4 ref = lyapunov_steady(drift_matrix(0.0, fp, dp, sys, mod),
                                     noise_matrix(dp, sys));
    for (const Mat4& C : cov.samples) {
      CHECK((C - ref).cwiseAbs().maxCoeff() < 1e-7);
    }
  }

  SUBCASE("modulated orbit: symmetry, physicality, closure") {
    const ModulationSpec mod = single_mod(sys, 0.2);
    const CovOrbit cov = steady_periodic_covariance(dp, sys, mod, 128);
    CHECK(cov.settle_gap < 1e-8);
    for (const Mat4& C : cov.samples) {
      CHECK((C - C.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(symplectic_eigenvalues(C)[0] >= 0.5 - 1e-9);
    }
    // C11 oscillates with first-harmonic amplitude ~ eps * |(0.28, -1.63)|.
    double lo = 1e300, hi = -1e300;
    for (const Mat4& C : cov.samples) {
      lo = std::min(lo, C(0, 0));
      hi = std::max(hi, C(0, 0));
    }
    const double amp_est = 0.5 * (hi - lo);
    CHECK(amp_est > 0.2 * std::hypot(0.28, 1.63) * 0.8);
  }

  SUBCASE("lockstep classical integration agrees with interpolation") {
    const ModulationSpec mod = single_mod(sys, 0.2);
    CovarianceOptions interp_opt;
    const CovOrbit a = steady_periodic_covariance(dp, sys, mod, 32, interp_opt);
    CovarianceOptions lockstep_opt;
    lockstep_opt.lockstep_classical = true;
    const CovOrbit b = steady_periodic_covariance(dp, sys, mod, 32, lockstep_opt);
    for (size_t i = 0; i < a.samples.size(); ++i) {
      CHECK((a.samples[i] - b.samples[i]).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("uniqueness: different initial covariances converge together") {
  const SystemParams sys = SystemParams::paper();
  const DerivedParams dp = derive(sys);
  const ModulationSpec mod = single_mod(sys, 0.2);
  const PeriodicOrbit orbit = find_periodic_orbit(dp, sys, mod, 512);
  const MeanState fp = fixed_point_unmodulated(dp, sys);
  ModulationSpec unmod = single_mod(sys, 0.0);
  const Mat4 Cvac = Mat4::Identity() * 0.5;
  Mat4 Chot = lyapunov_steady(drift_matrix(0.0, fp, dp, sys, unmod),
                              noise_matrix(dp, sys)) * 10.0;
  const double horizon = 200.0 * orbit.period;
  const auto ta = evolve_covariance(Cvac, orbit, dp, sys, mod, 0.0, horizon, 1);
  const auto tb = evolve_covariance(Chot, orbit, dp, sys, mod, 0.0, horizon, 1);
  CHECK((ta.back() - tb.back()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("routh-hurwitz margins") {
  SUBCASE("damped quartic is stable") {
    // (l^2 + g l + w^2)(l^2 + 2k l + k^2 + D^2) with positive rates.
    const double g = 0.1, w = 1.0, k = 0.3, D = 0.8;
    const double b1 = g + 2 * k;
    const double b2 = w * w + k * k + D * D + 2 * k * g;
    const double b3 = g * (k * k + D * D) + 2 * k * w * w;
    const double b4 = w * w * (k * k + D * D);
    CHECK(routh_quartic_margin(b1, b2, b3, b4) > 0.0);
  }
  SUBCASE("negative damping flips the verdict") {
    const double g = -0.1, w = 1.0, k = 0.3, D = 0.8;
    const double b1 = g + 2 * k;
    const double b2 = w * w + k * k + D * D + 2 * k * g;
    const double b3 = g * (k * k + D * D) + 2 * k * w * w;
    const double b4 = w * w * (k * k + D * D);
    CHECK(routh_quartic_margin(b1, b2, b3, b4) < 0.0);
  }
  SUBCASE("char_poly_4x4 against eigenvalues") {
    Mat4 S;
    S << 0, 1, 0.2, 0, -1, -0.1, 0, 0.3, 0, 0.1, -0.5, 1.2, -0.2, 0, -1.2, -0.5;
    const auto b = char_poly_4x4(S);
    const auto ev = Eigen::EigenSolver<Mat4>(S).eigenvalues();
    // Evaluate the quartic at each eigenvalue; must vanish.
    for (int i = 0; i < 4; ++i) {
      const std::complex<double> l = ev[i];
      const std::complex<double> p =
          ((((l + b[0]) * l + b[1]) * l + b[2]) * l) + b[3];
      CHECK(std::abs(p) < 1e-10);
    }
  }
}

TEST_CASE("routh-hurwitz report at paper parameters") {
  const SystemParams sys = SystemParams::paper();
  const DerivedParams dp = derive(sys);
  const ModulationSpec mod = single_mod(sys, 0.2);
  const PeriodicOrbit orbit = find_periodic_orbit(dp, sys, mod, 128);
  const StabilityReport rep = routh_hurwitz_stable(dp, sys, mod, orbit);
  CHECK(rep.stable);
  CHECK(rep.worst_margin > 0.0);
  CHECK(rep.margins.size() == orbit.samples.size());
}

TEST_CASE("symplectic eigenvalues") {
  SUBCASE("vacuum") {
    const Mat4 C = Mat4::Identity() * 0.5;
    const auto nu = symplectic_eigenvalues(C);
    CHECK(nu[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(nu[1] == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("two-mode squeezed state is pure") {
    const double r = 0.5, ch = std::cosh(2 * r) / 2, sh = std::sinh(2 * r) / 2;
    Mat4 C = Mat4::Zero();
    C(0, 0) = C(1, 1) = C(2, 2) = C(3, 3) = ch;
    C(0, 2) = C(2, 0) = sh;
    C(1, 3) = C(3, 1) = -sh;
    const auto nu = symplectic_eigenvalues(C);
    CHECK(nu[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(nu[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
}
