#include "omsim/classical.hpp"

#include <cmath>
#include <string>

#include "omsim/interp.hpp"
#include "omsim/ode.hpp"

namespace omsim {

MeanState operator+(const MeanState& a, const MeanState& b) {
  return {a.q + b.q, a.p + b.p, a.a_re + b.a_re, a.a_im + b.a_im};
}
MeanState operator-(const MeanState& a, const MeanState& b) {
  return {a.q - b.q, a.p - b.p, a.a_re - b.a_re, a.a_im - b.a_im};
}
MeanState operator*(double f, const MeanState& s) {
  return {f * s.q, f * s.p, f * s.a_re, f * s.a_im};
}

MeanState mean_rhs(double t, const MeanState& s, const DerivedParams& dp,
                   const SystemParams& sys, const ModulationSpec& mod) {
  const double spring = 1.0 + mod.epsilon * std::cos(mod.omega1 * t);
  const double drive =
      dp.drive * (1.0 + mod.eta * std::cos(mod.omega2 * t + mod.phi));
  const double det_eff = sys.detuning - dp.g0 * s.q;
  MeanState d;
  d.q = sys.omega_m * s.p;
  d.p = -sys.omega_m * spring * s.q - sys.gamma_m * s.p + dp.g0 * s.photon_number();
  // dA/dt = -(kappa + i Delta0) A + i G0 A Q + E(t), split into Re/Im.
  d.a_re = -sys.kappa * s.a_re + det_eff * s.a_im + drive;
  d.a_im = -det_eff * s.a_re - sys.kappa * s.a_im;
  return d;
}

MeanState fixed_point_unmodulated(const DerivedParams& dp, const SystemParams& sys) {
  // Stationarity reduces to a scalar cubic for Qbar:
  //   Qbar * (kappa^2 + (Delta0 - g0 Qbar)^2) = g0 E^2 / omega_m,
  // with Abar = E / (kappa + i(Delta0 - g0 Qbar)) and Pbar = 0. The cubic can
  // be bistable, so Newton follows the branch from the decoupled g0 = 0 root
  // while the coupling is ramped in ten steps.
  const double rhs_full = dp.g0 * dp.drive * dp.drive / sys.omega_m;
  double q = 0.0;
  constexpr int ramp_steps = 10;
  for (int r = 1; r <= ramp_steps; ++r) {
    const double g = dp.g0 * r / ramp_steps;
    const double rhs = g * dp.drive * dp.drive / sys.omega_m;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const double det_eff = sys.detuning - g * q;
      const double denom = sys.kappa * sys.kappa + det_eff * det_eff;
      const double fval = q * denom - rhs;
      const double dval = denom - 2.0 * q * det_eff * g;
      const double step = fval / dval;
      q -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(q))) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("fixed_point_unmodulated: Newton did not converge at ramp step " +
                             std::to_string(r));
    }
  }
  const double det_eff = sys.detuning - dp.g0 * q;
  const double denom = sys.kappa * sys.kappa + det_eff * det_eff;
  MeanState s;
  s.q = q;
  s.p = 0.0;
  s.a_re = dp.drive * sys.kappa / denom;
  s.a_im = -dp.drive * det_eff / denom;

  // All three stationarity residuals must vanish to 1e-10 relative.
  ModulationSpec unmod;
  unmod.omega1 = sys.omega_m;  // placeholder frequency; eps = eta = 0
  const MeanState res = mean_rhs(0.0, s, dp, sys, unmod);
  const double scale = sys.omega_m * (1.0 + std::abs(q)) +
                       dp.drive;
  const double rmax = std::max({std::abs(res.q), std::abs(res.p),
                                std::abs(res.a_re), std::abs(res.a_im)});
  if (!(rmax <= 1e-10 * scale)) {
    throw ConvergenceError("fixed_point_unmodulated: residual " +
                           std::to_string(rmax / scale) + " above tolerance");
  }
  return s;
}

MeanState PeriodicOrbit::at_phase(double t) const {
  return periodic_cubic(samples, period, t);
}

PeriodicOrbit find_periodic_orbit(const DerivedParams& dp, const SystemParams& sys,
                                  const ModulationSpec& mod, int n_samples,
                                  const SettleOptions& opt) {
  if (n_samples < 2) {
    throw InvalidParameterError("find_periodic_orbit: need at least 2 samples");
  }
  mod.validate();
  const double tau = mod.period();
  const MeanState fp = fixed_point_unmodulated(dp, sys);

  PeriodicOrbit orbit;
  orbit.period = tau;
  orbit.samples.reserve(n_samples);

  if (mod.unmodulated()) {
    orbit.samples.assign(n_samples, fp);
    orbit.settle_time = 0.0;
    orbit.settle_gap = 0.0;
    return orbit;
  }

  OdeOptions ode;
  ode.rtol = opt.rtol;
  ode.atol = opt.atol;
  using Vec4 = Eigen::Vector4d;
  const Vec4 atol_scale = Vec4::Ones() + fp.vec().cwiseAbs();
  auto rhs = [&](double t, const Vec4& y) {
    return mean_rhs(t, MeanState::from_vec(y), dp, sys, mod).vec();
  };

  Vec4 y = fp.vec();
  double t = 0.0;
  int streak = 0;
  double gap = 0.0;
  bool closed = false;
  for (int p = 1; p <= opt.max_periods; ++p) {
    const Vec4 prev = y;
    integrate_to(rhs, t, t + tau, y, ode, &atol_scale);
    t += tau;
    gap = 0.0;
    for (int i = 0; i < 4; ++i) {
      gap = std::max(gap, std::abs(y[i] - prev[i]) / (1.0 + std::abs(y[i])));
    }
    streak = gap < opt.closure_tol ? streak + 1 : 0;
    if (streak >= opt.consecutive && p >= opt.min_periods) {
      closed = true;
      break;
    }
  }
  if (!closed) {
    throw ConvergenceError("find_periodic_orbit: no stroboscopic closure after " +
                           std::to_string(opt.max_periods) +
                           " periods, gap = " + std::to_string(gap));
  }
  orbit.settle_time = t;
  orbit.settle_gap = gap;

  // One more period, sampled at n uniform phases.
  for (int m = 0; m < n_samples; ++m) {
    orbit.samples.push_back(MeanState::from_vec(y));
    integrate_to(rhs, t + m * tau / n_samples, t + (m + 1) * tau / n_samples, y,
                 ode, &atol_scale);
  }
  return orbit;
}

std::array<HarmonicSeries, 4> harmonic_projection(const PeriodicOrbit& orbit,
                                                  int max_harmonic) {
  std::array<HarmonicSeries, 4> out;
  std::vector<double> comp(orbit.samples.size());
  for (int c = 0; c < 4; ++c) {
    for (size_t m = 0; m < orbit.samples.size(); ++m) {
      const MeanState& s = orbit.samples[m];
      comp[m] = c == 0 ? s.q : c == 1 ? s.p : c == 2 ? s.a_re : s.a_im;
    }
    out[c] = harmonic_projection(comp, orbit.period, max_harmonic);
  }
  return out;
}

}  // namespace omsim
