#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "omsim/harmonic.hpp"
#include "omsim/params.hpp"

namespace omsim {

// Classical mean values (Q, P, Re A, Im A); dimensionless.
struct MeanState {
  double q = 0.0;
  double p = 0.0;
  double a_re = 0.0;
  double a_im = 0.0;

  Eigen::Vector4d vec() const { return {q, p, a_re, a_im}; }
  static MeanState from_vec(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  double photon_number() const { return a_re * a_re + a_im * a_im; }
};

MeanState operator+(const MeanState& a, const MeanState& b);
MeanState operator-(const MeanState& a, const MeanState& b);
MeanState operator*(double f, const MeanState& s);
inline MeanState operator*(const MeanState& s, double f) { return f * s; }

// Right-hand side of the mean-value equations:
//   dQ/dt = omega_m P
//   dP/dt = -omega_m [1 + eps cos(Omega1 t)] Q - gamma_m P + G0 |A|^2
//   dA/dt = -(kappa + i Delta0) A + i G0 A Q + E [1 + eta cos(Omega2 t + phi)]
MeanState mean_rhs(double t, const MeanState& s, const DerivedParams& dp,
                   const SystemParams& sys, const ModulationSpec& mod);

// Stationary point of the unmodulated system, following the branch
// continuously connected to the G0 = 0 (cold cavity) solution.
MeanState fixed_point_unmodulated(const DerivedParams& dp, const SystemParams& sys);

struct PeriodicOrbit {
  double period = 0.0;       // tau = 2 pi / Omega, s
  double settle_time = 0.0;  // time at which stroboscopic closure was certified
  double settle_gap = 0.0;   // final closure gap (relative)
  std::vector<MeanState> samples;  // n uniform phases over [0, tau)

  // Periodic cubic interpolation between samples.
  MeanState at_phase(double t) const;
};

struct SettleOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double closure_tol = 1e-8;  // gap < tol * (1 + |component|)
  int min_periods = 20;
  int max_periods = 2000;
  int consecutive = 3;  // closure must hold this many periods in a row
};

// Integrates from the unmodulated fixed point to the asymptotic periodic
// orbit, certifies closure stroboscopically, and returns n_samples uniform
// phases of the settled period. Throws InstabilityError on divergence and
// ConvergenceError if the settle cap is reached.
PeriodicOrbit find_periodic_orbit(const DerivedParams& dp, const SystemParams& sys,
                                  const ModulationSpec& mod, int n_samples,
                                  const SettleOptions& opt = {});

// Discrete Fourier projection of each orbit component (Q, P, ReA, ImA).
std::array<HarmonicSeries, 4> harmonic_projection(const PeriodicOrbit& orbit,
                                                  int max_harmonic);

}  // namespace omsim
