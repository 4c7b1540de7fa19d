#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <vector>

#include "omsim/classical.hpp"
#include "omsim/params.hpp"

namespace omsim {

using Mat4 = Eigen::Matrix4d;

// Drift matrix S(t) of the linearized fluctuation dynamics in the quadrature
// basis (dq, dp, dX, dY), X = (a + a^dag)/sqrt(2), Y = i(a^dag - a)/sqrt(2).
// Since X and Y carry a sqrt(2) relative to Re A and Im A, the radiation-
// pressure coupling entries scale the classical amplitude by sqrt(2):
//   row 2: (-omega_m [1 + eps cos(Omega1 t)], -gamma_m, sqrt2 G0 ReA, sqrt2 G0 ImA)
//   row 3: (-sqrt2 G0 ImA, 0, -kappa,  Delta0 - G0 Q)
//   row 4: ( sqrt2 G0 ReA, 0, -(Delta0 - G0 Q), -kappa)
Mat4 drift_matrix(double t, const MeanState& mean, const DerivedParams& dp,
                  const SystemParams& sys, const ModulationSpec& mod);

// Diagonal noise matrix (0, gamma_m coth(hbar omega_m / 2 kB T), kappa, kappa).
Mat4 noise_matrix(const DerivedParams& dp, const SystemParams& sys);

// Solves S C + C S^T + N = 0. S must be Hurwitz.
Mat4 lyapunov_steady(const Mat4& S, const Mat4& N);

// Symplectic eigenvalues (nu_minus, nu_plus) of a two-mode covariance matrix
// in the vacuum = 1/2 convention; physical states have nu_minus >= 1/2.
std::array<double, 2> symplectic_eigenvalues(const Mat4& C);

struct CovOrbit {
  double period = 0.0;
  double settle_time = 0.0;
  double settle_gap = 0.0;
  std::vector<Mat4> samples;  // n uniform phases over [0, tau)

  Mat4 at_phase(double t) const;
};

struct CovarianceOptions {
  SettleOptions settle;
  // Re-integrate the classical means alongside the covariance instead of
  // interpolating the sampled orbit.
  bool lockstep_classical = false;
  double physicality_tol = 1e-6;  // symplectic eigenvalue >= 1/2 - tol
};

// Propagates dC/dt = S(t) C + C S(t)^T + N from C0 over [t0, t1], with S built
// on the interpolated classical orbit; returns n_out uniformly spaced samples
// (t1 included). Only the 10 independent entries are integrated, so symmetry
// is exact by construction.
std::vector<Mat4> evolve_covariance(const Mat4& C0, const PeriodicOrbit& orbit,
                                    const DerivedParams& dp, const SystemParams& sys,
                                    const ModulationSpec& mod, double t0, double t1,
                                    int n_out, const CovarianceOptions& opt = {});

// Integrates from the unmodulated algebraic-Lyapunov solution until
// stroboscopic closure; returns n_samples phases of the settled period.
// The classical orbit is computed internally unless one is supplied.
CovOrbit steady_periodic_covariance(const DerivedParams& dp, const SystemParams& sys,
                                    const ModulationSpec& mod, int n_samples,
                                    const CovarianceOptions& opt = {},
                                    const PeriodicOrbit* orbit = nullptr);

struct StabilityReport {
  bool stable = false;
  bool marginal = false;       // a Routh pivot needed the epsilon rule
  double worst_margin = 0.0;   // min normalized Routh first-column entry
  double worst_phase = 0.0;    // t within [0, tau) where it occurs
  std::vector<double> margins;  // one per orbit sample
};

// Frozen-time Routh-Hurwitz test of S(t) at every orbit phase. Necessary but
// not sufficient for periodic drift; parametric instability can still show up
// as divergence of the covariance integration.
StabilityReport routh_hurwitz_stable(const DerivedParams& dp, const SystemParams& sys,
                                     const ModulationSpec& mod,
                                     const PeriodicOrbit& orbit);

// Routh-Hurwitz margin for a single quartic monic polynomial
// l^4 + b1 l^3 + b2 l^2 + b3 l + b4 (coefficients scale-normalized inside).
double routh_quartic_margin(double b1, double b2, double b3, double b4,
                            bool* marginal = nullptr);

// Characteristic polynomial coefficients (b1..b4) of a 4x4 matrix,
// det(lI - S) = l^4 + b1 l^3 + b2 l^2 + b3 l + b4.
std::array<double, 4> char_poly_4x4(const Mat4& S);

}  // namespace omsim
