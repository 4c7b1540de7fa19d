#pragma once

#include "omsim/covariance.hpp"

namespace omsim {

enum class Block { mirror, cavity };

// n = (C11 + C22 - 1)/2, the mean phonon number of the mirror fluctuations.
double phonon_number(const Mat4& C);

// Smaller eigenvalue of the selected 2x2 diagonal block = min over theta of
// the generalized quadrature variance <dq_theta^2>.
double min_quadrature_variance(const Mat4& C, Block block);

// Logarithmic negativity (natural log) from the partially transposed
// covariance matrix's smallest symplectic eigenvalue.
double logarithmic_negativity(const Mat4& C);

// Gaussian quantum discord (base-2 entropies), minimized over Gaussian
// measurements on one mode. The paper does not fix the measured side; the
// cavity output is what an experiment reads out, so that is the default.
double gaussian_discord(const Mat4& C, Block measured = Block::cavity);

struct MetricsSummary {
  double n_max = 0.0;
  double en_max = 0.0;
  double d_max = 0.0;
  double qvar_min = 0.0;
  double xvar_min = 0.0;
  // Phase within the period at which each extremum occurs, s.
  double t_n_max = 0.0, t_en_max = 0.0, t_d_max = 0.0, t_qvar_min = 0.0,
         t_xvar_min = 0.0;
};

// Grid scan over the orbit samples plus three-point parabolic refinement of
// each extremum (the metrics are smooth in t, so this buys ~2 digits without
// re-integration).
MetricsSummary period_extrema(const CovOrbit& orbit,
                              Block discord_measured = Block::cavity);

}  // namespace omsim
