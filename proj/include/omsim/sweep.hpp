#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omsim/config.hpp"
#include "omsim/metrics.hpp"

namespace omsim {

struct AxisSpec {
  std::string name;  // omega_over_omega_m | epsilon | eta | phi_over_pi
  std::vector<double> values;
};

struct SweepGrid {
  AxisSpec axis1;
  std::optional<AxisSpec> axis2;

  void validate() const;  // strictly increasing values, known axis names
  std::size_t cell_count() const {
    return axis1.values.size() * (axis2 ? axis2->values.size() : 1);
  }

  static std::vector<double> linspace(double lo, double hi, int n);
  // The (Omega/omega_m, epsilon) grid of the 2-D sweep.
  static SweepGrid two_d(const RunSettings& run);
  // The relative-phase sweep.
  static SweepGrid phase(const RunSettings& run);
};

enum class CellStatus { ok, unstable, non_converged };

const char* to_string(CellStatus s);

struct SweepCell {
  int i = 0;  // axis1 index
  int j = 0;  // axis2 index (0 for 1-D sweeps)
  double x = 0.0;
  double y = 0.0;
  CellStatus status = CellStatus::ok;
  std::string sub_reason;
  std::optional<MetricsSummary> metrics;
  // Diagnostics.
  double settle_time = 0.0;
  double rh_margin = 0.0;
};

// Applies one axis coordinate onto a config (e.g. omega_over_omega_m sets
// both modulation frequencies).
void apply_axis(Config& cfg, const std::string& axis, double value);

// Full pipeline for one parameter point: classical orbit, Routh-Hurwitz,
// periodic covariance, period extrema. Never throws; failures land in status.
SweepCell run_cell(const Config& cfg);

// Row-major over (axis1, axis2); cells are computed by a fixed-size worker
// pool and gathered into a pre-allocated buffer, so the output is identical
// for any worker count.
std::vector<SweepCell> run_sweep(const Config& base, const SweepGrid& grid,
                                 int workers);

}  // namespace omsim
