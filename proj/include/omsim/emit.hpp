#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "omsim/sweep.hpp"

namespace omsim {

// Locale-independent shortest-roundtrip formatting ("%.12g"); the CSV writers
// go through this so identical runs emit identical bytes.
std::string format_double(double v);

// One row per cell, row-major: coords, status, sub-reason, the five metrics,
// diagnostics. Metric fields are empty for non-ok cells.
void emit_csv(const std::vector<SweepCell>& cells, const SweepGrid& grid,
              std::ostream& os);

// One heatmap per metric; unstable/non-converged cells stay white. Returns the
// files written. Scale bounds are embedded in the SVG metadata.
std::vector<std::string> emit_svg_heatmaps(const std::vector<SweepCell>& cells,
                                           const SweepGrid& grid,
                                           const std::string& out_dir,
                                           const std::string& prefix);

// Gnuplot script referencing an emitted CSV.
void emit_gnuplot(const SweepGrid& grid, const std::string& csv_name,
                  std::ostream& os);

// MetricsSummary as a single JSON object with convention metadata.
std::string metrics_json(const MetricsSummary& m, Block discord_side);

// Orbit exports.
void write_orbit_csv(const PeriodicOrbit& orbit, std::ostream& os);
void write_cov_orbit_csv(const CovOrbit& orbit, std::ostream& os);

}  // namespace omsim
