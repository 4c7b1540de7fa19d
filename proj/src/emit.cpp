#include "omsim/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace omsim {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

struct MetricColumn {
  const char* name;
  double (*get)(const MetricsSummary&);
};

const MetricColumn kMetricColumns[] = {
    {"n_max", [](const MetricsSummary& m) { return m.n_max; }},
    {"en_max", [](const MetricsSummary& m) { return m.en_max; }},
    {"d_max", [](const MetricsSummary& m) { return m.d_max; }},
    {"qvar_min", [](const MetricsSummary& m) { return m.qvar_min; }},
    {"xvar_min", [](const MetricsSummary& m) { return m.xvar_min; }},
};

}  // namespace

void emit_csv(const std::vector<SweepCell>& cells, const SweepGrid& grid,
              std::ostream& os) {
  os << grid.axis1.name;
  if (grid.axis2) os << "," << grid.axis2->name;
  os << ",status,sub_reason";
  for (const auto& c : kMetricColumns) os << "," << c.name;
  os << ",settle_time,rh_margin\n";
  for (const SweepCell& cell : cells) {
    os << format_double(cell.x);
    if (grid.axis2) os << "," << format_double(cell.y);
    os << "," << to_string(cell.status) << "," << cell.sub_reason;
    for (const auto& c : kMetricColumns) {
      os << ",";
      if (cell.metrics) os << format_double(c.get(*cell.metrics));
    }
    os << "," << format_double(cell.settle_time) << ","
       << format_double(cell.rh_margin) << "\n";
  }
}

namespace {

// Compact blue-white-red-free sequential map (5-stop approximation of
// viridis), t in [0, 1].
void colormap(double t, int rgb[3]) {
  static const double stops[5][3] = {{68, 1, 84},
                                     {59, 82, 139},
                                     {33, 145, 140},
                                     {94, 201, 98},
                                     {253, 231, 37}};
  t = std::min(std::max(t, 0.0), 1.0) * 4.0;
  const int s = std::min(static_cast<int>(t), 3);
  const double f = t - s;
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(stops[s][c] +
                                          f * (stops[s + 1][c] - stops[s][c])));
  }
}

}  // namespace

std::vector<std::string> emit_svg_heatmaps(const std::vector<SweepCell>& cells,
                                           const SweepGrid& grid,
                                           const std::string& out_dir,
                                           const std::string& prefix) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const int n1 = static_cast<int>(grid.axis1.values.size());
  const int n2 = grid.axis2 ? static_cast<int>(grid.axis2->values.size()) : 1;
  const int cell_px = 14;
  const int margin = 46;
  const int width = margin + n1 * cell_px + 10;
  const int height = margin + n2 * cell_px + 30;

  std::vector<std::string> files;
  for (const auto& col : kMetricColumns) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const SweepCell& c : cells) {
      if (!c.metrics) continue;
      const double v = col.get(*c.metrics);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const std::string path = out_dir + "/" + prefix + "_" + col.name + ".svg";
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
       << height << "\">\n";
    os << "<!-- metric=" << col.name << " scale_min=" << format_double(lo)
       << " scale_max=" << format_double(hi)
       << " blank=unstable-or-non-converged -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const SweepCell& c : cells) {
      const int x = margin + c.i * cell_px;
      // axis2 grows upward, like the y axis of a plot.
      const int y = margin + (n2 - 1 - c.j) * cell_px;
      if (!c.metrics) continue;
      const double v = col.get(*c.metrics);
      const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
      int rgb[3];
      colormap(t, rgb);
      os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_px
         << "\" height=\"" << cell_px << "\" fill=\"rgb(" << rgb[0] << ","
         << rgb[1] << "," << rgb[2] << ")\"/>\n";
    }
    os << "<text x=\"" << margin << "\" y=\"18\" font-size=\"12\">" << col.name
       << "  [" << format_double(lo) << ", " << format_double(hi) << "]</text>\n";
    os << "<text x=\"" << margin + n1 * cell_px / 2 << "\" y=\"" << height - 6
       << "\" font-size=\"11\" text-anchor=\"middle\">" << grid.axis1.name
       << " in [" << format_double(grid.axis1.values.front()) << ", "
       << format_double(grid.axis1.values.back()) << "]</text>\n";
    if (grid.axis2) {
      os << "<text x=\"12\" y=\"" << margin + n2 * cell_px / 2
         << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 12 "
         << margin + n2 * cell_px / 2 << ")\">" << grid.axis2->name << " in ["
         << format_double(grid.axis2->values.front()) << ", "
         << format_double(grid.axis2->values.back()) << "]</text>\n";
    }
    os << "</svg>\n";
    files.push_back(path);
  }
  return files;
}

void emit_gnuplot(const SweepGrid& grid, const std::string& csv_name,
                  std::ostream& os) {
  os << "# gnuplot script for " << csv_name << "\n"
     << "set datafile separator ','\n"
     << "set key off\n";
  if (grid.axis2) {
    os << "set view map\n"
       << "set xlabel '" << grid.axis1.name << "'\n"
       << "set ylabel '" << grid.axis2->name << "'\n";
    int col = 5;
    for (const auto& m : kMetricColumns) {
      os << "set title '" << m.name << "'\n"
         << "splot '" << csv_name << "' skip 1 using 1:2:" << col
         << " with points pt 5 ps 2 palette\n"
         << "pause -1\n";
      ++col;
    }
  } else {
    os << "set xlabel '" << grid.axis1.name << "'\n";
    int col = 4;
    for (const auto& m : kMetricColumns) {
      os << "set title '" << m.name << "'\n"
         << "plot '" << csv_name << "' skip 1 using 1:" << col << " with lines\n"
         << "pause -1\n";
      ++col;
    }
  }
}

std::string metrics_json(const MetricsSummary& m, Block discord_side) {
  nlohmann::json j;
  j["n_max"] = m.n_max;
  j["en_max"] = m.en_max;
  j["d_max"] = m.d_max;
  j["qvar_min"] = m.qvar_min;
  j["xvar_min"] = m.xvar_min;
  j["arg_times"] = {{"n_max", m.t_n_max},
                    {"en_max", m.t_en_max},
                    {"d_max", m.t_d_max},
                    {"qvar_min", m.t_qvar_min},
                    {"xvar_min", m.t_xvar_min}};
  j["conventions"] = {{"vacuum_variance", 0.5},
                      {"log_negativity_base", "e"},
                      {"discord_base", 2},
                      {"discord_measurement",
                       discord_side == Block::cavity ? "cavity" : "mirror"}};
  return j.dump(2);
}

void write_orbit_csv(const PeriodicOrbit& orbit, std::ostream& os) {
  os << "# period=" << format_double(orbit.period)
     << " settle_time=" << format_double(orbit.settle_time) << "\n";
  os << "t,Q,P,ReA,ImA\n";
  const int n = static_cast<int>(orbit.samples.size());
  for (int i = 0; i < n; ++i) {
    const MeanState& s = orbit.samples[i];
    os << format_double(orbit.period * i / n) << "," << format_double(s.q) << ","
       << format_double(s.p) << "," << format_double(s.a_re) << ","
       << format_double(s.a_im) << "\n";
  }
}

void write_cov_orbit_csv(const CovOrbit& orbit, std::ostream& os) {
  os << "# period=" << format_double(orbit.period)
     << " settle_time=" << format_double(orbit.settle_time) << "\n";
  os << "t";
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) os << ",C" << i + 1 << j + 1;
  os << "\n";
  const int n = static_cast<int>(orbit.samples.size());
  for (int m = 0; m < n; ++m) {
    os << format_double(orbit.period * m / n);
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) os << "," << format_double(orbit.samples[m](i, j));
    os << "\n";
  }
}

}  // namespace omsim
