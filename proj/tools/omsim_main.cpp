#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "omsim/acceptance.hpp"
#include "omsim/emit.hpp"
#include "omsim/perturbative.hpp"
#include "omsim/sweep.hpp"

namespace {

using namespace omsim;

// Exit codes: 0 ok, 2 invalid config, 3 numerical failure, 4 I/O.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  int workers = 0;
  int samples = 0;
  std::string format;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "JSON config file");
  cmd->add_option("--out", args->out_dir, "output directory");
  cmd->add_option("--workers", args->workers, "worker threads (0 = all cores)");
  cmd->add_option("--samples", args->samples, "orbit samples per period");
  cmd->add_option("--format", args->format, "csv|svg|gnuplot")
      ->check(CLI::IsMember({"csv", "svg", "gnuplot"}));
}

Config resolve_config(const CommonArgs& args) {
  Config cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  if (args.workers > 0) cfg.run.workers = args.workers;
  if (args.samples > 0) cfg.run.n_samples = args.samples;
  if (!args.format.empty()) cfg.run.format = args.format;
  return cfg;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir + "/" + name);
  if (!os) throw IoError("cannot write " + dir + "/" + name);
  return os;
}

void emit_sweep_outputs(const std::vector<SweepCell>& cells, const SweepGrid& grid,
                        const Config& cfg, const CommonArgs& args,
                        const std::string& stem) {
  auto csv = open_out(args.out_dir, stem + ".csv");
  emit_csv(cells, grid, csv);
  std::cout << args.out_dir << "/" << stem << ".csv\n";
  if (cfg.run.format == "svg") {
    for (const auto& f : emit_svg_heatmaps(cells, grid, args.out_dir, stem)) {
      std::cout << f << "\n";
    }
  } else if (cfg.run.format == "gnuplot") {
    auto gp = open_out(args.out_dir, stem + ".gp");
    emit_gnuplot(grid, stem + ".csv", gp);
    std::cout << args.out_dir << "/" << stem << ".gp\n";
  }
}

int cmd_steady(const CommonArgs& args) {
  const Config cfg = resolve_config(args);
  const SweepCell cell = run_cell(cfg);
  if (cell.status != CellStatus::ok) {
    std::cerr << "steady: " << to_string(cell.status) << " (" << cell.sub_reason
              << ")\n";
    return kExitNumerical;
  }
  std::cout << metrics_json(*cell.metrics, cfg.run.discord_measurement) << "\n";
  return kExitOk;
}

int cmd_sweep2d(const CommonArgs& args) {
  const Config cfg = resolve_config(args);
  const SweepGrid grid = SweepGrid::two_d(cfg.run);
  const auto cells = run_sweep(cfg, grid, cfg.run.workers);
  emit_sweep_outputs(cells, grid, cfg, args, "sweep2d");
  auto meta = open_out(args.out_dir, "sweep2d_meta.json");
  meta << config_metadata(cfg) << "\n";
  return kExitOk;
}

int cmd_phase(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  if (cfg.modulation.epsilon == 0.0 && cfg.modulation.eta == 0.0) {
    // Default to the two-modulation operating point of the phase study.
    cfg.modulation.epsilon = 0.3;
    cfg.modulation.eta = 0.9;
  }
  const SweepGrid grid = SweepGrid::phase(cfg.run);
  const auto cells = run_sweep(cfg, grid, cfg.run.workers);
  emit_sweep_outputs(cells, grid, cfg, args, "phase");

  // Reference lines: each modulation alone (phi-independent).
  Config eps_only = cfg;
  eps_only.modulation.eta = 0.0;
  Config eta_only = cfg;
  eta_only.modulation.epsilon = 0.0;
  auto os = open_out(args.out_dir, "phase_baselines.csv");
  os << "baseline,n_max,en_max,d_max,qvar_min,xvar_min\n";
  for (const auto& [name, c] : {std::pair<std::string, Config>{"epsilon_only", eps_only},
                                {"eta_only", eta_only}}) {
    const SweepCell cell = run_cell(c);
    os << name;
    if (cell.metrics) {
      os << "," << format_double(cell.metrics->n_max) << ","
         << format_double(cell.metrics->en_max) << ","
         << format_double(cell.metrics->d_max) << ","
         << format_double(cell.metrics->qvar_min) << ","
         << format_double(cell.metrics->xvar_min) << "\n";
    } else {
      os << "," << to_string(cell.status) << ",,,,\n";
    }
  }
  std::cout << args.out_dir << "/phase_baselines.csv\n";
  return kExitOk;
}

int cmd_perturb(const CommonArgs& args, bool paper_table) {
  const Config cfg = resolve_config(args);
  const DerivedParams dp = derive(cfg.system);
  const int order = std::max(cfg.run.max_order, 1);
  const ClassicalSeries cls =
      classical_orders(dp, cfg.system, cfg.modulation, order);
  const CovarianceSeries cov = covariance_orders(
      dp, cfg.system, cfg.modulation, cls, std::min(order, cfg.run.max_order));

  nlohmann::json j;
  j["omega"] = cls.omega;
  j["max_order"] = cls.max_order;
  j["max_condition"] = std::max(cls.max_condition, cov.max_condition);
  const char* comp_names[4] = {"Q", "P", "ReA", "ImA"};
  for (int c = 0; c < 4; ++c) {
    nlohmann::json orders = nlohmann::json::array();
    for (const auto& ord : cls.orders) {
      nlohmann::json term;
      term["order"] = ord[c].order;
      term["a0"] = ord[c].a0;
      nlohmann::json harm = nlohmann::json::array();
      for (const auto& h : ord[c].harmonics) {
        harm.push_back({{"k", h.k}, {"a", h.a}, {"b", h.b}});
      }
      term["harmonics"] = harm;
      orders.push_back(term);
    }
    j["classical"][comp_names[c]] = orders;
  }
  auto series_json = [](const HarmonicSeries& s) {
    nlohmann::json t;
    t["a0"] = s.a0;
    nlohmann::json harm = nlohmann::json::array();
    for (const auto& h : s.harmonics) {
      harm.push_back({{"k", h.k}, {"a", h.a}, {"b", h.b}});
    }
    t["harmonics"] = harm;
    return t;
  };
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      j["covariance"]["C" + std::to_string(a + 1) + std::to_string(b + 1)] =
          series_json(cov.entry_total(a, b));
    }
  }
  j["phonon_series"] = series_json(cov.phonon_series());

  std::filesystem::create_directories(args.out_dir);
  const std::string path = args.out_dir + "/perturb.json";
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << j.dump(2) << "\n";
  std::cout << path << "\n";

  if (paper_table) {
    // Semi-numeric expansion in the appendix layout. With only the spring
    // modulation active the order-n coefficients divide by eps^n exactly.
    const double eps = cfg.modulation.epsilon;
    const bool unit_eps = cfg.modulation.eta == 0.0 && eps > 0.0;
    auto coeff = [&](const HarmonicSeries& s, int n, int k, bool sin) {
      const double div = unit_eps ? std::pow(eps, n) : 1.0;
      return (sin ? s.sin_coeff(k) : s.cos_coeff(k)) / div;
    };
    auto table = [&](const char* name, auto get_series) {
      std::cout << name << "(t) = " << format_double(get_series(0).a0);
      for (int n = 1; n <= cls.max_order; ++n) {
        const HarmonicSeries s = get_series(n);
        const std::string pow =
            unit_eps ? (n == 1 ? " eps" : " eps^" + std::to_string(n)) : "";
        if (s.a0 != 0.0) std::cout << " +" << pow << " " << format_double(s.a0);
        for (const auto& h : s.harmonics) {
          std::cout << " +" << pow << " (" << format_double(coeff(s, n, h.k, false))
                    << " cos(" << h.k << " W t) " << format_double(coeff(s, n, h.k, true))
                    << " sin(" << h.k << " W t))";
        }
      }
      std::cout << "\n";
    };
    table("Q", [&](int n) {
      return n == 0 ? cls.orders[0][0]
                    : (unit_eps ? cls.orders[n][0] : cls.orders[n][0]);
    });
    table("n_phon", [&](int n) {
      HarmonicSeries s = cov.orders[n].entry(0, 0);
      s += cov.orders[n].entry(1, 1);
      s = s.scaled(0.5);
      if (n == 0) s.a0 -= 0.5;
      return s;
    });
    table("C11", [&](int n) { return cov.orders[n].entry(0, 0); });
  }
  return kExitOk;
}

int cmd_stability(const CommonArgs& args) {
  const Config cfg = resolve_config(args);
  const DerivedParams dp = derive(cfg.system);
  const PeriodicOrbit orbit = find_periodic_orbit(
      dp, cfg.system, cfg.modulation, std::max(cfg.run.n_samples, 2));
  const StabilityReport rep =
      routh_hurwitz_stable(dp, cfg.system, cfg.modulation, orbit);
  nlohmann::json j;
  j["stable"] = rep.stable;
  j["marginal"] = rep.marginal;
  j["worst_margin"] = rep.worst_margin;
  j["worst_phase"] = rep.worst_phase;
  j["period"] = orbit.period;
  j["settle_time"] = orbit.settle_time;
  std::cout << j.dump(2) << "\n";
  return rep.stable ? kExitOk : kExitNumerical;
}

int cmd_validate(const CommonArgs& args) {
  Config cfg = resolve_config(args);
  const AcceptanceReport rep = run_acceptance(cfg, std::cout);
  return rep.all_passed ? kExitOk : kExitNumerical;
}

int cmd_orbit(const CommonArgs& args) {
  const Config cfg = resolve_config(args);
  const DerivedParams dp = derive(cfg.system);
  const PeriodicOrbit orbit =
      find_periodic_orbit(dp, cfg.system, cfg.modulation, cfg.run.n_samples);
  auto os = open_out(args.out_dir, "orbit.csv");
  write_orbit_csv(orbit, os);
  std::cout << args.out_dir << "/orbit.csv\n";
  CovarianceOptions copt;
  copt.lockstep_classical = cfg.run.lockstep_classical;
  const CovOrbit cov = steady_periodic_covariance(
      dp, cfg.system, cfg.modulation, cfg.run.n_samples, copt, &orbit);
  auto cs = open_out(args.out_dir, "cov_orbit.csv");
  write_cov_orbit_csv(cov, cs);
  std::cout << args.out_dir << "/cov_orbit.csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "omsim: steady periodic Gaussian states of a modulated optomechanical "
      "cavity"};
  app.require_subcommand(0, 1);

  bool show_constants = false;
  app.add_flag("--constants", show_constants, "print the compiled-in constants");

  CommonArgs args;
  bool paper_table = false;

  CLI::App* steady = app.add_subcommand("steady", "metrics for a single config");
  add_common(steady, &args);
  CLI::App* sweep2d =
      app.add_subcommand("sweep2d", "(Omega, epsilon) grid sweep");
  add_common(sweep2d, &args);
  CLI::App* phase = app.add_subcommand("phase", "relative-phase sweep");
  add_common(phase, &args);
  CLI::App* perturb =
      app.add_subcommand("perturb", "harmonic-balance series");
  add_common(perturb, &args);
  perturb->add_flag("--paper-table", paper_table,
                    "print the semi-numeric expansion tables");
  CLI::App* stability = app.add_subcommand("stability", "Routh-Hurwitz report");
  add_common(stability, &args);
  CLI::App* validate =
      app.add_subcommand("validate", "run the acceptance suite");
  add_common(validate, &args);
  CLI::App* orbit = app.add_subcommand("orbit", "export classical and covariance orbits");
  add_common(orbit, &args);

  CLI11_PARSE(app, argc, argv);

  if (show_constants) {
    std::cout << omsim::constants_table();
    if (app.get_subcommands().empty()) return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return kExitOk;
  }

  try {
    if (steady->parsed()) return cmd_steady(args);
    if (sweep2d->parsed()) return cmd_sweep2d(args);
    if (phase->parsed()) return cmd_phase(args);
    if (perturb->parsed()) return cmd_perturb(args, paper_table);
    if (stability->parsed()) return cmd_stability(args);
    if (validate->parsed()) return cmd_validate(args);
    if (orbit->parsed()) return cmd_orbit(args);
  } catch (const omsim::InvalidParameterError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const omsim::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
