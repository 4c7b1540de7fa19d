#pragma once

#include <iosfwd>
#include <string>

#include "omsim/metrics.hpp"
#include "omsim/params.hpp"

namespace omsim {

struct RunSettings {
  int n_samples = 512;
  int workers = 0;  // 0 = all hardware threads
  int max_order = 2;
  std::string format = "csv";  // csv | svg | gnuplot (csv is always written)
  // sweep2d grid, x axis Omega/omega_m, y axis epsilon
  double omega_min = 1.0;
  double omega_max = 3.0;
  int omega_points = 41;
  double eps_min = 0.0;
  double eps_max = 0.5;
  int eps_points = 26;
  // phase sweep
  int phi_points = 64;
  bool lockstep_classical = false;
  Block discord_measurement = Block::cavity;
};

struct Config {
  SystemParams system = SystemParams::paper();
  ModulationSpec modulation;
  RunSettings run;

  Config();  // paper system, Omega1 = Omega2 = 2 omega_m, eps = eta = 0
};

// Strict JSON parsing: unknown keys anywhere are an error. Rates accept
// either an "_hz" suffix (multiplied by 2 pi on ingestion) or "_rad_s"
// (taken as-is); modulation frequencies also accept "_over_omega_m".
Config load_config(const std::string& path);
Config parse_config_text(const std::string& json_text);

// Echo of the resolved configuration: all rates in rad/s, the compiled-in
// physical constants, and the unit/convention notes that make runs auditable.
std::string config_metadata(const Config& cfg);

// The compiled-in CODATA values, printable via the --constants flag.
std::string constants_table();

}  // namespace omsim
