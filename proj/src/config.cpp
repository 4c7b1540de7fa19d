#include "omsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace omsim {

namespace {

using nlohmann::json;
constexpr double two_pi = 2.0 * constants::pi;

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& section) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) {
      throw InvalidParameterError("config: unknown key \"" + it.key() +
                                  "\" in section \"" + section + "\"");
    }
  }
}

double number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) {
    throw InvalidParameterError("config: \"" + key + "\" must be a number");
  }
  return j.at(key).get<double>();
}

// Reads a rate given either as ordinary frequency (suffix _hz, converted by
// 2 pi) or angular (suffix _rad_s). Exactly one spelling may appear.
bool read_rate(const json& j, const std::string& stem, double* out) {
  const std::string hz = stem + "_hz", rad = stem + "_rad_s";
  const bool has_hz = j.contains(hz), has_rad = j.contains(rad);
  if (has_hz && has_rad) {
    throw InvalidParameterError("config: \"" + hz + "\" and \"" + rad +
                                "\" are mutually exclusive");
  }
  if (has_hz) *out = two_pi * number(j, hz);
  if (has_rad) *out = number(j, rad);
  return has_hz || has_rad;
}

}  // namespace

Config::Config() {
  modulation.omega1 = 2.0 * system.omega_m;
  modulation.omega2 = 2.0 * system.omega_m;
}

Config parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidParameterError(std::string("config: JSON parse error: ") + e.what());
  }
  reject_unknown(j, {"system", "modulation", "run"}, "<top-level>");

  Config cfg;
  if (j.contains("system")) {
    const json& s = j.at("system");
    reject_unknown(s,
                   {"mass_kg", "omega_m_hz", "omega_m_rad_s", "gamma_m_hz",
                    "gamma_m_rad_s", "temperature_k", "detuning_hz",
                    "detuning_rad_s", "cavity_length_m", "kappa_hz", "kappa_rad_s",
                    "laser_wavelength_m", "laser_power_w"},
                   "system");
    if (s.contains("mass_kg")) cfg.system.mass = number(s, "mass_kg");
    read_rate(s, "omega_m", &cfg.system.omega_m);
    read_rate(s, "gamma_m", &cfg.system.gamma_m);
    if (s.contains("temperature_k")) cfg.system.temperature = number(s, "temperature_k");
    if (!read_rate(s, "detuning", &cfg.system.detuning)) {
      // Default detuning tracks omega_m (Delta0 = omega_m in the reference set).
      cfg.system.detuning = cfg.system.omega_m;
    }
    if (s.contains("cavity_length_m"))
      cfg.system.cavity_length = number(s, "cavity_length_m");
    read_rate(s, "kappa", &cfg.system.kappa);
    if (s.contains("laser_wavelength_m"))
      cfg.system.laser_wavelength = number(s, "laser_wavelength_m");
    if (s.contains("laser_power_w")) cfg.system.laser_power = number(s, "laser_power_w");
    cfg.system.validate();
    // Modulation frequency defaults follow the (possibly overridden) omega_m.
    cfg.modulation.omega1 = 2.0 * cfg.system.omega_m;
    cfg.modulation.omega2 = 2.0 * cfg.system.omega_m;
  }

  if (j.contains("modulation")) {
    const json& m = j.at("modulation");
    reject_unknown(m,
                   {"epsilon", "omega1_hz", "omega1_rad_s", "omega1_over_omega_m",
                    "eta", "omega2_hz", "omega2_rad_s", "omega2_over_omega_m",
                    "phi_rad", "phi_over_pi"},
                   "modulation");
    if (m.contains("epsilon")) cfg.modulation.epsilon = number(m, "epsilon");
    if (m.contains("eta")) cfg.modulation.eta = number(m, "eta");
    if (!read_rate(m, "omega1", &cfg.modulation.omega1) &&
        m.contains("omega1_over_omega_m")) {
      cfg.modulation.omega1 = number(m, "omega1_over_omega_m") * cfg.system.omega_m;
    }
    if (!read_rate(m, "omega2", &cfg.modulation.omega2) &&
        m.contains("omega2_over_omega_m")) {
      cfg.modulation.omega2 = number(m, "omega2_over_omega_m") * cfg.system.omega_m;
    }
    if (m.contains("phi_rad") && m.contains("phi_over_pi")) {
      throw InvalidParameterError(
          "config: \"phi_rad\" and \"phi_over_pi\" are mutually exclusive");
    }
    if (m.contains("phi_rad")) cfg.modulation.phi = number(m, "phi_rad");
    if (m.contains("phi_over_pi"))
      cfg.modulation.phi = number(m, "phi_over_pi") * constants::pi;
    cfg.modulation.phi = ModulationSpec::reduce_phase(cfg.modulation.phi);
    cfg.modulation.validate();
  }

  if (j.contains("run")) {
    const json& r = j.at("run");
    reject_unknown(r,
                   {"n_samples", "workers", "max_order", "format", "omega_over_omega_m",
                    "epsilon_range", "phi_points", "lockstep_classical",
                    "discord_measurement"},
                   "run");
    if (r.contains("n_samples")) cfg.run.n_samples = r.at("n_samples").get<int>();
    if (r.contains("workers")) cfg.run.workers = r.at("workers").get<int>();
    if (r.contains("max_order")) cfg.run.max_order = r.at("max_order").get<int>();
    if (r.contains("format")) {
      cfg.run.format = r.at("format").get<std::string>();
      if (cfg.run.format != "csv" && cfg.run.format != "svg" &&
          cfg.run.format != "gnuplot") {
        throw InvalidParameterError("config: format must be csv, svg or gnuplot");
      }
    }
    auto read_axis = [&](const char* key, double* lo, double* hi, int* n) {
      if (!r.contains(key)) return;
      const json& a = r.at(key);
      if (!a.is_array() || a.size() != 3) {
        throw InvalidParameterError(std::string("config: \"") + key +
                                    "\" must be [min, max, points]");
      }
      *lo = a[0].get<double>();
      *hi = a[1].get<double>();
      *n = a[2].get<int>();
      if (*n < 1 || (*n > 1 && !(*hi > *lo))) {
        throw InvalidParameterError(std::string("config: bad axis range for ") + key);
      }
    };
    read_axis("omega_over_omega_m", &cfg.run.omega_min, &cfg.run.omega_max,
              &cfg.run.omega_points);
    read_axis("epsilon_range", &cfg.run.eps_min, &cfg.run.eps_max,
              &cfg.run.eps_points);
    if (r.contains("phi_points")) cfg.run.phi_points = r.at("phi_points").get<int>();
    if (r.contains("lockstep_classical"))
      cfg.run.lockstep_classical = r.at("lockstep_classical").get<bool>();
    if (r.contains("discord_measurement")) {
      const std::string side = r.at("discord_measurement").get<std::string>();
      if (side == "cavity") {
        cfg.run.discord_measurement = Block::cavity;
      } else if (side == "mirror") {
        cfg.run.discord_measurement = Block::mirror;
      } else {
        throw InvalidParameterError(
            "config: discord_measurement must be \"cavity\" or \"mirror\"");
      }
    }
    if (cfg.run.n_samples < 2 || cfg.run.phi_points < 2) {
      throw InvalidParameterError("config: n_samples and phi_points must be >= 2");
    }
  }
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string constants_table() {
  std::ostringstream os;
  os.precision(17);
  os << "hbar        = " << constants::hbar << " J s (CODATA 2018)\n"
     << "k_boltzmann = " << constants::k_boltzmann << " J/K (exact)\n"
     << "c_light     = " << constants::c_light << " m/s (exact)\n";
  return os.str();
}

std::string config_metadata(const Config& cfg) {
  const DerivedParams d = derive(cfg.system);
  json j;
  j["system_rad_s"] = {{"mass_kg", cfg.system.mass},
                       {"omega_m", cfg.system.omega_m},
                       {"gamma_m", cfg.system.gamma_m},
                       {"temperature_k", cfg.system.temperature},
                       {"detuning", cfg.system.detuning},
                       {"cavity_length_m", cfg.system.cavity_length},
                       {"kappa", cfg.system.kappa},
                       {"laser_wavelength_m", cfg.system.laser_wavelength},
                       {"laser_power_w", cfg.system.laser_power}};
  j["modulation"] = {{"epsilon", cfg.modulation.epsilon},
                     {"omega1", cfg.modulation.omega1},
                     {"eta", cfg.modulation.eta},
                     {"omega2", cfg.modulation.omega2},
                     {"phi", cfg.modulation.phi}};
  j["derived"] = {{"omega_c", d.omega_c},
                  {"g0", d.g0},
                  {"drive", d.drive},
                  {"n_thermal", d.n_thermal},
                  {"coth_factor", d.coth_factor}};
  j["constants"] = {{"hbar", constants::hbar},
                    {"k_boltzmann", constants::k_boltzmann},
                    {"c_light", constants::c_light}};
  j["conventions"] = {
      {"vacuum_variance", 0.5},
      {"kappa_unit_note",
       "kappa is read as an angular rate (rad/s); a quoted value of "
       "1.34 MHz enters as 1.34e6 rad/s, no 2*pi applied"},
      {"log_negativity_base", "e"},
      {"discord_base", 2},
      {"discord_measurement",
       cfg.run.discord_measurement == Block::cavity ? "cavity" : "mirror"}};
  return j.dump(2);
}

}  // namespace omsim
