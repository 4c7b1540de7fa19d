#include "omsim/params.hpp"

#include <cmath>
#include <string>

namespace omsim {

namespace {
constexpr double two_pi = 2.0 * constants::pi;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidParameterError(std::string(name) + " must be strictly positive");
  }
}
}  // namespace

SystemParams SystemParams::paper() {
  SystemParams p;
  p.mass = 150e-12;
  p.omega_m = two_pi * 1e6;
  p.gamma_m = two_pi * 1.0;
  p.temperature = 0.1;
  p.detuning = p.omega_m;
  p.cavity_length = 25e-3;
  // Quoted as "k = 1.34 MHz" without the /(2pi) used for omega_m; read as an
  // angular rate directly. Echoed in config metadata for auditability.
  p.kappa = 1.34e6;
  p.laser_wavelength = 1064e-9;
  p.laser_power = 10e-3;
  return p;
}

void SystemParams::validate() const {
  require_positive(mass, "mass");
  require_positive(omega_m, "omega_m");
  require_positive(gamma_m, "gamma_m");
  require_positive(cavity_length, "cavity_length");
  require_positive(kappa, "kappa");
  require_positive(laser_wavelength, "laser_wavelength");
  require_positive(laser_power, "laser_power");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw InvalidParameterError("temperature must be non-negative");
  }
  if (!std::isfinite(detuning)) {
    throw InvalidParameterError("detuning must be finite");
  }
}

DerivedParams derive(const SystemParams& sys) {
  sys.validate();
  DerivedParams d;
  d.omega_c = two_pi * constants::c_light / sys.laser_wavelength;
  d.g0 = d.omega_c / sys.cavity_length *
         std::sqrt(constants::hbar / (sys.mass * sys.omega_m));
  const double omega_laser = d.omega_c - sys.detuning;
  if (!(omega_laser > 0.0)) {
    throw InvalidParameterError("detuning exceeds the optical frequency");
  }
  d.drive = std::sqrt(2.0 * sys.kappa * sys.laser_power /
                      (constants::hbar * omega_laser));
  if (sys.temperature == 0.0) {
    d.n_thermal = 0.0;
    d.coth_factor = 1.0;
  } else {
    const double x =
        constants::hbar * sys.omega_m / (constants::k_boltzmann * sys.temperature);
    d.n_thermal = 1.0 / std::expm1(x);
    d.coth_factor = 1.0 / std::tanh(0.5 * x);
  }
  return d;
}

double ModulationSpec::reduce_phase(double phi) {
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  return r;
}

void ModulationSpec::validate() const {
  if (!(epsilon >= 0.0) || epsilon >= 1.0) {
    throw InvalidParameterError("epsilon must satisfy 0 <= epsilon < 1");
  }
  if (!(eta >= 0.0)) {
    throw InvalidParameterError("eta must be non-negative");
  }
  if (epsilon > 0.0 && !(omega1 > 0.0)) {
    throw InvalidParameterError("omega1 must be positive when epsilon > 0");
  }
  if (eta > 0.0 && !(omega2 > 0.0)) {
    throw InvalidParameterError("omega2 must be positive when eta > 0");
  }
  if (epsilon > 0.0 && eta > 0.0 && omega1 != omega2) {
    throw InvalidParameterError(
        "omega1 and omega2 must coincide when both modulations are active");
  }
}

double ModulationSpec::common_omega() const {
  validate();
  if (epsilon > 0.0) return omega1;
  if (eta > 0.0) return omega2;
  // Unmodulated: any positive frequency provided is used as the nominal
  // sampling period; fall back to omega1 then omega2.
  if (omega1 > 0.0) return omega1;
  if (omega2 > 0.0) return omega2;
  throw InvalidParameterError("no modulation frequency available");
}

}  // namespace omsim
