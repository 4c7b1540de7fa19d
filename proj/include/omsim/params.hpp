#pragma once

#include "omsim/constants.hpp"
#include "omsim/errors.hpp"

namespace omsim {

// Raw physical inputs, SI units throughout. All frequencies/rates are
// angular (rad/s); Hz-quoted values are converted at the config boundary.
struct SystemParams {
  double mass;              // kg
  double omega_m;           // mechanical angular frequency, rad/s
  double gamma_m;           // mechanical damping rate, rad/s
  double temperature;       // K
  double detuning;          // Delta_0 = omega_c - omega_laser, rad/s
  double cavity_length;     // m
  double kappa;             // cavity amplitude decay rate, rad/s
  double laser_wavelength;  // m
  double laser_power;       // W

  // Parameter set of Sec. III: m = 150 ng, omega_m/2pi = 1 MHz,
  // gamma_m/2pi = 1 Hz, T = 0.1 K, Delta_0 = omega_m, l_0 = 25 mm,
  // kappa = 1.34e6 rad/s, lambda = 1064 nm, P = 10 mW.
  static SystemParams paper();

  // Throws InvalidParameterError on non-positive mandatory fields.
  void validate() const;

  // Markov Brownian-noise model assumes omega_m >> gamma_m; below this the
  // caller should warn but may proceed.
  bool good_quality_factor() const { return omega_m / gamma_m > 100.0; }
};

struct DerivedParams {
  double omega_c;      // optical angular frequency 2*pi*c/lambda, rad/s
  double g0;           // optomechanical coupling rate, rad/s
  double drive;        // |E| = sqrt(2*kappa*P/(hbar*omega_L)), 1/s
  double n_thermal;    // mean thermal phonon number at omega_m
  double coth_factor;  // coth(hbar*omega_m / 2 kB T) = 2*n_thermal + 1
};

DerivedParams derive(const SystemParams& sys);

// Sinusoidal modulations: mechanical spring  omega^2(t) = omega_m^2 [1 + epsilon cos(Omega_1 t)]
// and drive amplitude  E(t) = E [1 + eta cos(Omega_2 t + phi)].
struct ModulationSpec {
  double epsilon = 0.0;  // mechanical modulation strength, < 1
  double omega1 = 0.0;   // rad/s
  double eta = 0.0;      // drive modulation strength
  double omega2 = 0.0;   // rad/s
  double phi = 0.0;      // relative phase, reduced to [0, 2pi)

  void validate() const;

  // The single frequency Omega shared by the periodic-orbit machinery.
  // When both modulations are active they must agree.
  double common_omega() const;

  double period() const { return 2.0 * constants::pi / common_omega(); }

  bool unmodulated() const { return epsilon == 0.0 && eta == 0.0; }

  // Normalizes phi into [0, 2pi).
  static double reduce_phase(double phi);
};

}  // namespace omsim
