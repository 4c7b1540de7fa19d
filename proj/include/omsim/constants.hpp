#pragma once

// Physical constants, CODATA 2018 (exact SI values where defined).
namespace omsim::constants {

inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K (exact)
inline constexpr double c_light = 299792458.0;    // m/s (exact)
inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace omsim::constants
