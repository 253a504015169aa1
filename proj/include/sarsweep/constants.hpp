#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace sarsweep {

using cplx = std::complex<double>;

inline constexpr double speed_of_light = 299'792'458.0;  // m/s
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / pi; }

inline double wavelength(double frequency_hz) { return speed_of_light / frequency_hz; }

// 10*log10 with a floor so zero power stays representable.
inline double power_to_db(double power, double floor_db = -200.0) {
  if (!(power > 0.0)) return floor_db;
  const double db = 10.0 * std::log10(power);
  return db < floor_db ? floor_db : db;
}

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace sarsweep
