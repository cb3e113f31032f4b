#pragma once

#include <cmath>
#include <numbers>

namespace clband {

inline constexpr double kPlanck = 6.62607015e-34;  // J s
inline constexpr double kPi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// dBm references exactly 1 mW.
inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watt_to_dbm(double w) { return linear_to_db(w / 1e-3); }

inline constexpr double thz(double v) { return v * 1e12; }
inline constexpr double ghz(double v) { return v * 1e9; }

// Fibre attenuation in dB/km to a power coefficient in 1/m.
inline double db_per_km_to_neper_per_m(double db_per_km) {
  return db_per_km * std::log(10.0) / 10.0 / 1e3;
}

}  // namespace clband
