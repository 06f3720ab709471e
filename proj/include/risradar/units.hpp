#pragma once

#include <cmath>

namespace risradar::units {

inline double db_to_lin(double x_db) { return std::pow(10.0, x_db / 10.0); }

inline double lin_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watt(double x_dbm) { return std::pow(10.0, (x_dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double p_w) { return 10.0 * std::log10(p_w) + 30.0; }

// Amplitude whose squared magnitude is x_db in dB, e.g. a_max from a_max^2 [dB].
inline double db_to_amplitude(double x_db) { return std::pow(10.0, x_db / 20.0); }

} // namespace risradar::units
