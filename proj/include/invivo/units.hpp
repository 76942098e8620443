#pragma once

#include <cmath>

namespace invivo {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

inline double dbm_to_watts(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watts_to_dbm(double watts) { return linear_to_db(watts / 1e-3); }

/// Spectral efficiency (bits/s/Hz) to data rate in Mbit/s over `bandwidth_hz`.
inline double rate_mbps(double bps_hz, double bandwidth_hz) { return bps_hz * bandwidth_hz / 1e6; }

/// Spectral efficiency needed to carry `rate_mbps` over `bandwidth_hz`.
inline double required_bps_hz(double rate_mbps, double bandwidth_hz) {
  return rate_mbps * 1e6 / bandwidth_hz;
}

}  // namespace invivo
