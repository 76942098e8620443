#pragma once

#include <cmath>
#include <string>

#include "invivo/errors.hpp"
#include "invivo/units.hpp"

namespace invivo {

/// Transmit power that keeps peak local SAR at 1.48 W/kg, under the 1.6 W/kg limit.
inline constexpr double kSarPowerCapW = 0.412e-3;

/// Link parameters shared by the capacity and FER paths. Defaults are the
/// 20 MHz 802.11n in-body operating point.
struct LinkBudget {
  double power_w = kSarPowerCapW;
  double noise_density_w_per_hz = dbm_to_watts(-174.0);
  double bandwidth_hz = 20e6;
  double t_sym_s = 4e-6;
  int n_data = 52;
  int n_streams = 2;
  bool enforce_sar_cap = true;

  /// Total thermal noise power over the band (N0 * BW).
  double noise_power_w() const { return noise_density_w_per_hz * bandwidth_hz; }

  /// Per-stream SNR of a unit-gain eigenchannel, P / (n_streams * N0 * BW).
  double eigen_snr() const { return power_w / (n_streams * noise_power_w()); }

  void validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    detail::require(positive(power_w), "link budget: power must be positive and finite");
    detail::require(std::isfinite(noise_density_w_per_hz) && noise_density_w_per_hz >= 0.0,
                    "link budget: noise density must be non-negative and finite");
    detail::require(positive(bandwidth_hz), "link budget: bandwidth must be positive");
    detail::require(positive(t_sym_s), "link budget: symbol duration must be positive");
    detail::require(n_data >= 1, "link budget: n_data must be >= 1");
    detail::require(n_streams == 1 || n_streams == 2, "link budget: n_streams must be 1 or 2");
    if (enforce_sar_cap)
      detail::require(power_w <= kSarPowerCapW * (1.0 + 1e-12),
                      "link budget: transmit power exceeds the SAR cap of 0.412 mW");
  }
};

}  // namespace invivo
