#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "invivo/channel_realization.hpp"
#include "invivo/errors.hpp"
#include "invivo/geometry.hpp"
#include "invivo/link_budget.hpp"
#include "invivo/rng.hpp"
#include "invivo/units.hpp"

namespace invivo {

/// Synthetic in-body channel: log-distance path loss, a Rician line-of-sight
/// term whose phase follows the shortened in-tissue wavelength, and an
/// exponential tapped-delay-line scatter term for frequency selectivity.
///
/// Defaults put the 5 bits/s/Hz MIMO crossing near 165 mm and the 300 mm
/// capacity below 1.4 bits/s/Hz. They are a calibration, not measured data.
struct InVivoPathModel {
  double ref_loss_db = 60.0;
  double ref_distance_mm = 70.0;
  double exponent = 6.0;
  double wavelength_scale = 6.0;  ///< free-space wavelength / in-body wavelength
  double rician_k_db = 3.0;
  int n_taps = 4;
  double rms_delay_ns = 10.0;
  double carrier_hz = 2.4e9;
  double correlation = 0.0;  ///< Kronecker coefficient between antennas on the same side

  void validate() const {
    detail::require(std::isfinite(ref_loss_db), "path model: ref_loss_db must be finite");
    detail::require(ref_distance_mm > 0.0, "path model: ref_distance_mm must be positive");
    detail::require(exponent > 0.0, "path model: exponent must be positive");
    detail::require(wavelength_scale > 0.0, "path model: wavelength_scale must be positive");
    detail::require(std::isfinite(rician_k_db), "path model: rician_k_db must be finite");
    detail::require(n_taps >= 1, "path model: n_taps must be >= 1");
    detail::require(rms_delay_ns >= 0.0, "path model: rms_delay_ns must be non-negative");
    detail::require(carrier_hz > 0.0, "path model: carrier_hz must be positive");
    detail::require(correlation > -1.0 && correlation < 1.0, "path model: correlation must be in (-1, 1)");
  }

  /// Mean power gain in dB at `d_mm`.
  double mean_gain_db(double d_mm) const {
    return -(ref_loss_db + 10.0 * exponent * std::log10(d_mm / ref_distance_mm));
  }
};

/// Subcarrier frequency offset from the carrier; abstract indices 0..n-1
/// centred on DC with 64-point FFT spacing.
inline double subcarrier_offset_hz(int k, int n_data, double bandwidth_hz) {
  return (k - (n_data - 1) / 2.0) * bandwidth_hz / 64.0;
}

namespace detail {

// Matrix square root of [[1, r], [r, 1]] as [[p, q], [q, p]].
inline std::array<double, 2> correlation_sqrt(double r) {
  const double a = std::sqrt(1.0 + r), b = std::sqrt(1.0 - r);
  return {(a + b) / 2.0, (a - b) / 2.0};
}

}  // namespace detail

/// One frequency response per data subcarrier. MIMO (n_streams = 2) uses
/// the layout's Tx/Rx pairs; SISO uses its single-antenna coordinates.
/// A pure function of its arguments.
inline ChannelRealization synthesize_channel(const AntennaLayout& layout, const InVivoPathModel& model,
                                             const LinkBudget& budget, std::uint64_t seed) {
  model.validate();
  budget.validate();
  const int n_ant = budget.n_streams;
  const auto dist = pairwise_distances(layout);

  const double k_lin = db_to_linear(model.rician_k_db);
  const double los_amp = std::sqrt(k_lin / (k_lin + 1.0));
  const double nlos_amp = std::sqrt(1.0 / (k_lin + 1.0));

  std::vector<double> tap_delay_s(static_cast<std::size_t>(model.n_taps));
  std::vector<double> tap_power(tap_delay_s.size());
  double total = 0.0;
  for (std::size_t l = 0; l < tap_delay_s.size(); ++l) {
    tap_delay_s[l] = static_cast<double>(l) * model.rms_delay_ns * 1e-9;
    tap_power[l] = model.rms_delay_ns > 0.0 ? std::exp(-static_cast<double>(l)) : (l == 0 ? 1.0 : 0.0);
    total += tap_power[l];
  }
  for (auto& p : tap_power) p /= total;

  // Scatter taps: [tap][rx][tx], spatially correlated via the Kronecker model.
  std::mt19937_64 gen(derive_seed(seed, 0x5ca77e7ULL));
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<Matrix2c> taps(tap_delay_s.size());
  for (auto& tap : taps) {
    Matrix2c white;
    for (int r = 0; r < n_ant; ++r)
      for (int t = 0; t < n_ant; ++t) {
        const double re = normal(gen);
        const double im = normal(gen);
        white(r, t) = {re, im};
      }
    if (n_ant == 2 && model.correlation != 0.0) {
      const auto [p, q] = detail::correlation_sqrt(model.correlation);
      const Matrix2c root = Matrix2c::from(p, q, q, p);
      white = root * white * root;
    }
    tap = white;
  }

  const double c0 = 299792458.0;

  ChannelRealization ch;
  ch.n_streams = n_ant;
  ch.source = "synthetic:case=" + std::to_string(layout.case_id) + ",seed=" + std::to_string(seed);
  ch.matrices.resize(static_cast<std::size_t>(budget.n_data));
  for (int k = 0; k < budget.n_data; ++k) {
    const double f_off = subcarrier_offset_hz(k, budget.n_data, budget.bandwidth_hz);
    Matrix2c h;
    for (int r = 0; r < n_ant; ++r)
      for (int t = 0; t < n_ant; ++t) {
        const double d_mm = n_ant == 1 ? dist.siso_mm : dist.mimo_mm[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)];
        const double gain = std::sqrt(db_to_linear(model.mean_gain_db(d_mm)));
        const double los_phase =
            -2.0 * std::numbers::pi * (model.carrier_hz + f_off) * model.wavelength_scale * d_mm * 1e-3 / c0;
        Complex scatter = 0.0;
        for (std::size_t l = 0; l < taps.size(); ++l)
          scatter += std::sqrt(tap_power[l]) * taps[l](r, t) *
                     std::polar(1.0, -2.0 * std::numbers::pi * f_off * tap_delay_s[l]);
        h(r, t) = gain * (los_amp * std::polar(1.0, los_phase) + nlos_amp * scatter);
      }
    ch.matrices[static_cast<std::size_t>(k)] = h;
  }
  return ch;
}

}  // namespace invivo
