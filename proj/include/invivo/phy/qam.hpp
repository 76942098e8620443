#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "invivo/errors.hpp"
#include "invivo/matrix.hpp"
#include "invivo/phy/mcs.hpp"

namespace invivo::phy {

// Gray-coded PAM levels per axis, indexed by the axis bits read MSB first
// (first bit of the group is the MSB). Matches the 802.11 constellation tables.
namespace detail {

inline constexpr std::array<int, 2> kPam2{-1, 1};
inline constexpr std::array<int, 4> kPam4{-3, -1, 3, 1};
inline constexpr std::array<int, 8> kPam8{-7, -5, -1, -3, 7, 5, 1, 3};

inline std::span<const int> pam_levels(int axis_bits) {
  switch (axis_bits) {
    case 1: return kPam2;
    case 2: return kPam4;
    case 3: return kPam8;
  }
  return {};
}

}  // namespace detail

/// Scale factor giving unit average symbol energy.
inline double constellation_scale(Modulation m) {
  switch (m) {
    case Modulation::Bpsk: return 1.0;
    case Modulation::Qpsk: return 1.0 / std::sqrt(2.0);
    case Modulation::Qam16: return 1.0 / std::sqrt(10.0);
    case Modulation::Qam64: return 1.0 / std::sqrt(42.0);
  }
  return 0.0;
}

/// Maps groups of bits_per_symbol(m) bits to unit-energy Gray QAM symbols.
/// BPSK maps 0 to -1 and 1 to +1; larger constellations put the first half
/// of each group on I and the second half on Q.
inline std::vector<Complex> qam_map(std::span<const std::uint8_t> bits, Modulation m) {
  const int bps = bits_per_symbol(m);
  invivo::detail::require(bits.size() % static_cast<std::size_t>(bps) == 0,
                  "qam_map: bit count not divisible by bits per symbol");
  const double scale = constellation_scale(m);
  std::vector<Complex> out;
  out.reserve(bits.size() / static_cast<std::size_t>(bps));
  for (std::size_t i = 0; i < bits.size(); i += static_cast<std::size_t>(bps)) {
    if (m == Modulation::Bpsk) {
      out.emplace_back(bits[i] ? 1.0 : -1.0, 0.0);
      continue;
    }
    const int axis = bps / 2;
    const auto levels = detail::pam_levels(axis);
    unsigned i_idx = 0, q_idx = 0;
    for (int b = 0; b < axis; ++b) {
      i_idx = (i_idx << 1) | (bits[i + static_cast<std::size_t>(b)] & 1U);
      q_idx = (q_idx << 1) | (bits[i + static_cast<std::size_t>(axis + b)] & 1U);
    }
    out.emplace_back(scale * levels[i_idx], scale * levels[q_idx]);
  }
  return out;
}

/// All constellation points, indexed by the symbol's bits read MSB first.
inline std::vector<Complex> constellation(Modulation m) {
  const int bps = bits_per_symbol(m);
  std::vector<std::uint8_t> bits;
  for (unsigned v = 0; v < (1U << bps); ++v)
    for (int b = bps - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1U));
  return qam_map(bits, m);
}

namespace detail {

// Max-log LLRs for the `axis_bits` bits carried on one real axis.
inline void demap_axis(double y, double scale, int axis_bits, double noise_var, std::vector<double>& out) {
  const auto levels = pam_levels(axis_bits);
  for (int b = 0; b < axis_bits; ++b) {
    double d0 = std::numeric_limits<double>::infinity();
    double d1 = d0;
    for (std::size_t idx = 0; idx < levels.size(); ++idx) {
      const double e = y - scale * levels[idx];
      const double d = e * e;
      if ((idx >> (axis_bits - 1 - b)) & 1U)
        d1 = std::min(d1, d);
      else
        d0 = std::min(d0, d);
    }
    out.push_back((d0 - d1) / noise_var);
  }
}

}  // namespace detail

inline constexpr double kMinNoiseVariance = 1e-12;

/// Max-log soft bits for one received symbol with complex noise variance
/// `noise_var` (LLR > 0 favours bit 1). Infinite variance yields zeros.
inline void qam_demap_into(Complex y, double noise_var, Modulation m, std::vector<double>& out) {
  const double nv = std::max(noise_var, kMinNoiseVariance);
  const int bps = bits_per_symbol(m);
  const double scale = constellation_scale(m);
  if (std::isinf(nv)) {
    out.insert(out.end(), static_cast<std::size_t>(bps), 0.0);
    return;
  }
  if (m == Modulation::Bpsk) {
    detail::demap_axis(y.real(), scale, 1, nv, out);
    return;
  }
  detail::demap_axis(y.real(), scale, bps / 2, nv, out);
  detail::demap_axis(y.imag(), scale, bps / 2, nv, out);
}

inline std::vector<double> qam_demap(Complex y, double noise_var, Modulation m) {
  std::vector<double> out;
  qam_demap_into(y, noise_var, m, out);
  return out;
}

}  // namespace invivo::phy
