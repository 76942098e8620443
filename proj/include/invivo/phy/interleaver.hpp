#pragma once

#include <span>
#include <string>
#include <vector>

#include "invivo/errors.hpp"

namespace invivo::phy {

inline constexpr std::size_t kInterleaverColumns = 13;

/// Destination of input bit `k` in a block of `block` bits: written row by
/// row into 13 columns, read out column by column.
inline std::size_t interleaved_index(std::size_t k, std::size_t block) {
  const std::size_t rows = block / kInterleaverColumns;
  return rows * (k % kInterleaverColumns) + k / kInterleaverColumns;
}

namespace detail {

inline void check_block(std::size_t total, std::size_t block) {
  invivo::detail::require(block > 0 && block % kInterleaverColumns == 0,
          "interleaver: block of " + std::to_string(block) + " is not a multiple of 13");
  invivo::detail::require(total % block == 0, "interleaver: " + std::to_string(total) + " bits is not a whole number of blocks");
}

}  // namespace detail

/// Block interleaver applied independently to each `block`-sized chunk
/// (one OFDM symbol of one spatial stream: n_data * bits_per_subcarrier).
template <class T>
std::vector<T> interleave(std::span<const T> in, std::size_t block) {
  detail::check_block(in.size(), block);
  std::vector<T> out(in.size());
  for (std::size_t base = 0; base < in.size(); base += block)
    for (std::size_t k = 0; k < block; ++k) out[base + interleaved_index(k, block)] = in[base + k];
  return out;
}

template <class T>
std::vector<T> deinterleave(std::span<const T> in, std::size_t block) {
  detail::check_block(in.size(), block);
  std::vector<T> out(in.size());
  for (std::size_t base = 0; base < in.size(); base += block)
    for (std::size_t k = 0; k < block; ++k) out[base + k] = in[base + interleaved_index(k, block)];
  return out;
}

}  // namespace invivo::phy
