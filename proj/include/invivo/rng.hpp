#pragma once

#include <cstdint>

namespace invivo {

/// SplitMix64 finaliser; a bijective avalanche mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Child seed for stream `index` under `parent`. Order-free, so work items
/// can be evaluated on any thread and still see the same random numbers.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace invivo
