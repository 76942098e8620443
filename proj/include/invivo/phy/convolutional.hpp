#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "invivo/errors.hpp"
#include "invivo/phy/mcs.hpp"

namespace invivo::phy {

using Bits = std::vector<std::uint8_t>;

/// Rate-1/2, constraint length 7 mother code with generators 133/171 (octal).
inline constexpr unsigned kGenA = 0133;
inline constexpr unsigned kGenB = 0171;
inline constexpr int kCodeStates = 64;
inline constexpr int kTailBits = 6;

namespace detail {

struct PuncturePattern {
  int period = 1;
  std::array<bool, 5> keep_a{};
  std::array<bool, 5> keep_b{};
};

constexpr PuncturePattern puncture_pattern(CodeRate r) {
  switch (r) {
    case CodeRate::Half: return {1, {true}, {true}};
    case CodeRate::TwoThirds: return {2, {true, true}, {true, false}};
    case CodeRate::ThreeQuarters: return {3, {true, true, false}, {true, false, true}};
    case CodeRate::FiveSixths: return {5, {true, true, false, true, false}, {true, false, true, false, true}};
  }
  return {};
}

// Register layout: bit 6 is the newest input, bit 0 the oldest.
constexpr std::array<std::uint8_t, 2 * kCodeStates> make_output_table() {
  std::array<std::uint8_t, 2 * kCodeStates> t{};
  for (unsigned state = 0; state < kCodeStates; ++state)
    for (unsigned u = 0; u < 2; ++u) {
      const unsigned reg = (u << 6) | state;
      const unsigned a = static_cast<unsigned>(std::popcount(reg & kGenA)) & 1U;
      const unsigned b = static_cast<unsigned>(std::popcount(reg & kGenB)) & 1U;
      t[2 * state + u] = static_cast<std::uint8_t>((a << 1) | b);
    }
  return t;
}

inline constexpr auto kOutputs = make_output_table();

}  // namespace detail

/// Number of coded bits produced for `n_input` encoder input bits.
inline std::size_t punctured_length(std::size_t n_input, CodeRate rate) {
  const auto p = detail::puncture_pattern(rate);
  std::size_t full = n_input / static_cast<std::size_t>(p.period);
  std::size_t n = full * static_cast<std::size_t>(rate_denominator(rate));
  for (std::size_t t = 0; t < n_input % static_cast<std::size_t>(p.period); ++t)
    n += static_cast<std::size_t>(p.keep_a[t]) + static_cast<std::size_t>(p.keep_b[t]);
  return n;
}

/// Encodes `bits` from the all-zero state and punctures to `rate`. Tail
/// bits are the caller's responsibility.
inline Bits conv_encode(std::span<const std::uint8_t> bits, CodeRate rate) {
  const auto p = detail::puncture_pattern(rate);
  Bits out;
  out.reserve(punctured_length(bits.size(), rate));
  unsigned state = 0;
  for (std::size_t t = 0; t < bits.size(); ++t) {
    const unsigned u = bits[t] & 1U;
    const unsigned ab = detail::kOutputs[2 * state + u];
    const auto phase = t % static_cast<std::size_t>(p.period);
    if (p.keep_a[phase]) out.push_back(static_cast<std::uint8_t>(ab >> 1));
    if (p.keep_b[phase]) out.push_back(static_cast<std::uint8_t>(ab & 1U));
    state = ((u << 6) | state) >> 1;
  }
  return out;
}

/// Soft-input Viterbi decoder for conv_encode. LLR > 0 favours bit 1.
/// Punctured positions are re-inserted as zero LLRs. With `terminated`
/// the survivor ending in the all-zero state is returned.
inline Bits viterbi_decode(std::span<const double> llrs, CodeRate rate, bool terminated = true) {
  const auto p = detail::puncture_pattern(rate);
  const std::size_t den = static_cast<std::size_t>(rate_denominator(rate));
  const std::size_t num = static_cast<std::size_t>(p.period);
  std::size_t n_input = llrs.size() / den * num;
  while (punctured_length(n_input, rate) < llrs.size()) ++n_input;
  if (punctured_length(n_input, rate) != llrs.size())
    throw PreconditionError("viterbi_decode: " + std::to_string(llrs.size()) +
                            " soft bits is not a valid punctured length for rate " + to_string(rate));

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::array<double, kCodeStates> metric;
  metric.fill(kNegInf);
  metric[0] = 0.0;
  std::array<double, kCodeStates> next{};
  std::vector<std::uint64_t> survivors(n_input);  // bit s set: predecessor of s had low bit 1

  std::size_t pos = 0;
  for (std::size_t t = 0; t < n_input; ++t) {
    const auto phase = t % num;
    const double la = p.keep_a[phase] ? llrs[pos++] : 0.0;
    const double lb = p.keep_b[phase] ? llrs[pos++] : 0.0;
    // Branch metric for each of the four output symbols (a, b).
    const std::array<double, 4> bm{-la - lb, -la + lb, la - lb, la + lb};
    std::uint64_t decisions = 0;
    for (unsigned s = 0; s < kCodeStates; ++s) {
      const unsigned u = s >> 5;
      const unsigned p0 = (s << 1) & 63U;
      const unsigned p1 = p0 | 1U;
      const double m0 = metric[p0] + bm[detail::kOutputs[2 * p0 + u]];
      const double m1 = metric[p1] + bm[detail::kOutputs[2 * p1 + u]];
      if (m1 > m0) {
        next[s] = m1;
        decisions |= (std::uint64_t{1} << s);
      } else {
        next[s] = m0;
      }
    }
    survivors[t] = decisions;
    metric = next;
  }

  unsigned state = 0;
  if (!terminated) {
    for (unsigned s = 1; s < kCodeStates; ++s)
      if (metric[s] > metric[state]) state = s;
  }
  Bits out(n_input);
  for (std::size_t t = n_input; t-- > 0;) {
    out[t] = static_cast<std::uint8_t>(state >> 5);
    const unsigned low = static_cast<unsigned>((survivors[t] >> state) & 1U);
    state = ((state << 1) & 63U) | low;
  }
  return out;
}

}  // namespace invivo::phy
