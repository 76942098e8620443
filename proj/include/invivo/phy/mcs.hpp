#pragma once

#include <array>
#include <string>

#include "invivo/errors.hpp"

namespace invivo::phy {

enum class Modulation { Bpsk, Qpsk, Qam16, Qam64 };

enum class CodeRate { Half, TwoThirds, ThreeQuarters, FiveSixths };

constexpr int bits_per_symbol(Modulation m) {
  switch (m) {
    case Modulation::Bpsk: return 1;
    case Modulation::Qpsk: return 2;
    case Modulation::Qam16: return 4;
    case Modulation::Qam64: return 6;
  }
  return 0;
}

constexpr int rate_numerator(CodeRate r) {
  switch (r) {
    case CodeRate::Half: return 1;
    case CodeRate::TwoThirds: return 2;
    case CodeRate::ThreeQuarters: return 3;
    case CodeRate::FiveSixths: return 5;
  }
  return 0;
}

constexpr int rate_denominator(CodeRate r) { return rate_numerator(r) + 1; }

constexpr double rate_value(CodeRate r) {
  return static_cast<double>(rate_numerator(r)) / static_cast<double>(rate_denominator(r));
}

inline std::string to_string(Modulation m) {
  switch (m) {
    case Modulation::Bpsk: return "BPSK";
    case Modulation::Qpsk: return "QPSK";
    case Modulation::Qam16: return "16-QAM";
    case Modulation::Qam64: return "64-QAM";
  }
  return "?";
}

inline std::string to_string(CodeRate r) {
  return std::to_string(rate_numerator(r)) + "/" + std::to_string(rate_denominator(r));
}

struct McsConfig {
  int index = 0;
  Modulation modulation = Modulation::Bpsk;
  CodeRate code_rate = CodeRate::Half;
  int n_streams = 1;
  int bits_per_subcarrier = 1;
  int coded_bits_per_ofdm_symbol = 0;  ///< n_streams * n_data * bits_per_subcarrier
  int data_bits_per_ofdm_symbol = 0;
  double nominal_rate_mbps = 0.0;
};

/// 802.11n 20 MHz HT MCS 0-15 (long guard interval). Indices 8-15 repeat
/// 0-7 on two spatial streams.
inline McsConfig mcs_table(int index, int n_data = 52, double t_sym_s = 4e-6) {
  invivo::detail::require(index >= 0 && index <= 15, "mcs index " + std::to_string(index) + " out of range 0-15");
  invivo::detail::require(n_data >= 1 && t_sym_s > 0.0, "mcs_table: invalid n_data or symbol duration");
  struct Row {
    Modulation mod;
    CodeRate rate;
  };
  static constexpr std::array<Row, 8> rows{{
      {Modulation::Bpsk, CodeRate::Half},
      {Modulation::Qpsk, CodeRate::Half},
      {Modulation::Qpsk, CodeRate::ThreeQuarters},
      {Modulation::Qam16, CodeRate::Half},
      {Modulation::Qam16, CodeRate::ThreeQuarters},
      {Modulation::Qam64, CodeRate::TwoThirds},
      {Modulation::Qam64, CodeRate::ThreeQuarters},
      {Modulation::Qam64, CodeRate::FiveSixths},
  }};
  const Row row = rows[static_cast<std::size_t>(index % 8)];
  McsConfig c;
  c.index = index;
  c.modulation = row.mod;
  c.code_rate = row.rate;
  c.n_streams = index < 8 ? 1 : 2;
  c.bits_per_subcarrier = bits_per_symbol(row.mod);
  c.coded_bits_per_ofdm_symbol = c.n_streams * n_data * c.bits_per_subcarrier;
  const int num = rate_numerator(row.rate), den = rate_denominator(row.rate);
  invivo::detail::require(c.coded_bits_per_ofdm_symbol % den == 0,
                  "mcs " + std::to_string(index) + ": coded bits per symbol not divisible by the rate denominator");
  c.data_bits_per_ofdm_symbol = c.coded_bits_per_ofdm_symbol / den * num;
  c.nominal_rate_mbps = c.data_bits_per_ofdm_symbol / t_sym_s / 1e6;
  return c;
}

}  // namespace invivo::phy
