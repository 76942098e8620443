#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "invivo/capacity.hpp"
#include "invivo/channel_realization.hpp"
#include "invivo/errors.hpp"
#include "invivo/link_budget.hpp"
#include "invivo/matrix.hpp"
#include "invivo/phy/convolutional.hpp"
#include "invivo/phy/interleaver.hpp"
#include "invivo/phy/mcs.hpp"
#include "invivo/phy/qam.hpp"
#include "invivo/rng.hpp"

// Frequency-domain 802.11n-style data path. Each OFDM symbol is a set of
// per-subcarrier vectors; the channel acts by per-subcarrier multiplication,
// so no IFFT or cyclic prefix is needed.

namespace invivo::phy {

inline constexpr int kServiceBits = 16;
inline constexpr double kZfConditionLimit = 1e12;

enum class Detector { Zf, Mmse };

inline std::string to_string(Detector d) { return d == Detector::Zf ? "zf" : "mmse"; }

/// Complex values laid out as [ofdm_symbol][subcarrier][stream].
struct SymbolGrid {
  int n_symbols = 0;
  int n_subcarriers = 0;
  int n_streams = 0;
  std::vector<Complex> values;

  SymbolGrid() = default;
  SymbolGrid(int symbols, int subcarriers, int streams)
      : n_symbols(symbols),
        n_subcarriers(subcarriers),
        n_streams(streams),
        values(static_cast<std::size_t>(symbols) * static_cast<std::size_t>(subcarriers) *
               static_cast<std::size_t>(streams)) {}

  std::size_t offset(int sym, int sc, int stream) const {
    return (static_cast<std::size_t>(sym) * static_cast<std::size_t>(n_subcarriers) + static_cast<std::size_t>(sc)) *
               static_cast<std::size_t>(n_streams) +
           static_cast<std::size_t>(stream);
  }
  Complex& at(int sym, int sc, int stream) { return values[offset(sym, sc, stream)]; }
  const Complex& at(int sym, int sc, int stream) const { return values[offset(sym, sc, stream)]; }

  bool same_shape(const SymbolGrid& o) const {
    return n_symbols == o.n_symbols && n_subcarriers == o.n_subcarriers && n_streams == o.n_streams;
  }
};

/// Equalized symbols plus the post-detection noise variance of each one.
struct Detection {
  SymbolGrid symbols;
  std::vector<double> noise_var;
};

inline int ofdm_symbol_count(std::size_t payload_bytes, const McsConfig& mcs) {
  const std::size_t data_bits = kServiceBits + 8 * payload_bytes + kTailBits;
  const auto per_symbol = static_cast<std::size_t>(mcs.data_bits_per_ofdm_symbol);
  return static_cast<int>((data_bits + per_symbol - 1) / per_symbol);
}

namespace detail {

inline void check_link(const McsConfig& mcs, const LinkBudget& budget) {
  budget.validate();
  invivo::detail::require(mcs.n_streams == budget.n_streams, "link: MCS stream count does not match the link budget");
  const McsConfig expected = mcs_table(mcs.index, budget.n_data, budget.t_sym_s);
  invivo::detail::require(expected.data_bits_per_ofdm_symbol == mcs.data_bits_per_ofdm_symbol,
          "link: MCS was built for a different n_data");
  // The puncturing pattern must restart on every OFDM symbol.
  const auto period = static_cast<std::size_t>(rate_numerator(mcs.code_rate));
  invivo::detail::require(static_cast<std::size_t>(mcs.data_bits_per_ofdm_symbol) % period == 0,
          "link: data bits per OFDM symbol not aligned to the puncturing period");
}

inline void check_channel(const ChannelRealization& ch, const LinkBudget& budget, int n_subcarriers, int n_streams) {
  invivo::detail::require(ch.size() == static_cast<std::size_t>(budget.n_data) && n_subcarriers == budget.n_data,
          "link: channel subcarrier count does not match");
  invivo::detail::require(ch.n_streams == n_streams, "link: channel stream count does not match");
}

// Bits of a byte string, least significant bit of each byte first.
inline Bits bytes_to_bits(std::span<const std::uint8_t> bytes) {
  Bits bits;
  bits.reserve(bytes.size() * 8);
  for (auto byte : bytes)
    for (int b = 0; b < 8; ++b) bits.push_back(static_cast<std::uint8_t>((byte >> b) & 1U));
  return bits;
}

inline std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes(bits.size() / 8, 0);
  for (std::size_t i = 0; i < bytes.size() * 8; ++i)
    bytes[i / 8] = static_cast<std::uint8_t>(bytes[i / 8] | ((bits[i] & 1U) << (i % 8)));
  return bytes;
}

inline Matrix2c inverse(const Matrix2c& a) {
  const Complex det = a.det();
  return Matrix2c::from(a(1, 1), -a(0, 1), -a(1, 0), a(0, 0)) * (1.0 / det);
}

struct Equalizer {
  Matrix2c w;                       // x_hat = diag(1/g) * W * y
  std::array<double, 2> noise_var;  // per stream, after unbiasing
  std::array<Complex, 2> gain;
};

inline Equalizer design_equalizer(const Matrix2c& h_eff, int n_streams, double sigma2, Detector kind) {
  Equalizer eq;
  if (n_streams == 1) {
    const Complex h = h_eff(0, 0);
    const double p = std::norm(h);
    if (kind == Detector::Zf || sigma2 == 0.0) {
      if (p == 0.0) throw SingularChannelError("detect: zero SISO channel");
      eq.w(0, 0) = 1.0 / h;
      eq.gain[0] = 1.0;
      eq.noise_var[0] = sigma2 / p;
      return eq;
    }
    eq.w(0, 0) = std::conj(h) / (p + sigma2);
    eq.gain[0] = p / (p + sigma2);
    eq.noise_var[0] = p == 0.0 ? std::numeric_limits<double>::infinity() : sigma2 / p;
    return eq;
  }

  if (kind == Detector::Zf || sigma2 == 0.0) {
    const auto svd = svd2x2(h_eff);
    if (svd.sigma[1] == 0.0 || svd.sigma[0] / svd.sigma[1] > kZfConditionLimit)
      throw SingularChannelError("detect: channel is singular for zero-forcing");
    eq.w = inverse(h_eff);
  } else {
    const Matrix2c hh = h_eff.adjoint();
    eq.w = inverse(hh * h_eff + Matrix2c::identity() * sigma2) * hh;
  }
  const Matrix2c g = eq.w * h_eff;
  for (int i = 0; i < 2; ++i) {
    const Complex gi = g(i, i);
    eq.gain[static_cast<std::size_t>(i)] = gi;
    const double gp = std::norm(gi);
    if (gp < 1e-300) {
      eq.gain[static_cast<std::size_t>(i)] = 0.0;
      eq.noise_var[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double interference = std::norm(g(i, 1 - i));
    const double noise = sigma2 * (std::norm(eq.w(i, 0)) + std::norm(eq.w(i, 1)));
    eq.noise_var[static_cast<std::size_t>(i)] = (interference + noise) / gp;
  }
  return eq;
}

}  // namespace detail

/// Service field, PSDU, tail and pad bits -> BCC -> stream parser ->
/// per-stream interleaver -> constellation mapper.
inline SymbolGrid transmit_frame(std::span<const std::uint8_t> payload, const McsConfig& mcs,
                                 const LinkBudget& budget) {
  invivo::detail::require(!payload.empty() && payload.size() <= 65535, "transmit_frame: payload must be 1-65535 bytes");
  detail::check_link(mcs, budget);

  const int n_sym = ofdm_symbol_count(payload.size(), mcs);
  Bits data(static_cast<std::size_t>(n_sym) * static_cast<std::size_t>(mcs.data_bits_per_ofdm_symbol), 0);
  const Bits psdu = detail::bytes_to_bits(payload);
  std::copy(psdu.begin(), psdu.end(), data.begin() + kServiceBits);

  const Bits coded = conv_encode(data, mcs.code_rate);
  const auto n_cbps = static_cast<std::size_t>(mcs.coded_bits_per_ofdm_symbol);
  const auto n_s = static_cast<std::size_t>(mcs.n_streams);
  const std::size_t per_stream = n_cbps / n_s;

  SymbolGrid grid(n_sym, budget.n_data, mcs.n_streams);
  Bits stream_bits(per_stream);
  for (int sym = 0; sym < n_sym; ++sym) {
    const auto* block = coded.data() + static_cast<std::size_t>(sym) * n_cbps;
    for (std::size_t s = 0; s < n_s; ++s) {
      for (std::size_t j = 0; j < per_stream; ++j) stream_bits[j] = block[j * n_s + s];
      const auto inter = interleave<std::uint8_t>(stream_bits, per_stream);
      const auto symbols = qam_map(inter, mcs.modulation);
      for (int sc = 0; sc < budget.n_data; ++sc)
        grid.at(sym, sc, static_cast<int>(s)) = symbols[static_cast<std::size_t>(sc)];
    }
  }
  return grid;
}

/// Per-subcarrier amplitude applied to unit-energy symbols: the total power
/// P is shared evenly by streams and data subcarriers.
inline double transmit_amplitude(const LinkBudget& budget) {
  return std::sqrt(budget.power_w / (budget.n_streams * budget.n_data));
}

/// Complex noise variance per subcarrier sample, N0 * BW / n_data.
inline double subcarrier_noise_variance(const LinkBudget& budget) { return budget.noise_power_w() / budget.n_data; }

/// y_k = H_k x_k sqrt(P / (n_streams n_data)) + w_k, with w_k circular
/// Gaussian of variance N0 BW / n_data. Deterministic in `seed`.
inline SymbolGrid apply_channel_awgn(const SymbolGrid& grid, const ChannelRealization& ch, const LinkBudget& budget,
                                     std::uint64_t seed) {
  budget.validate();
  invivo::detail::require(grid.n_streams == budget.n_streams, "apply_channel_awgn: stream count mismatch");
  detail::check_channel(ch, budget, grid.n_subcarriers, grid.n_streams);

  const double amp = transmit_amplitude(budget);
  const double sigma2 = subcarrier_noise_variance(budget);
  std::mt19937_64 gen(derive_seed(seed, 0x7e1a3c5dULL));
  std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));

  SymbolGrid out(grid.n_symbols, grid.n_subcarriers, grid.n_streams);
  for (int sym = 0; sym < grid.n_symbols; ++sym)
    for (int sc = 0; sc < grid.n_subcarriers; ++sc) {
      const Matrix2c& h = ch.matrices[static_cast<std::size_t>(sc)];
      if (grid.n_streams == 1) {
        const Complex y = h(0, 0) * grid.at(sym, sc, 0) * amp;
        const double nr = sigma2 > 0.0 ? normal(gen) : 0.0;
        const double ni = sigma2 > 0.0 ? normal(gen) : 0.0;
        out.at(sym, sc, 0) = y + Complex(nr, ni);
        continue;
      }
      const auto y = h.apply({grid.at(sym, sc, 0) * amp, grid.at(sym, sc, 1) * amp});
      for (int r = 0; r < 2; ++r) {
        const double nr = sigma2 > 0.0 ? normal(gen) : 0.0;
        const double ni = sigma2 > 0.0 ? normal(gen) : 0.0;
        out.at(sym, sc, r) = y[static_cast<std::size_t>(r)] + Complex(nr, ni);
      }
    }
  return out;
}

/// Linear ZF or MMSE detection with perfect channel knowledge. MMSE output
/// is rescaled to be unbiased; the reported variance covers residual
/// inter-stream interference plus filtered noise.
inline Detection detect(const SymbolGrid& received, const ChannelRealization& ch, const LinkBudget& budget,
                        Detector kind) {
  budget.validate();
  invivo::detail::require(received.n_streams == budget.n_streams, "detect: stream count mismatch");
  detail::check_channel(ch, budget, received.n_subcarriers, received.n_streams);

  const double amp = transmit_amplitude(budget);
  const double sigma2 = subcarrier_noise_variance(budget);
  Detection d{SymbolGrid(received.n_symbols, received.n_subcarriers, received.n_streams),
              std::vector<double>(received.values.size())};
  for (int sc = 0; sc < received.n_subcarriers; ++sc) {
    const Matrix2c h_eff = ch.matrices[static_cast<std::size_t>(sc)] * Complex(amp);
    const auto eq = detail::design_equalizer(h_eff, received.n_streams, sigma2, kind);
    for (int sym = 0; sym < received.n_symbols; ++sym) {
      if (received.n_streams == 1) {
        const auto g = eq.gain[0];
        d.symbols.at(sym, sc, 0) = g == 0.0 ? Complex(0.0) : eq.w(0, 0) * received.at(sym, sc, 0) / g;
        d.noise_var[d.symbols.offset(sym, sc, 0)] = eq.noise_var[0];
        continue;
      }
      const auto z = eq.w.apply({received.at(sym, sc, 0), received.at(sym, sc, 1)});
      for (int s = 0; s < 2; ++s) {
        const auto g = eq.gain[static_cast<std::size_t>(s)];
        d.symbols.at(sym, sc, s) = g == 0.0 ? Complex(0.0) : z[static_cast<std::size_t>(s)] / g;
        d.noise_var[d.symbols.offset(sym, sc, s)] = eq.noise_var[static_cast<std::size_t>(s)];
      }
    }
  }
  return d;
}

/// Soft-demap, deinterleave, merge streams, Viterbi-decode and strip the
/// service field. The result has `payload_bytes` bytes.
inline std::vector<std::uint8_t> decode_detected(const Detection& det, const McsConfig& mcs, std::size_t payload_bytes) {
  const auto n_s = static_cast<std::size_t>(mcs.n_streams);
  const auto n_cbps = static_cast<std::size_t>(mcs.coded_bits_per_ofdm_symbol);
  const std::size_t per_stream = n_cbps / n_s;
  const int n_sym = det.symbols.n_symbols;
  invivo::detail::require(n_sym == ofdm_symbol_count(payload_bytes, mcs), "receive: OFDM symbol count does not match payload");
  invivo::detail::require(det.symbols.n_streams == mcs.n_streams, "receive: stream count mismatch");
  invivo::detail::require(static_cast<std::size_t>(det.symbols.n_subcarriers * mcs.bits_per_subcarrier) == per_stream,
                  "receive: subcarrier count does not match the MCS");

  std::vector<double> llrs(static_cast<std::size_t>(n_sym) * n_cbps);
  std::vector<double> stream_llr;
  stream_llr.reserve(per_stream);
  for (int sym = 0; sym < n_sym; ++sym)
    for (std::size_t s = 0; s < n_s; ++s) {
      stream_llr.clear();
      for (int sc = 0; sc < det.symbols.n_subcarriers; ++sc) {
        const auto off = det.symbols.offset(sym, sc, static_cast<int>(s));
        qam_demap_into(det.symbols.values[off], det.noise_var[off], mcs.modulation, stream_llr);
      }
      const auto de = deinterleave<double>(stream_llr, per_stream);
      auto* block = llrs.data() + static_cast<std::size_t>(sym) * n_cbps;
      for (std::size_t j = 0; j < per_stream; ++j) block[j * n_s + s] = de[j];
    }

  const Bits decoded = viterbi_decode(llrs, mcs.code_rate, true);
  return detail::bits_to_bytes(std::span(decoded).subspan(kServiceBits, 8 * payload_bytes));
}

/// Decoder output when the receiver has nothing usable: all soft bits erased.
inline std::vector<std::uint8_t> decode_erased(const McsConfig& mcs, std::size_t payload_bytes) {
  const int n_sym = ofdm_symbol_count(payload_bytes, mcs);
  const std::vector<double> llrs(static_cast<std::size_t>(n_sym) * static_cast<std::size_t>(mcs.coded_bits_per_ofdm_symbol),
                                 0.0);
  const Bits decoded = viterbi_decode(llrs, mcs.code_rate, true);
  return detail::bits_to_bytes(std::span(decoded).subspan(kServiceBits, 8 * payload_bytes));
}

inline std::vector<std::uint8_t> receive_frame(const SymbolGrid& received, const ChannelRealization& ch,
                                               const LinkBudget& budget, const McsConfig& mcs, Detector kind,
                                               std::size_t payload_bytes) {
  detail::check_link(mcs, budget);
  return decode_detected(detect(received, ch, budget, kind), mcs, payload_bytes);
}

}  // namespace invivo::phy
