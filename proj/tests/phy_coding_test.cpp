#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "invivo/phy/convolutional.hpp"
#include "invivo/phy/interleaver.hpp"
#include "invivo/phy/mcs.hpp"
#include "invivo/phy/qam.hpp"

namespace invivo::phy {
namespace {

Bits random_bits(std::mt19937_64& gen, std::size_t n) {
  Bits b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(gen() & 1U);
  return b;
}

std::vector<double> perfect_llrs(const Bits& coded) {
  std::vector<double> l(coded.size());
  for (std::size_t i = 0; i < coded.size(); ++i) l[i] = coded[i] ? 1.0 : -1.0;
  return l;
}

constexpr std::array<CodeRate, 4> kRates{CodeRate::Half, CodeRate::TwoThirds, CodeRate::ThreeQuarters,
                                         CodeRate::FiveSixths};

TEST(McsTable, Anchors) {
  const auto m0 = mcs_table(0);
  EXPECT_EQ(m0.modulation, Modulation::Bpsk);
  EXPECT_EQ(m0.code_rate, CodeRate::Half);
  EXPECT_EQ(m0.n_streams, 1);
  EXPECT_EQ(m0.data_bits_per_ofdm_symbol, 26);
  EXPECT_DOUBLE_EQ(m0.nominal_rate_mbps, 6.5);

  const auto m8 = mcs_table(8);
  EXPECT_EQ(m8.modulation, Modulation::Bpsk);
  EXPECT_EQ(m8.n_streams, 2);
  EXPECT_DOUBLE_EQ(m8.nominal_rate_mbps, 13.0);

  const auto m15 = mcs_table(15);
  EXPECT_EQ(m15.modulation, Modulation::Qam64);
  EXPECT_EQ(m15.code_rate, CodeRate::FiveSixths);
  EXPECT_EQ(m15.n_streams, 2);
  EXPECT_NEAR(m15.nominal_rate_mbps, 130.0, 1e-9);
}

TEST(McsTable, FullRateLadder) {
  // 802.11n 20 MHz long-GI rates in Mbit/s.
  const double rates[] = {6.5, 13, 19.5, 26, 39, 52, 58.5, 65, 13, 26, 39, 52, 78, 104, 117, 130};
  for (int i = 0; i < 16; ++i) {
    const auto m = mcs_table(i);
    EXPECT_NEAR(m.nominal_rate_mbps, rates[i], 1e-9) << "mcs " << i;
    EXPECT_EQ(m.bits_per_subcarrier, bits_per_symbol(m.modulation));
    EXPECT_EQ(m.coded_bits_per_ofdm_symbol, m.n_streams * 52 * m.bits_per_subcarrier);
    EXPECT_NEAR(m.data_bits_per_ofdm_symbol, m.coded_bits_per_ofdm_symbol * rate_value(m.code_rate), 1e-9);
  }
  EXPECT_THROW(mcs_table(-1), PreconditionError);
  EXPECT_THROW(mcs_table(16), PreconditionError);
}

TEST(ConvEncode, AllZero) {
  for (auto r : kRates) {
    const auto out = conv_encode(Bits(120, 0), r);
    EXPECT_TRUE(std::all_of(out.begin(), out.end(), [](auto b) { return b == 0; }));
  }
}

TEST(ConvEncode, ImpulseResponseMatchesGenerators) {
  const Bits impulse{1, 0, 0, 0, 0, 0, 0};
  const auto out = conv_encode(impulse, CodeRate::Half);
  ASSERT_EQ(out.size(), 14u);
  Bits a, b;
  for (std::size_t i = 0; i < out.size(); i += 2) {
    a.push_back(out[i]);
    b.push_back(out[i + 1]);
  }
  EXPECT_EQ(a, (Bits{1, 0, 1, 1, 0, 1, 1}));  // 133 octal
  EXPECT_EQ(b, (Bits{1, 1, 1, 1, 0, 0, 1}));  // 171 octal
}

TEST(ConvEncode, PuncturedLengths) {
  EXPECT_EQ(conv_encode(Bits(300, 1), CodeRate::ThreeQuarters).size(), 400u);
  EXPECT_EQ(conv_encode(Bits(300, 1), CodeRate::TwoThirds).size(), 450u);
  EXPECT_EQ(conv_encode(Bits(300, 1), CodeRate::FiveSixths).size(), 360u);
  EXPECT_EQ(conv_encode(Bits(300, 1), CodeRate::Half).size(), 600u);
  for (auto r : kRates)
    for (std::size_t n = 0; n < 40; ++n) EXPECT_EQ(conv_encode(Bits(n, 1), r).size(), punctured_length(n, r));
}

TEST(ConvEncode, ThreeQuartersKeepsStandardPositions) {
  std::mt19937_64 gen(1);
  const auto x = random_bits(gen, 30);
  const auto mother = conv_encode(x, CodeRate::Half);
  const auto punct = conv_encode(x, CodeRate::ThreeQuarters);
  // Per 3 inputs keep A1 B1 A2 B3.
  Bits expect;
  for (std::size_t t = 0; t < 30; t += 3) {
    expect.push_back(mother[2 * t]);
    expect.push_back(mother[2 * t + 1]);
    expect.push_back(mother[2 * (t + 1)]);
    expect.push_back(mother[2 * (t + 2) + 1]);
  }
  EXPECT_EQ(punct, expect);
}

TEST(ConvEncode, Linear) {
  std::mt19937_64 gen(2);
  for (int i = 0; i < 200; ++i)
    for (auto r : kRates) {
      const auto a = random_bits(gen, 90), b = random_bits(gen, 90);
      Bits s(90);
      for (std::size_t k = 0; k < 90; ++k) s[k] = a[k] ^ b[k];
      const auto ea = conv_encode(a, r), eb = conv_encode(b, r), es = conv_encode(s, r);
      for (std::size_t k = 0; k < es.size(); ++k) ASSERT_EQ(es[k], ea[k] ^ eb[k]);
    }
}

Bits with_tail(Bits x) {
  x.insert(x.end(), kTailBits, 0);
  return x;
}

TEST(Viterbi, NoiselessRoundTrip) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 1000; ++i) {
    const auto r = kRates[static_cast<std::size_t>(i) % 4];
    const std::size_t len = 60 * (1 + gen() % 4);  // multiple of every puncturing period
    const auto x = with_tail(random_bits(gen, len - kTailBits));
    const auto decoded = viterbi_decode(perfect_llrs(conv_encode(x, r)), r);
    ASSERT_EQ(decoded, x) << "iteration " << i;
  }
}

TEST(Viterbi, CorrectsAnySingleFlippedBit) {
  std::mt19937_64 gen(4);
  const auto x = with_tail(random_bits(gen, 100));
  const auto coded = conv_encode(x, CodeRate::Half);
  for (std::size_t pos = 0; pos < coded.size(); ++pos) {
    auto llr = perfect_llrs(coded);
    llr[pos] = -llr[pos];
    ASSERT_EQ(viterbi_decode(llr, CodeRate::Half), x) << "flip at " << pos;
  }
}

TEST(Viterbi, CorrectsSparseErrorsAtHighRate) {
  std::mt19937_64 gen(5);
  const auto x = with_tail(random_bits(gen, 294));
  const auto coded = conv_encode(x, CodeRate::ThreeQuarters);
  auto llr = perfect_llrs(coded);
  for (std::size_t pos = 10; pos < llr.size(); pos += 80) llr[pos] = -llr[pos];
  EXPECT_EQ(viterbi_decode(llr, CodeRate::ThreeQuarters), x);
}

TEST(Viterbi, AllZeroSoftInput) {
  const std::vector<double> erased(200, 0.0);
  Bits out;
  ASSERT_NO_THROW(out = viterbi_decode(erased, CodeRate::Half));
  EXPECT_EQ(out.size(), 100u);
  // Whatever it returns must be the preimage of a valid codeword ending in state 0.
  const auto re = conv_encode(out, CodeRate::Half);
  EXPECT_EQ(re.size(), 200u);
}

TEST(Viterbi, LengthMismatch) {
  // 3/4 code emits 4 bits per 3 inputs with partial patterns of 2 or 3 bits.
  EXPECT_NO_THROW(viterbi_decode(std::vector<double>(6, 0.0), CodeRate::ThreeQuarters));
  EXPECT_THROW(viterbi_decode(std::vector<double>(1, 0.0), CodeRate::FiveSixths), PreconditionError);
  EXPECT_THROW(viterbi_decode(std::vector<double>(7, 0.0), CodeRate::Half), PreconditionError);
}

TEST(Interleaver, RoundTripAndBijective) {
  std::mt19937_64 gen(6);
  for (int bps : {1, 2, 4, 6}) {
    const std::size_t block = 52u * static_cast<std::size_t>(bps);
    std::set<std::size_t> seen;
    for (std::size_t k = 0; k < block; ++k) seen.insert(interleaved_index(k, block));
    EXPECT_EQ(seen.size(), block);
    EXPECT_EQ(*seen.rbegin(), block - 1);

    const auto bits = random_bits(gen, block * 3);
    const auto inter = interleave<std::uint8_t>(bits, block);
    EXPECT_EQ(deinterleave<std::uint8_t>(inter, block), bits);
  }
}

TEST(Interleaver, BpskBlockIsPermutation) {
  std::vector<int> in(52);
  std::iota(in.begin(), in.end(), 0);
  auto out = interleave<int>(in, 52);
  EXPECT_NE(out, in);
  std::sort(out.begin(), out.end());
  EXPECT_EQ(out, in);
}

TEST(Interleaver, AdjacentBitsSpreadAcrossSubcarriers16Qam) {
  const std::size_t block = 52 * 4;
  for (std::size_t k = 0; k + 1 < block; ++k) {
    const auto sc_a = interleaved_index(k, block) / 4;
    const auto sc_b = interleaved_index(k + 1, block) / 4;
    EXPECT_GE(std::max(sc_a, sc_b) - std::min(sc_a, sc_b), 4u) << "k=" << k;
  }
}

TEST(Interleaver, RejectsBadBlocks) {
  EXPECT_THROW(interleave<int>(std::vector<int>(50), 50), PreconditionError);
  EXPECT_THROW(interleave<int>(std::vector<int>(60), 52), PreconditionError);
}

TEST(Qam, BpskConvention) {
  const auto s = qam_map(Bits{0, 1}, Modulation::Bpsk);
  EXPECT_EQ(s[0], Complex(-1.0, 0.0));
  EXPECT_EQ(s[1], Complex(1.0, 0.0));
}

TEST(Qam, UnitAverageEnergy) {
  for (auto m : {Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64}) {
    const auto pts = constellation(m);
    EXPECT_EQ(pts.size(), 1u << bits_per_symbol(m));
    double e = 0.0;
    for (const auto& p : pts) e += std::norm(p);
    EXPECT_NEAR(e / static_cast<double>(pts.size()), 1.0, 1e-12) << to_string(m);
    std::set<std::pair<double, double>> distinct;
    for (const auto& p : pts) distinct.insert({p.real(), p.imag()});
    EXPECT_EQ(distinct.size(), pts.size());
  }
}

TEST(Qam, GrayNeighboursDifferInOneBit) {
  for (auto m : {Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64}) {
    const auto pts = constellation(m);
    const double step = 2.0 * constellation_scale(m);
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b) {
        if (std::abs(std::abs(pts[a] - pts[b]) - step) < 1e-9) {
          EXPECT_EQ(std::popcount(static_cast<unsigned>(a ^ b)), 1) << to_string(m);
        }
      }
  }
}

TEST(Qam, NoiselessDemapRecoversBits) {
  for (auto m : {Modulation::Bpsk, Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64}) {
    const int bps = bits_per_symbol(m);
    const auto pts = constellation(m);
    for (std::size_t v = 0; v < pts.size(); ++v) {
      const auto llr = qam_demap(pts[v], 1e-14, m);
      ASSERT_EQ(llr.size(), static_cast<std::size_t>(bps));
      for (int b = 0; b < bps; ++b) {
        const bool bit = (v >> (bps - 1 - b)) & 1U;
        EXPECT_EQ(llr[static_cast<std::size_t>(b)] > 0.0, bit) << to_string(m) << " point " << v;
      }
    }
  }
}

TEST(Qam, BpskLlrIsExact) {
  // LLR of BPSK in complex noise of variance N: 4 y / N.
  const auto l = qam_demap({0.3, 0.7}, 0.5, Modulation::Bpsk);
  EXPECT_NEAR(l[0], 4 * 0.3 / 0.5, 1e-12);
  const auto erased = qam_demap({0.3, 0.7}, INFINITY, Modulation::Qam16);
  for (double x : erased) EXPECT_EQ(x, 0.0);
}

TEST(Qam, RejectsPartialSymbol) { EXPECT_THROW(qam_map(Bits{1, 0, 1}, Modulation::Qam16), PreconditionError); }

}  // namespace
}  // namespace invivo::phy
