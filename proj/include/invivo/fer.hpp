#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "invivo/capacity.hpp"
#include "invivo/channel_model.hpp"
#include "invivo/channel_realization.hpp"
#include "invivo/errors.hpp"
#include "invivo/geometry.hpp"
#include "invivo/link_budget.hpp"
#include "invivo/phy/link.hpp"
#include "invivo/rng.hpp"

namespace invivo {

/// Draw a fresh synthetic channel for every frame.
struct SyntheticChannel {
  AntennaLayout layout;
  InVivoPathModel model;
};

/// Either a fixed realization (e.g. loaded from file) or a synthetic generator.
using ChannelSource = std::variant<ChannelRealization, SyntheticChannel>;

struct SimulationPlan {
  int mcs_index = 0;
  LinkBudget budget;  ///< n_streams is taken from the MCS
  ChannelSource channel = SyntheticChannel{};
  phy::Detector detector = phy::Detector::Mmse;
  int frame_length_bytes = 1000;
  long long max_frames = 100000;
  long long min_error_frames = 100;
  std::uint64_t base_seed = 1;
  unsigned workers = 1;  ///< 0 = one per hardware thread; never changes the result
};

struct FrameStats {
  long long frames_sent = 0;
  long long frame_errors = 0;
  long long bit_errors = 0;
  long long bits_sent = 0;
  double fer = 0.0;
  double ber = 0.0;
  double ci_low = 0.0;  ///< 95% Wilson interval on fer
  double ci_high = 1.0;
  double elapsed_s = 0.0;
};

/// Two-sided standard normal quantile for `confidence`, e.g. 1.96 for 0.95.
inline double normal_quantile_two_sided(double confidence) {
  detail::require(confidence > 0.0 && confidence < 1.0, "confidence must be in (0, 1)");
  const double target = (1.0 - confidence) / 2.0;  // upper tail mass
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(long long errors, long long trials, double confidence = 0.95) {
  detail::require(trials >= 1 && errors >= 0 && errors <= trials, "wilson_interval: need 0 <= errors <= trials, trials >= 1");
  const double z = normal_quantile_two_sided(confidence);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  double lo = std::max(0.0, centre - half);
  double hi = std::min(1.0, centre + half);
  if (errors == 0) lo = 0.0;
  if (errors == trials) hi = 1.0;
  return {lo, hi};
}

// Per-frame random streams; frame i of a plan always sees the same numbers.
inline std::uint64_t frame_seed(std::uint64_t base_seed, long long frame) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(frame));
}
inline std::uint64_t frame_channel_seed(std::uint64_t base_seed, long long frame) {
  return derive_seed(frame_seed(base_seed, frame), 2);
}

namespace detail {

struct FrameOutcome {
  bool error = false;
  long long bit_errors = 0;
};

inline long long count_bit_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  long long n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  return n;
}

inline FrameOutcome simulate_frame(const SimulationPlan& plan, const phy::McsConfig& mcs, const LinkBudget& budget,
                                   long long index) {
  const auto seed = frame_seed(plan.base_seed, index);
  std::mt19937_64 gen(derive_seed(seed, 1));
  std::vector<std::uint8_t> payload(static_cast<std::size_t>(plan.frame_length_bytes));
  for (auto& byte : payload) byte = static_cast<std::uint8_t>(gen() & 0xffU);

  const ChannelRealization* ch = std::get_if<ChannelRealization>(&plan.channel);
  ChannelRealization drawn;
  if (const auto* syn = std::get_if<SyntheticChannel>(&plan.channel)) {
    drawn = synthesize_channel(syn->layout, syn->model, budget, frame_channel_seed(plan.base_seed, index));
    ch = &drawn;
  }

  const auto tx = phy::transmit_frame(payload, mcs, budget);
  const auto rx = phy::apply_channel_awgn(tx, *ch, budget, derive_seed(seed, 3));
  std::vector<std::uint8_t> decoded;
  try {
    decoded = phy::decode_detected(phy::detect(rx, *ch, budget, plan.detector), mcs, payload.size());
  } catch (const SingularChannelError&) {
    decoded = phy::decode_erased(mcs, payload.size());
  }
  FrameOutcome out;
  out.bit_errors = count_bit_errors(payload, decoded);
  out.error = out.bit_errors != 0;
  return out;
}

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto body = [&] {
    try {
      for (std::size_t i = next++; i < n && !failed; i = next++) fn(i);
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline void finish_stats(FrameStats& s) {
  s.fer = s.frames_sent ? static_cast<double>(s.frame_errors) / static_cast<double>(s.frames_sent) : 0.0;
  s.ber = s.bits_sent ? static_cast<double>(s.bit_errors) / static_cast<double>(s.bits_sent) : 0.0;
  if (s.frames_sent > 0) std::tie(s.ci_low, s.ci_high) = wilson_interval(s.frame_errors, s.frames_sent);
}

}  // namespace detail

inline constexpr std::size_t kFrameBatch = 64;

/// Monte Carlo frame error rate for one MCS.
///
/// Frames are simulated in fixed batches (possibly in parallel) and then
/// tallied strictly in frame order, stopping at the first frame where either
/// max_frames or min_error_frames is reached. The tally is therefore the
/// sequential one whatever the worker count. The FER estimate is
/// frame_errors / frames_sent at the stopping point.
inline FrameStats run_fer(const SimulationPlan& plan) {
  detail::require(plan.max_frames >= 1, "run_fer: max_frames must be >= 1");
  detail::require(plan.min_error_frames >= 1, "run_fer: min_error_frames must be >= 1");
  detail::require(plan.frame_length_bytes >= 1 && plan.frame_length_bytes <= 65535,
                  "run_fer: frame length must be 1-65535 bytes");
  const auto start = std::chrono::steady_clock::now();

  LinkBudget budget = plan.budget;
  const auto mcs = phy::mcs_table(plan.mcs_index, budget.n_data, budget.t_sym_s);
  budget.n_streams = mcs.n_streams;
  budget.validate();
  if (const auto* ch = std::get_if<ChannelRealization>(&plan.channel)) {
    ch->validate();
    detail::require(ch->n_streams == mcs.n_streams, "run_fer: channel has " + std::to_string(ch->n_streams) +
                                                        " stream(s) but MCS " + std::to_string(mcs.index) +
                                                        " needs " + std::to_string(mcs.n_streams));
    detail::require(ch->size() == static_cast<std::size_t>(budget.n_data), "run_fer: channel length != n_data");
  }

  const unsigned workers = detail::resolve_workers(plan.workers);
  FrameStats stats;
  std::vector<detail::FrameOutcome> batch(kFrameBatch);
  bool done = false;
  for (long long first = 0; !done; first += static_cast<long long>(kFrameBatch)) {
    const auto count = static_cast<std::size_t>(std::min<long long>(kFrameBatch, plan.max_frames - first));
    detail::parallel_for(count, workers, [&](std::size_t i) {
      batch[i] = detail::simulate_frame(plan, mcs, budget, first + static_cast<long long>(i));
    });
    for (std::size_t i = 0; i < count; ++i) {
      ++stats.frames_sent;
      stats.bits_sent += 8LL * plan.frame_length_bytes;
      stats.bit_errors += batch[i].bit_errors;
      stats.frame_errors += batch[i].error ? 1 : 0;
      if (stats.frame_errors >= plan.min_error_frames || stats.frames_sent >= plan.max_frames) {
        done = true;
        break;
      }
    }
  }
  detail::finish_stats(stats);
  stats.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

/// Q(x), the standard normal upper tail.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Analytic uncoded BPSK bit error rate at SNR `gamma` (linear).
inline double bpsk_ber_theory(double gamma) { return q_function(std::sqrt(2.0 * gamma)); }

/// Diagnostic mode: uncoded BPSK over a unit SISO channel at per-subcarrier
/// SNR `gamma_db`, pushed through the same channel and detector code as the
/// coded link. One "frame" is one OFDM symbol of n_data bits.
inline FrameStats run_uncoded_bpsk(double gamma_db, long long n_bits, std::uint64_t seed, int n_data = 52) {
  detail::require(n_bits >= 1 && n_data >= 1, "run_uncoded_bpsk: need at least one bit and one subcarrier");
  const auto start = std::chrono::steady_clock::now();
  LinkBudget budget;
  budget.enforce_sar_cap = false;
  budget.n_streams = 1;
  budget.n_data = n_data;
  budget.power_w = n_data;  // unit amplitude per subcarrier
  budget.noise_density_w_per_hz = budget.power_w / (db_to_linear(gamma_db) * budget.bandwidth_hz);
  const auto ch = ChannelRealization::uniform(Matrix2c::identity(), n_data, 1);

  constexpr long long kChunkSymbols = 1024;
  const long long n_symbols = (n_bits + n_data - 1) / n_data;
  FrameStats stats;
  for (long long chunk = 0; chunk * kChunkSymbols < n_symbols; ++chunk) {
    const long long syms = std::min(kChunkSymbols, n_symbols - chunk * kChunkSymbols);
    const auto chunk_seed = derive_seed(seed, static_cast<std::uint64_t>(chunk));
    std::mt19937_64 gen(derive_seed(chunk_seed, 1));
    phy::SymbolGrid grid(static_cast<int>(syms), n_data, 1);
    std::vector<std::uint8_t> bits(grid.values.size());
    for (auto& b : bits) b = static_cast<std::uint8_t>(gen() & 1U);
    const auto mapped = phy::qam_map(bits, phy::Modulation::Bpsk);
    std::copy(mapped.begin(), mapped.end(), grid.values.begin());
    const auto rx = phy::apply_channel_awgn(grid, ch, budget, derive_seed(chunk_seed, 3));
    const auto det = phy::detect(rx, ch, budget, phy::Detector::Zf);
    for (long long s = 0; s < syms; ++s) {
      const long long first_bit = (chunk * kChunkSymbols + s) * n_data;
      const long long used = std::min<long long>(n_data, n_bits - first_bit);
      long long errs = 0;
      for (long long k = 0; k < used; ++k) {
        const auto off = static_cast<std::size_t>(s * n_data + k);
        const std::uint8_t hard = det.symbols.values[off].real() > 0.0 ? 1 : 0;
        errs += hard != bits[off] ? 1 : 0;
      }
      stats.frames_sent += 1;
      stats.frame_errors += errs ? 1 : 0;
      stats.bit_errors += errs;
      stats.bits_sent += used;
    }
  }
  detail::finish_stats(stats);
  stats.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

/// Mean capacity over synthetic realizations with a normal-approximation
/// 95% half-width.
struct CapacityStats {
  double mimo_bps_hz = 0.0;
  double mimo_ci_half = 0.0;
  double siso_bps_hz = 0.0;
  double siso_ci_half = 0.0;
  int realizations = 0;
};

/// Realization r uses the same channel seed as frame r of a FER run with the
/// same base seed, so capacity and FER see the same channels.
inline CapacityStats mean_capacity(const AntennaLayout& layout, const InVivoPathModel& model, LinkBudget budget,
                                   int realizations, std::uint64_t base_seed) {
  detail::require(realizations >= 1, "mean_capacity: need at least one realization");
  auto summarize = [&](int streams, double& mean, double& half) {
    budget.n_streams = streams;
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < realizations; ++r) {
      const auto ch = synthesize_channel(layout, model, budget, frame_channel_seed(base_seed, r));
      const double c = total_capacity(ch, budget).total_bps_hz;
      sum += c;
      sum_sq += c * c;
    }
    const double n = realizations;
    mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    half = 1.959963984540054 * std::sqrt(var / n);
  };
  CapacityStats s;
  s.realizations = realizations;
  summarize(2, s.mimo_bps_hz, s.mimo_ci_half);
  summarize(1, s.siso_bps_hz, s.siso_ci_half);
  return s;
}

struct SweepPoint {
  AntennaLayout layout;
  std::optional<int> mcs_index;  ///< run FER at this point when set
};

struct SweepSettings {
  LinkBudget budget;
  InVivoPathModel model;
  int realizations = 100;
  std::uint64_t base_seed = 1;
  phy::Detector detector = phy::Detector::Mmse;
  int frame_length_bytes = 1000;
  long long max_frames = 100000;
  long long min_error_frames = 100;
  unsigned workers = 1;
};

struct SweepRecord {
  SweepPoint point;
  CapacityStats capacity;
  std::optional<FrameStats> fer;
  std::string error;  ///< non-empty if this point failed; the sweep carries on
};

inline std::vector<SweepRecord> sweep(std::span<const SweepPoint> grid, const SweepSettings& settings) {
  detail::require(!grid.empty(), "sweep: empty parameter grid");
  std::vector<SweepRecord> out;
  out.reserve(grid.size());
  for (const auto& point : grid) {
    SweepRecord rec;
    rec.point = point;
    try {
      rec.capacity = mean_capacity(point.layout, settings.model, settings.budget, settings.realizations,
                                   settings.base_seed);
      if (point.mcs_index) {
        SimulationPlan plan;
        plan.mcs_index = *point.mcs_index;
        plan.budget = settings.budget;
        plan.channel = SyntheticChannel{point.layout, settings.model};
        plan.detector = settings.detector;
        plan.frame_length_bytes = settings.frame_length_bytes;
        plan.max_frames = settings.max_frames;
        plan.min_error_frames = settings.min_error_frames;
        plan.base_seed = settings.base_seed;
        plan.workers = settings.workers;
        rec.fer = run_fer(plan);
      }
    } catch (const Error& e) {
      rec.error = e.what();
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// Distance at which `values` first drops through `threshold`, linearly
/// interpolated between the bracketing points. Points must be sorted by
/// distance.
inline std::optional<double> threshold_crossing(std::span<const double> distances, std::span<const double> values,
                                                double threshold) {
  detail::require(distances.size() == values.size(), "threshold_crossing: size mismatch");
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double a = values[i - 1], b = values[i];
    if (a >= threshold && b < threshold) {
      const double frac = (a - threshold) / (a - b);
      return distances[i - 1] + frac * (distances[i] - distances[i - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace invivo
