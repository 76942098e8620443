// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../test_support.hpp"
#include "invivo/cli.hpp"
#include "invivo/invivo.hpp"

namespace {

using namespace invivo;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

LinkBudget unit_budget(double rho, int streams) {
  LinkBudget b;
  b.enforce_sar_cap = false;
  b.n_streams = streams;
  b.power_w = 1.0;
  b.noise_density_w_per_hz = b.power_w / (rho * streams * b.bandwidth_hz);
  return b;
}

Outcome capacity_oracle() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> log_rho(-3.0, 3.0), log_scale(-2.0, 2.0);
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 100000; ++i) {
    const double rho = std::pow(10.0, log_rho(gen));
    const auto h = testing::random_matrix(gen, std::pow(10.0, log_scale(gen)));
    const auto b = unit_budget(rho, 2);
    worst = std::max(worst, std::abs(subcarrier_capacity(h, b) - logdet_capacity(h, b)));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-9 && t < 5.0, fmt("1e5 channels, max |svd - logdet| = %.3g bits, %.2f s", worst, t)};
}

Outcome svd_suite() {
  std::mt19937_64 gen(202);
  double worst_rec = 0.0, worst_unit = 0.0;
  auto unitarity = [](const Matrix2c& a) { return (a.adjoint() * a - Matrix2c::identity()).frobenius(); };
  for (int i = 0; i < 100000; ++i) {
    Matrix2c h;
    switch (i % 5) {
      case 0:
      case 1: h = testing::random_matrix(gen); break;
      case 2: h = testing::near_rank_one(gen, std::pow(10.0, -1.0 - (i % 13))); break;
      case 3: h = testing::equal_singular_values(gen, 0.0); break;
      default: h = testing::equal_singular_values(gen, std::pow(10.0, -2.0 - (i % 11))); break;
    }
    const auto s = svd2x2(h);
    const auto rec = s.u * Matrix2c::diag(s.sigma[0], s.sigma[1]) * s.v;
    const double norm = h.frobenius();
    worst_rec = std::max(worst_rec, norm > 0 ? testing::frobenius_distance(rec, h) / norm : 0.0);
    worst_unit = std::max({worst_unit, unitarity(s.u), unitarity(s.v)});
  }
  return {worst_rec <= 1e-9 && worst_unit <= 1e-10,
          fmt("1e5 matrices (random, near-rank-1, equal sigma), max rel reconstruction %.3g, max unitarity %.3g",
              worst_rec, worst_unit)};
}

Outcome arithmetic_anchors() {
  const auto b = unit_budget(1.0, 2);
  const double total = total_capacity(ChannelRealization::uniform(Matrix2c::identity(), 52, 2), b).total_bps_hz;
  std::mt19937_64 gen(303);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Complex h = testing::random_complex(gen);
    const double rho = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 2.0)(gen));
    const auto mimo = unit_budget(rho, 2);
    auto siso = mimo;
    siso.n_streams = 1;
    siso.power_w = mimo.power_w / 2;
    const double full = total_capacity(ChannelRealization::uniform(Matrix2c::diag(h, 0.0), 52, 2), mimo).total_bps_hz;
    const double single = siso_capacity(std::vector<Complex>(52, h), siso).total_bps_hz;
    worst = std::max(worst, std::abs(full - single));
  }
  return {std::abs(total - 1.3) <= 1e-12 && worst <= 1e-12,
          fmt("identity at unit eigen-SNR = %.15g bits/s/Hz (want 1.3), diag reduction max diff %.3g", total, worst)};
}

Outcome threshold_arithmetic() {
  cli::RunConfig cfg;
  cfg.channel.source = cli::ChannelSourceKind::Synthetic;
  cfg.cases = {1};
  cfg.realizations = 1;
  cli::finalize(cfg);
  std::ostringstream os;
  cli::cmd_capacity(cfg, os);
  const auto out = os.str();
  const bool a = out.find("# threshold,5 bits/s/Hz = 100 Mbps at 20 MHz\n") != std::string::npos;
  const bool b = out.find("# threshold,1.4 bits/s/Hz = 28 Mbps at 20 MHz\n") != std::string::npos;
  return {a && b && std::abs(rate_mbps(5.0, 20e6) - 100.0) < 1e-12 && std::abs(rate_mbps(1.4, 20e6) - 28.0) < 1e-12,
          fmt("capacity output carries 5 <-> 100 Mbps: %s, 1.4 <-> 28 Mbps: %s", a ? "yes" : "no", b ? "yes" : "no")};
}

Outcome calibrated_sweep() {
  const auto t0 = Clock::now();
  const std::vector<double> distances{70, 100, 130, 200, 300};
  std::vector<SweepPoint> grid;
  for (double d : distances) grid.push_back({front_layout(d), std::nullopt});
  SweepSettings settings;  // default model and budget, 100 realizations
  const auto recs = sweep(grid, settings);
  std::vector<double> mimo;
  bool decreasing = true, separated = true;
  std::string table;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].error.empty()) return {false, "sweep error: " + recs[i].error};
    const auto& c = recs[i].capacity;
    mimo.push_back(c.mimo_bps_hz);
    if (i > 0 && !(c.mimo_bps_hz < mimo[i - 1])) decreasing = false;
    if (!(c.mimo_bps_hz - c.mimo_ci_half > c.siso_bps_hz + c.siso_ci_half)) separated = false;
    table += fmt(" %g:%.2f/%.2f", distances[i], c.mimo_bps_hz, c.siso_bps_hz);
  }
  const auto crossing = threshold_crossing(distances, mimo, 5.0);
  const bool in_band = crossing && *crossing >= 150.0 && *crossing <= 200.0;
  const bool low_far = mimo.back() < 1.4;
  const double t = seconds_since(t0);
  return {decreasing && in_band && low_far && separated && t < 120.0,
          fmt("(a) decreasing %s (b) 5 bits/s/Hz at %.1f mm (c) C(300) = %.2f (d) MIMO>SISO by CI %s; "
              "mm:mimo/siso%s; %.1f s",
              decreasing ? "yes" : "no", crossing ? *crossing : std::nan(""), mimo.back(), separated ? "yes" : "no",
              table.c_str(), t)};
}

Outcome phy_loopback() {
  std::mt19937_64 gen(606);
  const auto t0 = Clock::now();
  int failures = 0, frames = 0;
  for (int m = 0; m < 16; ++m) {
    const auto mcs = phy::mcs_table(m);
    LinkBudget b;
    b.n_streams = mcs.n_streams;
    b.noise_density_w_per_hz = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      ChannelRealization ch;
      ch.n_streams = mcs.n_streams;
      for (int k = 0; k < 52; ++k) {
        Matrix2c h;
        do {
          h = testing::random_matrix(gen);
          if (mcs.n_streams == 1) h = Matrix2c::diag(h(0, 0), 0.0);
        } while (mcs.n_streams == 2 ? svd2x2(h).sigma[1] < 1e-3 * svd2x2(h).sigma[0] : std::abs(h(0, 0)) < 1e-3);
        ch.matrices.push_back(h);
      }
      std::vector<std::uint8_t> payload(1 + gen() % 64);
      for (auto& byte : payload) byte = static_cast<std::uint8_t>(gen());
      const auto rx = phy::apply_channel_awgn(phy::transmit_frame(payload, mcs, b), ch, b, gen());
      const auto kind = trial % 2 ? phy::Detector::Zf : phy::Detector::Mmse;
      failures += phy::receive_frame(rx, ch, b, mcs, kind, payload.size()) != payload;
      ++frames;
    }
  }
  const double t = seconds_since(t0);
  return {failures == 0 && t < 60.0, fmt("%d frames over 16 MCS, %d mismatches, %.1f s", frames, failures, t)};
}

Outcome ber_oracle() {
  bool ok = true;
  std::string parts;
  for (double g : {0.0, 4.0, 7.0, 8.0}) {
    const long long n = 1000000;
    const auto s = run_uncoded_bpsk(g, n, 700 + static_cast<std::uint64_t>(g));
    const double p = bpsk_ber_theory(db_to_linear(g));
    const double sigmas = std::abs(s.ber - p) / std::sqrt(p * (1 - p) / static_cast<double>(n));
    ok = ok && s.bits_sent == n && sigmas <= 3.0;
    parts += fmt(" %g dB: %.4g vs %.4g (%.2f sd);", g, s.ber, p, sigmas);
  }
  return {ok, "1e6 bits/point," + parts};
}

Outcome waterfall() {
  const auto t0 = Clock::now();
  auto plan_at = [](double gamma_db) {
    SimulationPlan p;
    p.mcs_index = 0;
    p.budget.enforce_sar_cap = false;
    p.budget.n_streams = 1;
    p.budget.power_w = p.budget.n_data;
    p.budget.noise_density_w_per_hz = p.budget.power_w / (db_to_linear(gamma_db) * p.budget.bandwidth_hz);
    p.channel = ChannelRealization::uniform(Matrix2c::identity(), p.budget.n_data, 1);
    p.max_frames = 10000;
    p.min_error_frames = 100;
    return p;
  };
  // Coarse scan for the FER = 0.5 point, then interpolate.
  double prev_g = 0.0, prev_f = 0.0;
  std::optional<double> gamma_star;
  for (double g = -3.0; g <= 6.0; g += 0.5) {
    auto p = plan_at(g);
    p.max_frames = 256;
    p.min_error_frames = 256;
    const double f = run_fer(p).fer;
    if (g > -3.0 && prev_f >= 0.5 && f < 0.5) {
      gamma_star = prev_g + (prev_f - 0.5) / (prev_f - f) * (g - prev_g);
      break;
    }
    prev_g = g;
    prev_f = f;
  }
  if (!gamma_star) return {false, "no FER = 0.5 crossing found in -3..6 dB"};
  const auto at = run_fer(plan_at(*gamma_star));
  const auto above = run_fer(plan_at(*gamma_star + 3.0));
  const double t = seconds_since(t0);
  return {above.ci_high * 10.0 <= at.fer && t < 300.0,
          fmt("gamma* = %.2f dB: FER %.3f (%lld frames); +3 dB: FER %.3g, 95%% upper %.3g (%lld frames); %.1f s",
              *gamma_star, at.fer, at.frames_sent, above.fer, above.ci_high, above.frames_sent, t)};
}

Outcome determinism() {
  cli::RunConfig cfg;
  cfg.channel.source = cli::ChannelSourceKind::Synthetic;
  cfg.cases = {1, 8};
  cfg.mcs = {4, 11};
  cfg.max_frames = 128;
  cfg.frame_length_bytes = 100;
  cfg.realizations = 20;
  cfg.sweep_mcs = 9;
  cli::finalize(cfg);
  auto render = [&](unsigned workers, const std::function<void(const cli::RunConfig&, std::ostream&)>& cmd) {
    auto c = cfg;
    c.workers = workers;
    std::ostringstream os;
    cmd(c, os);
    return os.str();
  };
  bool ok = true;
  for (const auto& cmd : {std::function(cli::cmd_fer), std::function(cli::cmd_sweep_distance)}) {
    const auto ref = render(1, cmd);
    ok = ok && render(1, cmd) == ref && render(4, cmd) == ref && render(0, cmd) == ref;
  }
  return {ok, "fer and sweep-distance CSV byte-identical across repeats and 1/4/auto workers"};
}

struct Row {
  int id;
  Point rx_plus, rx_minus, tx_plus, tx_minus, siso_rx, siso_tx;
  const char* label;
};

Outcome placement_table() {
  const Row table[] = {
      {1, {300, 50}, {300, -50}, {0, 14}, {0, -14}, {300, 0}, {0, 0}, "Front of body"},
      {2, {50, 300}, {-50, 300}, {14, 0}, {-14, 0}, {0, 300}, {0, 0}, "Right side of body"},
      {3, {50, -300}, {-50, -300}, {14, 0}, {-14, 0}, {0, -300}, {0, 0}, "Left side of body"},
      {4, {-300, 50}, {-300, -50}, {0, 14}, {0, -14}, {-300, 0}, {0, 0}, "Back of body"},
      {5, {200, 50}, {200, -50}, {0, 14}, {0, -14}, {200, 0}, {0, 0}, "Front of body"},
      {6, {130, 50}, {130, -50}, {0, 14}, {0, -14}, {130, 0}, {0, 0}, "Front of body"},
      {7, {100, 50}, {100, -50}, {0, 14}, {0, -14}, {100, 0}, {0, 0}, "Front of body"},
      {8, {70, 50}, {70, -50}, {0, 14}, {0, -14}, {70, 0}, {0, 0}, "Front of body"},
  };
  int matched = 0;
  for (const auto& r : table) {
    const auto g = geometry_for_case(r.id);
    matched += g.case_id == r.id && g.rx[0] == r.rx_plus && g.rx[1] == r.rx_minus && g.tx[0] == r.tx_plus &&
               g.tx[1] == r.tx_minus && g.siso_rx == r.siso_rx && g.siso_tx == r.siso_tx && g.label == r.label;
  }
  return {matched == 8, fmt("%d/8 rows match field-for-field", matched)};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"capacity oracle equivalence", capacity_oracle},
      {"svd suite", svd_suite},
      {"arithmetic anchors", arithmetic_anchors},
      {"threshold arithmetic", threshold_arithmetic},
      {"calibrated distance sweep", calibrated_sweep},
      {"phy loopback", phy_loopback},
      {"uncoded bpsk ber oracle", ber_oracle},
      {"coded waterfall steepness", waterfall},
      {"determinism", determinism},
      {"placement table fidelity", placement_table},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s AC%d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
