#pragma once

// Batch front end: configuration parsing and the CSV-producing subcommands.
// The executable in tools/ only parses flags and maps exceptions to exit codes.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "invivo/capacity.hpp"
#include "invivo/channel_io.hpp"
#include "invivo/channel_model.hpp"
#include "invivo/errors.hpp"
#include "invivo/fer.hpp"
#include "invivo/geometry.hpp"
#include "invivo/link_budget.hpp"
#include "invivo/phy/link.hpp"
#include "invivo/units.hpp"
#include "json.hpp"

namespace invivo::cli {

enum class ChannelSourceKind { None, Synthetic, File };

struct ChannelConfig {
  ChannelSourceKind source = ChannelSourceKind::None;
  std::string file;
  std::string siso_file;
  InVivoPathModel model;
};

struct DiagnosticConfig {
  bool uncoded_bpsk = false;
  std::vector<double> gamma_db{0.0, 4.0, 8.0};
  long long bits = 1000000;
};

struct RunConfig {
  double power_mw = 0.412;
  double noise_dbm_per_hz = -174.0;
  double bandwidth_mhz = 20.0;
  int n_data = 52;
  double t_sym_us = 4.0;
  bool zero_noise = false;

  std::vector<int> cases{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> distances_mm{70, 100, 130, 200, 300};
  std::vector<int> mcs{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
  std::optional<int> sweep_mcs;
  int n_streams = 2;

  std::uint64_t seed = 1;
  long long max_frames = 100000;
  long long min_error_frames = 100;
  int frame_length_bytes = 1000;
  int realizations = 100;
  phy::Detector detector = phy::Detector::Mmse;
  unsigned workers = 1;

  ChannelConfig channel;
  DiagnosticConfig diagnostic;
  std::string out;

  std::vector<std::string> warnings;

  LinkBudget budget() const {
    LinkBudget b;
    b.power_w = power_mw * 1e-3;
    b.noise_density_w_per_hz = zero_noise ? 0.0 : dbm_to_watts(noise_dbm_per_hz);
    b.bandwidth_hz = bandwidth_mhz * 1e6;
    b.t_sym_s = t_sym_us * 1e-6;
    b.n_data = n_data;
    b.n_streams = n_streams;
    b.enforce_sar_cap = power_mw <= 0.412;
    return b;
  }
};

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort source line for a key, for diagnostics.
inline std::string key_location(std::string_view text, std::string_view origin, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string_view::npos) return std::string(origin) + ": ";
  return std::string(origin) + ":" + std::to_string(line_of_offset(text, pos)) + ": ";
}

using Json = nlohmann::json;

template <class T>
T get_as(const Json& j, std::string_view text, std::string_view origin, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(key_location(text, origin, key) + "key '" + key + "' has the wrong type");
  }
}

inline void reject_unknown(const Json& obj, const std::set<std::string>& known, std::string_view text,
                           std::string_view origin, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(std::string(origin) + ": '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items())
    if (!known.contains(key))
      throw ConfigError(key_location(text, origin, key) + "unknown key '" + key + "' in " + where);
}

inline phy::Detector parse_detector(std::string_view s) {
  if (s == "zf") return phy::Detector::Zf;
  if (s == "mmse") return phy::Detector::Mmse;
  throw ConfigError("detector must be 'zf' or 'mmse', got '" + std::string(s) + "'");
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Checks cross-field constraints after file parsing and flag overrides.
/// Records a warning (and lifts the cap) when power exceeds the SAR limit.
inline void finalize(RunConfig& cfg) {
  for (int c : cfg.cases)
    if (c < 1 || c > 8) throw ConfigError("unknown case id " + std::to_string(c) + " (expected 1-8)");
  for (int m : cfg.mcs)
    if (m < 0 || m > 15) throw ConfigError("mcs index " + std::to_string(m) + " out of range 0-15");
  if (cfg.sweep_mcs && (*cfg.sweep_mcs < 0 || *cfg.sweep_mcs > 15))
    throw ConfigError("sweep_mcs out of range 0-15");
  for (double d : cfg.distances_mm)
    if (!(d > 0.0)) throw ConfigError("distances_mm entries must be positive");
  if (cfg.n_streams != 1 && cfg.n_streams != 2) throw ConfigError("n_streams must be 1 or 2");
  if (cfg.max_frames < 1 || cfg.min_error_frames < 1) throw ConfigError("max_frames and min_error_frames must be >= 1");
  if (cfg.frame_length_bytes < 1 || cfg.frame_length_bytes > 65535)
    throw ConfigError("frame_length_bytes must be 1-65535");
  if (cfg.realizations < 1) throw ConfigError("realizations must be >= 1");
  if (cfg.diagnostic.bits < 1) throw ConfigError("diagnostic.bits must be >= 1");
  if (!cfg.channel.file.empty() && cfg.channel.source == ChannelSourceKind::None)
    cfg.channel.source = ChannelSourceKind::File;
  if (cfg.channel.source == ChannelSourceKind::File && cfg.channel.file.empty())
    throw ConfigError("channel source 'file' needs channel.file");
  cfg.warnings.erase(std::remove_if(cfg.warnings.begin(), cfg.warnings.end(),
                                    [](const std::string& w) { return w.rfind("SAR", 0) == 0; }),
                     cfg.warnings.end());
  if (cfg.power_mw > 0.412)
    cfg.warnings.push_back("SAR: power_mw " + detail::format_number(cfg.power_mw) +
                           " exceeds 0.412 mW, the level that keeps local SAR under the 1.6 W/kg limit");
  try {
    cfg.budget().validate();
    cfg.channel.model.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

/// Parses a JSON run configuration. Unknown keys are rejected; `origin`
/// names the source in diagnostics.
inline RunConfig parse_config(std::string_view text, std::string_view origin = "config") {
  using detail::get_as;
  using detail::Json;
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string(origin) + ":" + std::to_string(detail::line_of_offset(text, e.byte)) +
                      ": JSON syntax error: " + e.what());
  }
  static const std::set<std::string> top{"power_mw",     "noise_dbm_per_hz", "bandwidth_mhz", "n_data",
                                         "t_sym_us",     "zero_noise",       "cases",         "distances_mm",
                                         "mcs",          "sweep_mcs",        "n_streams",     "seed",
                                         "max_frames",   "min_error_frames", "frame_length_bytes",
                                         "realizations", "detector",         "workers",       "channel",
                                         "diagnostic",   "out"};
  detail::reject_unknown(root, top, text, origin, "top level");

  RunConfig cfg;
  auto opt = [&](const Json& obj, const char* key, auto& target) {
    if (obj.contains(key)) target = get_as<std::decay_t<decltype(target)>>(obj.at(key), text, origin, key);
  };
  opt(root, "power_mw", cfg.power_mw);
  opt(root, "noise_dbm_per_hz", cfg.noise_dbm_per_hz);
  opt(root, "bandwidth_mhz", cfg.bandwidth_mhz);
  opt(root, "n_data", cfg.n_data);
  opt(root, "t_sym_us", cfg.t_sym_us);
  opt(root, "zero_noise", cfg.zero_noise);
  opt(root, "cases", cfg.cases);
  opt(root, "distances_mm", cfg.distances_mm);
  opt(root, "mcs", cfg.mcs);
  if (root.contains("sweep_mcs")) cfg.sweep_mcs = get_as<int>(root.at("sweep_mcs"), text, origin, "sweep_mcs");
  opt(root, "n_streams", cfg.n_streams);
  opt(root, "seed", cfg.seed);
  opt(root, "max_frames", cfg.max_frames);
  opt(root, "min_error_frames", cfg.min_error_frames);
  opt(root, "frame_length_bytes", cfg.frame_length_bytes);
  opt(root, "realizations", cfg.realizations);
  opt(root, "workers", cfg.workers);
  opt(root, "out", cfg.out);
  if (root.contains("detector")) {
    try {
      cfg.detector = detail::parse_detector(get_as<std::string>(root.at("detector"), text, origin, "detector"));
    } catch (const ConfigError& e) {
      throw ConfigError(detail::key_location(text, origin, "detector") + e.what());
    }
  }

  if (root.contains("channel")) {
    const Json& ch = root.at("channel");
    detail::reject_unknown(ch, {"source", "file", "siso_file", "model"}, text, origin, "channel");
    if (ch.contains("source")) {
      const auto s = get_as<std::string>(ch.at("source"), text, origin, "source");
      if (s == "synthetic")
        cfg.channel.source = ChannelSourceKind::Synthetic;
      else if (s == "file")
        cfg.channel.source = ChannelSourceKind::File;
      else
        throw ConfigError(detail::key_location(text, origin, "source") + "channel.source must be 'synthetic' or 'file'");
    }
    opt(ch, "file", cfg.channel.file);
    opt(ch, "siso_file", cfg.channel.siso_file);
    if (ch.contains("model")) {
      const Json& m = ch.at("model");
      detail::reject_unknown(m,
                             {"ref_loss_db", "ref_distance_mm", "exponent", "wavelength_scale", "rician_k_db",
                              "n_taps", "rms_delay_ns", "carrier_ghz", "correlation"},
                             text, origin, "channel.model");
      auto& model = cfg.channel.model;
      opt(m, "ref_loss_db", model.ref_loss_db);
      opt(m, "ref_distance_mm", model.ref_distance_mm);
      opt(m, "exponent", model.exponent);
      opt(m, "wavelength_scale", model.wavelength_scale);
      opt(m, "rician_k_db", model.rician_k_db);
      opt(m, "n_taps", model.n_taps);
      opt(m, "rms_delay_ns", model.rms_delay_ns);
      opt(m, "correlation", model.correlation);
      if (m.contains("carrier_ghz")) model.carrier_hz = get_as<double>(m.at("carrier_ghz"), text, origin, "carrier_ghz") * 1e9;
      if (cfg.channel.source == ChannelSourceKind::None) cfg.channel.source = ChannelSourceKind::Synthetic;
    }
  }

  if (root.contains("diagnostic")) {
    const Json& d = root.at("diagnostic");
    detail::reject_unknown(d, {"mode", "gamma_db", "bits"}, text, origin, "diagnostic");
    if (d.contains("mode")) {
      const auto mode = get_as<std::string>(d.at("mode"), text, origin, "mode");
      if (mode != "uncoded_bpsk")
        throw ConfigError(detail::key_location(text, origin, "mode") + "diagnostic.mode must be 'uncoded_bpsk'");
      cfg.diagnostic.uncoded_bpsk = true;
    }
    opt(d, "gamma_db", cfg.diagnostic.gamma_db);
    opt(d, "bits", cfg.diagnostic.bits);
  }
  finalize(cfg);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

/// Canonical form of every setting that can change results. Worker count
/// and output path are excluded.
inline nlohmann::json canonical_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["power_mw"] = cfg.power_mw;
  j["noise_dbm_per_hz"] = cfg.noise_dbm_per_hz;
  j["bandwidth_mhz"] = cfg.bandwidth_mhz;
  j["n_data"] = cfg.n_data;
  j["t_sym_us"] = cfg.t_sym_us;
  j["zero_noise"] = cfg.zero_noise;
  j["cases"] = cfg.cases;
  j["distances_mm"] = cfg.distances_mm;
  j["mcs"] = cfg.mcs;
  j["sweep_mcs"] = cfg.sweep_mcs ? nlohmann::json(*cfg.sweep_mcs) : nlohmann::json();
  j["n_streams"] = cfg.n_streams;
  j["seed"] = cfg.seed;
  j["max_frames"] = cfg.max_frames;
  j["min_error_frames"] = cfg.min_error_frames;
  j["frame_length_bytes"] = cfg.frame_length_bytes;
  j["realizations"] = cfg.realizations;
  j["detector"] = phy::to_string(cfg.detector);
  const auto& m = cfg.channel.model;
  j["channel"] = {{"source", static_cast<int>(cfg.channel.source)},
                  {"file", cfg.channel.file},
                  {"siso_file", cfg.channel.siso_file},
                  {"model",
                   {{"ref_loss_db", m.ref_loss_db},
                    {"ref_distance_mm", m.ref_distance_mm},
                    {"exponent", m.exponent},
                    {"wavelength_scale", m.wavelength_scale},
                    {"rician_k_db", m.rician_k_db},
                    {"n_taps", m.n_taps},
                    {"rms_delay_ns", m.rms_delay_ns},
                    {"carrier_hz", m.carrier_hz},
                    {"correlation", m.correlation}}}};
  j["diagnostic"] = {{"uncoded_bpsk", cfg.diagnostic.uncoded_bpsk},
                     {"gamma_db", cfg.diagnostic.gamma_db},
                     {"bits", cfg.diagnostic.bits}};
  return j;
}

inline std::string config_hash(const RunConfig& cfg) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(detail::fnv1a(canonical_json(cfg).dump())));
  return buf;
}

namespace detail {

inline void write_preamble(std::ostream& out, std::string_view command, const RunConfig& cfg) {
  out << "# invivo-sim " << command << '\n';
  out << "# seed," << cfg.seed << '\n';
  out << "# config_hash," << config_hash(cfg) << '\n';
}

inline void require_source(const RunConfig& cfg) {
  if (cfg.channel.source == ChannelSourceKind::None)
    throw ConfigError("no channel source: set channel.source / channel.model in the config or pass --channel-file");
}

}  // namespace detail

inline constexpr double kTargetRateMbps = 100.0;
inline constexpr double kLowCapacityBpsHz = 1.4;

/// Rows: case,label,distance_mm,mimo_bps_hz,siso_bps_hz,mimo_mbps,siso_mbps.
/// Synthetic sources give one row per configured case (mean over
/// `realizations` draws); a channel file gives a single row.
inline void cmd_capacity(const RunConfig& cfg, std::ostream& out) {
  detail::require_source(cfg);
  using detail::format_number;
  LinkBudget budget = cfg.budget();
  const double bw = budget.bandwidth_hz;

  detail::write_preamble(out, "capacity", cfg);
  out << "case,label,distance_mm,mimo_bps_hz,siso_bps_hz,mimo_mbps,siso_mbps\n";
  auto row = [&](const std::string& id, const std::string& label, double dist, double mimo, double siso) {
    out << id << ',' << label << ',' << format_number(dist) << ',' << format_number(mimo) << ','
        << format_number(siso) << ',' << format_number(rate_mbps(mimo, bw)) << ','
        << format_number(rate_mbps(siso, bw)) << '\n';
  };

  if (cfg.channel.source == ChannelSourceKind::File) {
    const auto ch = load_channel_file(cfg.channel.file, cfg.n_data);
    double mimo = std::nan(""), siso = std::nan("");
    budget.n_streams = ch.n_streams;
    (ch.n_streams == 2 ? mimo : siso) = total_capacity(ch, budget).total_bps_hz;
    if (!cfg.channel.siso_file.empty()) {
      const auto sch = load_channel_file(cfg.channel.siso_file, cfg.n_data, 1);
      budget.n_streams = 1;
      siso = total_capacity(sch, budget).total_bps_hz;
    }
    row("0", "channel file", std::nan(""), mimo, siso);
  } else {
    for (int c : cfg.cases) {
      const auto layout = geometry_for_case(c);
      const auto stats = mean_capacity(layout, cfg.channel.model, budget, cfg.realizations, cfg.seed);
      row(std::to_string(c), layout.label, pairwise_distances(layout).siso_mm, stats.mimo_bps_hz, stats.siso_bps_hz);
    }
  }
  out << "# threshold," << format_number(required_bps_hz(kTargetRateMbps, bw)) << " bits/s/Hz = "
      << format_number(kTargetRateMbps) << " Mbps at " << format_number(bw / 1e6) << " MHz\n";
  out << "# threshold," << format_number(kLowCapacityBpsHz) << " bits/s/Hz = "
      << format_number(rate_mbps(kLowCapacityBpsHz, bw)) << " Mbps at " << format_number(bw / 1e6) << " MHz\n";
}

/// Rows: case,label,mcs,gamma_db,frames,frame_errors,fer,ci_low,ci_high,ber.
/// In uncoded-BPSK diagnostic mode there is one row per SNR point, mcs is
/// "uncoded" and a frame is one OFDM symbol.
inline void cmd_fer(const RunConfig& cfg, std::ostream& out) {
  using detail::format_number;
  detail::write_preamble(out, "fer", cfg);
  out << "case,label,mcs,gamma_db,frames,frame_errors,fer,ci_low,ci_high,ber\n";
  auto row = [&](const std::string& id, const std::string& label, const std::string& mcs, double gamma,
                 const FrameStats& s) {
    out << id << ',' << label << ',' << mcs << ',' << format_number(gamma) << ',' << s.frames_sent << ','
        << s.frame_errors << ',' << format_number(s.fer) << ',' << format_number(s.ci_low) << ','
        << format_number(s.ci_high) << ',' << format_number(s.ber) << '\n';
  };

  if (cfg.diagnostic.uncoded_bpsk) {
    for (std::size_t i = 0; i < cfg.diagnostic.gamma_db.size(); ++i) {
      const double g = cfg.diagnostic.gamma_db[i];
      const auto s = run_uncoded_bpsk(g, cfg.diagnostic.bits, derive_seed(cfg.seed, i), cfg.n_data);
      row("0", "uncoded BPSK AWGN", "uncoded", g, s);
    }
    for (double g : cfg.diagnostic.gamma_db)
      out << "# ber_theory," << format_number(g) << ',' << format_number(bpsk_ber_theory(db_to_linear(g))) << '\n';
    return;
  }

  detail::require_source(cfg);
  SimulationPlan plan;
  plan.budget = cfg.budget();
  plan.detector = cfg.detector;
  plan.frame_length_bytes = cfg.frame_length_bytes;
  plan.max_frames = cfg.max_frames;
  plan.min_error_frames = cfg.min_error_frames;
  plan.base_seed = cfg.seed;
  plan.workers = cfg.workers;

  if (cfg.channel.source == ChannelSourceKind::File) {
    const auto ch = load_channel_file(cfg.channel.file, cfg.n_data);
    plan.channel = ch;
    for (int m : cfg.mcs) {
      const auto mcs = phy::mcs_table(m, cfg.n_data, plan.budget.t_sym_s);
      if (mcs.n_streams != ch.n_streams) {
        out << "# skipped mcs " << m << ": needs " << mcs.n_streams << " stream(s)\n";
        continue;
      }
      plan.mcs_index = m;
      row("0", "channel file", std::to_string(m), std::nan(""), run_fer(plan));
    }
    return;
  }
  for (int c : cfg.cases) {
    const auto layout = geometry_for_case(c);
    plan.channel = SyntheticChannel{layout, cfg.channel.model};
    for (int m : cfg.mcs) {
      plan.mcs_index = m;
      row(std::to_string(c), layout.label, std::to_string(m), std::nan(""), run_fer(plan));
    }
  }
}

/// Rows: distance_mm,mimo_bps_hz,siso_bps_hz,mimo_ci95,siso_ci95,fer, in
/// ascending distance over the front-of-body layout. fer is "nan" unless
/// sweep_mcs is set. Trailing comments give the 5 bits/s/Hz crossing.
inline void cmd_sweep_distance(const RunConfig& cfg, std::ostream& out) {
  using detail::format_number;
  detail::require_source(cfg);
  if (cfg.channel.source != ChannelSourceKind::Synthetic)
    throw ConfigError("sweep-distance needs a synthetic channel model");
  if (cfg.distances_mm.empty()) throw ConfigError("distances_mm is empty");

  std::vector<double> distances = cfg.distances_mm;
  std::sort(distances.begin(), distances.end());
  std::vector<SweepPoint> grid;
  for (double d : distances) grid.push_back({front_layout(d), cfg.sweep_mcs});

  SweepSettings settings;
  settings.budget = cfg.budget();
  settings.model = cfg.channel.model;
  settings.realizations = cfg.realizations;
  settings.base_seed = cfg.seed;
  settings.detector = cfg.detector;
  settings.frame_length_bytes = cfg.frame_length_bytes;
  settings.max_frames = cfg.max_frames;
  settings.min_error_frames = cfg.min_error_frames;
  settings.workers = cfg.workers;
  const auto records = sweep(grid, settings);

  detail::write_preamble(out, "sweep-distance", cfg);
  out << "distance_mm,mimo_bps_hz,siso_bps_hz,mimo_ci95,siso_ci95,fer\n";
  std::vector<double> mimo;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.error.empty()) throw Error("sweep-distance at " + format_number(distances[i]) + " mm: " + r.error);
    mimo.push_back(r.capacity.mimo_bps_hz);
    out << format_number(distances[i]) << ',' << format_number(r.capacity.mimo_bps_hz) << ','
        << format_number(r.capacity.siso_bps_hz) << ',' << format_number(r.capacity.mimo_ci_half) << ','
        << format_number(r.capacity.siso_ci_half) << ',' << format_number(r.fer ? r.fer->fer : std::nan(""))
        << '\n';
  }
  const double target = required_bps_hz(kTargetRateMbps, settings.budget.bandwidth_hz);
  if (const auto crossing = threshold_crossing(distances, mimo, target))
    out << "# crossing," << format_number(target) << " bits/s/Hz," << format_number(*crossing) << " mm\n";
}

/// Synthesizes one realization for the first configured case and writes it
/// in the channel CSV schema. The summary lists the realized and modelled
/// mean power gain of every Tx/Rx pair.
inline void cmd_gen_channel(const RunConfig& cfg, const std::filesystem::path& out_path, std::ostream& summary) {
  using detail::format_number;
  if (cfg.cases.empty()) throw ConfigError("no case selected");
  if (out_path.empty()) throw ConfigError("gen-channel needs an output path (--out)");
  const auto layout = geometry_for_case(cfg.cases.front());
  const auto budget = cfg.budget();
  const auto& model = cfg.channel.model;
  const auto ch = synthesize_channel(layout, model, budget, cfg.seed);

  std::ostringstream comment;
  comment << "invivo-sim gen-channel case=" << layout.case_id << " (" << layout.label << ") seed=" << cfg.seed
          << " streams=" << budget.n_streams << "\nconfig_hash=" << config_hash(cfg);
  save_channel_file(ch, out_path, comment.str());

  const auto dist = pairwise_distances(layout);
  summary << "pair,distance_mm,mean_gain_db,model_gain_db\n";
  const int n = budget.n_streams;
  for (int r = 0; r < n; ++r)
    for (int t = 0; t < n; ++t) {
      double p = 0.0;
      for (const auto& h : ch.matrices) p += std::norm(h(r, t));
      p /= static_cast<double>(ch.size());
      const double d = n == 1 ? dist.siso_mm : dist.mimo_mm[static_cast<std::size_t>(r)][static_cast<std::size_t>(t)];
      summary << "rx" << r + 1 << "-tx" << t + 1 << ',' << format_number(d) << ',' << format_number(linear_to_db(p))
              << ',' << format_number(model.mean_gain_db(d)) << '\n';
    }
}

}  // namespace invivo::cli
