// invivo-sim: capacity, FER and distance sweeps for 2x2 MIMO / SISO in-body links.
//
// Exit status: 0 success, 1 configuration error, 2 runtime or data error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "invivo/cli.hpp"

namespace {

struct Flags {
  std::string config;
  std::vector<int> cases;
  std::vector<int> mcs;
  std::optional<std::uint64_t> seed;
  std::optional<long long> frames;
  std::string out;
  std::string detector;
  std::string channel_file;
  std::optional<unsigned> workers;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--case", f.cases, "Placement case(s) 1-8")->delimiter(',');
  cmd->add_option("--seed", f.seed, "Base random seed");
  cmd->add_option("--out", f.out, "Output path (default: stdout)");
  cmd->add_option("--channel-file", f.channel_file, "Channel CSV to use instead of the synthetic model");
  cmd->add_option("--workers", f.workers, "Worker threads for FER (0 = all cores); does not change results");
}

invivo::cli::RunConfig build_config(const Flags& f) {
  using invivo::cli::RunConfig;
  RunConfig cfg = f.config.empty() ? RunConfig{} : invivo::cli::load_config(f.config);
  if (!f.cases.empty()) cfg.cases = f.cases;
  if (!f.mcs.empty()) cfg.mcs = f.mcs;
  if (f.seed) cfg.seed = *f.seed;
  if (f.frames) cfg.max_frames = *f.frames;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.detector.empty()) cfg.detector = invivo::cli::detail::parse_detector(f.detector);
  if (!f.channel_file.empty()) {
    cfg.channel.source = invivo::cli::ChannelSourceKind::File;
    cfg.channel.file = f.channel_file;
  }
  if (f.workers) cfg.workers = *f.workers;
  invivo::cli::finalize(cfg);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

template <class Command>
void emit(const invivo::cli::RunConfig& cfg, Command&& command) {
  if (cfg.out.empty() || cfg.out == "-") {
    command(std::cout);
    return;
  }
  // Render fully before touching the file so a failed run leaves no partial CSV.
  std::ostringstream buffer;
  command(buffer);
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw invivo::Error("cannot write " + cfg.out);
  file << buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link-level capacity and frame-error-rate simulator for in-body 2x2 MIMO / SISO links"};
  app.require_subcommand(1);
  Flags flags;

  auto* capacity = app.add_subcommand("capacity", "Mean MIMO and SISO capacity per placement case");
  add_common(capacity, flags);

  auto* fer = app.add_subcommand("fer", "Monte Carlo frame error rate per MCS");
  add_common(fer, flags);
  fer->add_option("--mcs", flags.mcs, "MCS index(es) 0-15")->delimiter(',');
  fer->add_option("--frames", flags.frames, "Maximum frames per MCS");
  fer->add_option("--detector", flags.detector, "zf or mmse")->check(CLI::IsMember({"zf", "mmse"}));

  auto* sweep = app.add_subcommand("sweep-distance", "Capacity (and optional FER) versus front-of-body distance");
  add_common(sweep, flags);
  sweep->add_option("--frames", flags.frames, "Maximum frames per point when sweep_mcs is set");
  sweep->add_option("--detector", flags.detector, "zf or mmse")->check(CLI::IsMember({"zf", "mmse"}));

  auto* gen = app.add_subcommand("gen-channel", "Write one synthetic channel realization as CSV");
  add_common(gen, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto cfg = build_config(flags);
    if (capacity->parsed()) {
      emit(cfg, [&](std::ostream& os) { invivo::cli::cmd_capacity(cfg, os); });
    } else if (fer->parsed()) {
      emit(cfg, [&](std::ostream& os) { invivo::cli::cmd_fer(cfg, os); });
    } else if (sweep->parsed()) {
      emit(cfg, [&](std::ostream& os) { invivo::cli::cmd_sweep_distance(cfg, os); });
    } else if (gen->parsed()) {
      invivo::cli::cmd_gen_channel(cfg, cfg.out, std::cout);
    }
  } catch (const invivo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
