// quicsim: run dumb-bell experiments and write traces.
//
//   quicsim run --config exp.cfg [--cc vegas] [--duration 18] [--seed 1] [--out dir]
//   quicsim compare --ccs newreno,vegas,quic [--config exp.cfg] [--out dir]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "quicsim/apps/experiment.hpp"
#include "quicsim/sim/network.hpp"

namespace {

using quicsim::apps::ExperimentConfig;

struct Overrides {
  std::string config;
  std::string cc;
  double duration_s = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  std::vector<std::string> sets;
};

ExperimentConfig build_config(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw quicsim::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.cc.empty()) cfg.cc_algorithm = o.cc;
  if (o.duration_s > 0) cfg.duration = quicsim::SimTime::from_seconds(o.duration_s);
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

void report(const quicsim::apps::ExperimentResult& r, double wall_s) {
  std::printf("cc=%s flows=%zu goodput=%.0f bps utilization=%.3f wall=%.2fs\n", r.config.cc_algorithm.c_str(),
              r.flows.size(), r.total_goodput_bps, r.utilization, wall_s);
  for (const auto& f : r.flows) {
    std::printf("  flow %zu: goodput=%.0f bps mean_rtt=%.1f ms median_rtt=%.1f ms steady_cwnd=%.0f B retx=%llu\n",
                f.flow, f.goodput_bps, f.mean_rtt_s * 1e3, f.median_rtt_s * 1e3, f.steady_cwnd_bytes,
                static_cast<unsigned long long>(f.retransmissions));
  }
}

void run_one(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = quicsim::apps::run_experiment(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  quicsim::apps::write_outputs(result, cfg.out_dir);
  report(result, wall);
  std::printf("  wrote %s\n", cfg.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event QUIC simulator: dumb-bell congestion-control experiments"};
  app.require_subcommand(1);

  Overrides o;
  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--cc", o.cc, "congestion control (newreno, vegas, quic)");
    sub->add_option("--duration", o.duration_s, "simulated seconds");
    sub->add_option("--seed", o.seed, "random seed")->each([&o](const std::string&) { o.seed_set = true; });
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--set", o.sets, "extra key=value config setting (repeatable)");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", o.config, "key=value config file")->check(CLI::ExistingFile);
  add_common(run);

  std::string ccs = "newreno,vegas,quic";
  CLI::App* compare = app.add_subcommand("compare", "run the same experiment under several algorithms");
  compare->add_option("--ccs", ccs, "comma-separated algorithms");
  compare->add_option("--config", o.config, "key=value config file")->check(CLI::ExistingFile);
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      run_one(build_config(o));
    } else {
      std::vector<ExperimentConfig> configs;
      std::stringstream ss(ccs);
      std::string name;
      while (std::getline(ss, name, ',')) {
        Overrides each = o;
        each.cc = name;
        ExperimentConfig cfg = build_config(each);
        cfg.out_dir = (std::filesystem::path(cfg.out_dir) / name).string();
        configs.push_back(std::move(cfg));
      }
      if (configs.empty()) throw quicsim::ConfigError("--ccs lists no algorithms");
      for (const auto& cfg : configs) run_one(cfg);
    }
  } catch (const quicsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
