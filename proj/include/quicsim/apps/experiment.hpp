#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quicsim/apps/config.hpp"
#include "quicsim/transport/socket.hpp"

namespace quicsim::apps {

struct FlowResult {
  std::size_t flow = 0;  // 1-based
  SimTime start;
  std::uint64_t bytes_written = 0;
  std::uint64_t bytes_delivered = 0;
  double goodput_bps = 0;
  double mean_rtt_s = 0;
  double median_rtt_s = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t packets_sent = 0;
  double steady_cwnd_bytes = 0;  // time-weighted over the final third
  bool content_ok = true;
  std::vector<SimTime> rtt_samples;
  std::vector<transport::TraceSample> trace;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<FlowResult> flows;
  double total_goodput_bps = 0;
  double utilization = 0;  // bottleneck busy share over the final two-thirds
  std::uint64_t events = 0;
};

/// Builds the dumb-bell, runs one bulk/round-robin flow per client/server
/// pair until the configured duration and collects per-flow results.
/// Throws ConfigError before simulating if the config is invalid.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Time-weighted mean of cwnd over [from, to], each sample holding until
/// the next one.
double time_weighted_cwnd(const std::vector<transport::TraceSample>& trace, SimTime from, SimTime to);

std::string summary_json(const ExperimentResult& r);

/// cwnd-flow<k>.csv, rtt-flow<k>.csv and summary.json under `dir`
/// (created if missing). Throws std::runtime_error when unwritable.
void write_outputs(const ExperimentResult& r, const std::string& dir);

}  // namespace quicsim::apps
