#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "quicsim/sim/dumbbell.hpp"
#include "quicsim/sim/sim_time.hpp"

namespace quicsim::apps {

enum class AppType : std::uint8_t { kBulk, kRoundRobin };

/// One dumb-bell experiment. Every field has a key in the flat config file;
/// see `keys()`.
struct ExperimentConfig {
  TopologyConfig topology;  // topology.pairs is the flow count
  std::string cc_algorithm = "newreno";
  /// Flow k (1-based) starts at (k-1) * start_spacing unless start_times is set.
  SimTime start_spacing = SimTime::millis(100);
  std::vector<SimTime> start_times;

  AppType app = AppType::kBulk;
  std::uint64_t bytes_to_send = 0;  // per flow; 0 sends until the run ends
  std::size_t packet_size = 1024;   // bytes per application write
  SimTime interval;                 // between writes; zero writes whenever there is room
  std::uint32_t streams = 1;        // round-robin fan-out

  SimTime duration = SimTime::seconds(18);
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  SimTime trace_interval = SimTime::millis(10);

  SimTime max_ack_delay = SimTime::millis(1);
  unsigned ack_threshold = 0;
  std::optional<std::uint64_t> initial_ssthresh;
  std::uint32_t initial_version = 0x0000000D;

  SimTime flow_start(std::size_t k) const;
  void validate() const;

  /// Applies one `key = value` setting. Throws ConfigError on an unknown
  /// key or an unparsable value.
  void set(const std::string& key, const std::string& value);
  /// Reads `key = value` lines; '#' starts a comment.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::string& path);
  static const std::vector<std::string>& keys();
};

const char* to_string(AppType t);

}  // namespace quicsim::apps
