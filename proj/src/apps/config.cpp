#include "quicsim/apps/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "quicsim/cc/algorithm.hpp"
#include "quicsim/sim/network.hpp"

namespace quicsim::apps {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  errno = 0;
  const unsigned long long n = std::strtoull(v.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError(key + ": value out of range");
  return n;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d) || d < 0) {
    throw ConfigError(key + ": expected a non-negative number, got '" + v + "'");
  }
  return d;
}

SimTime parse_ms(const std::string& key, const std::string& v) {
  return SimTime::from_seconds(parse_double(key, v) / 1e3);
}

}  // namespace

const char* to_string(AppType t) { return t == AppType::kBulk ? "bulk" : "round_robin"; }

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k{
      "flows",           "bottleneck_rate_bps", "bottleneck_delay_ms", "bottleneck_queue", "access_rate_bps",
      "access_delay_ms", "access_queue",        "cc",                  "start_spacing_ms", "start_times_ms",
      "app",             "bytes_to_send",       "packet_size",         "interval_ms",      "streams",
      "duration_s",      "seed",                "out",                 "trace_interval_ms", "max_ack_delay_ms",
      "ack_threshold",   "initial_ssthresh",    "initial_version"};
  return k;
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "flows") {
    topology.pairs = parse_uint(key, v);
  } else if (key == "bottleneck_rate_bps") {
    topology.bottleneck_rate_bps = parse_uint(key, v);
  } else if (key == "bottleneck_delay_ms") {
    topology.bottleneck_delay = parse_ms(key, v);
  } else if (key == "bottleneck_queue") {
    topology.bottleneck_queue = parse_uint(key, v);
  } else if (key == "access_rate_bps") {
    topology.access_rate_bps = parse_uint(key, v);
  } else if (key == "access_delay_ms") {
    topology.access_delay = parse_ms(key, v);
  } else if (key == "access_queue") {
    topology.access_queue = parse_uint(key, v);
  } else if (key == "cc") {
    cc_algorithm = v;
  } else if (key == "start_spacing_ms") {
    start_spacing = parse_ms(key, v);
  } else if (key == "start_times_ms") {
    start_times.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) start_times.push_back(parse_ms(key, trim(item)));
  } else if (key == "app") {
    if (v == "bulk") {
      app = AppType::kBulk;
    } else if (v == "round_robin") {
      app = AppType::kRoundRobin;
    } else {
      throw ConfigError("app: expected bulk or round_robin, got '" + v + "'");
    }
  } else if (key == "bytes_to_send") {
    bytes_to_send = parse_uint(key, v);
  } else if (key == "packet_size") {
    packet_size = parse_uint(key, v);
  } else if (key == "interval_ms") {
    interval = parse_ms(key, v);
  } else if (key == "streams") {
    streams = static_cast<std::uint32_t>(parse_uint(key, v));
  } else if (key == "duration_s") {
    duration = SimTime::from_seconds(parse_double(key, v));
  } else if (key == "seed") {
    seed = parse_uint(key, v);
  } else if (key == "out") {
    out_dir = v;
  } else if (key == "trace_interval_ms") {
    trace_interval = parse_ms(key, v);
  } else if (key == "max_ack_delay_ms") {
    max_ack_delay = parse_ms(key, v);
  } else if (key == "ack_threshold") {
    ack_threshold = static_cast<unsigned>(parse_uint(key, v));
  } else if (key == "initial_ssthresh") {
    initial_ssthresh = parse_uint(key, v);
  } else if (key == "initial_version") {
    initial_version = static_cast<std::uint32_t>(std::stoul(v, nullptr, 0));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

SimTime ExperimentConfig::flow_start(std::size_t k) const {
  if (k >= 1 && k <= start_times.size()) return start_times[k - 1];
  return start_spacing * static_cast<std::int64_t>(k - 1);
}

void ExperimentConfig::validate() const {
  topology.validate();
  if (topology.pairs == 0) throw ConfigError("flows must be at least 1");
  cc::make_algorithm(cc_algorithm);
  if (!start_times.empty() && start_times.size() != topology.pairs) {
    throw ConfigError("start_times_ms must list one time per flow");
  }
  if (duration <= SimTime()) throw ConfigError("duration must be positive");
  for (std::size_t k = 1; k <= topology.pairs; ++k) {
    if (flow_start(k) >= duration) throw ConfigError("flow " + std::to_string(k) + " starts after the run ends");
  }
  if (packet_size == 0) throw ConfigError("packet_size must be positive");
  if (streams == 0) throw ConfigError("streams must be at least 1");
  if (streams > 8) throw ConfigError("streams exceeds the stream limit (8)");
  if (trace_interval <= SimTime()) throw ConfigError("trace interval must be positive");
  if (max_ack_delay <= SimTime()) throw ConfigError("max ack delay must be positive");
  if (initial_ssthresh && *initial_ssthresh == 0) throw ConfigError("initial_ssthresh must be positive");
  if (out_dir.empty()) throw ConfigError("output directory must not be empty");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

}  // namespace quicsim::apps
