#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "quicsim/cc/rtt_estimator.hpp"
#include "quicsim/sim/sim_time.hpp"

namespace quicsim::cc {

inline constexpr std::uint64_t kDefaultMss = 1460;
inline constexpr std::uint64_t kInitialWindowPackets = 10;
inline constexpr std::uint64_t kMinimumWindowPackets = 2;

/// Per-connection congestion variables shared by every algorithm.
struct CongestionState {
  std::uint64_t mss = kDefaultMss;
  std::uint64_t cwnd = kInitialWindowPackets * kDefaultMss;
  std::uint64_t ssthresh = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t bytes_in_flight = 0;
  RttEstimator rtt;
  std::uint64_t largest_acked_pn = 0;
  std::uint64_t largest_sent_pn = 0;
  std::optional<std::uint64_t> recovery_end_pn;
  bool legacy_mode = true;
  unsigned rto_backoff = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t congestion_events = 0;
  std::uint64_t rto_count = 0;

  std::uint64_t minimum_window() const { return kMinimumWindowPackets * mss; }
  bool in_slow_start() const { return cwnd < ssthresh; }
  /// A packet numbered `pn` belongs to the flight that started the current
  /// recovery period.
  bool in_recovery(std::uint64_t pn) const { return recovery_end_pn && pn <= *recovery_end_pn; }
};

}  // namespace quicsim::cc
