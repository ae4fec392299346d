#pragma once

#include <cstdint>

#include "quicsim/cc/rtt_estimator.hpp"
#include "quicsim/sim/sim_time.hpp"

namespace quicsim::cc {

/// Packet- and time-threshold loss declaration for outstanding packets
/// numbered below the largest acknowledged one.
struct LossRule {
  std::uint64_t reorder_threshold = 3;
  std::int64_t time_factor_num = 9;
  std::int64_t time_factor_den = 8;

  /// Age after which an unacknowledged packet counts as lost; zero (disabled)
  /// before any RTT sample.
  SimTime time_threshold(const RttEstimator& rtt) const;

  bool is_lost(std::uint64_t pn, SimTime sent_at, std::uint64_t largest_acked, SimTime now,
               const RttEstimator& rtt) const;
};

}  // namespace quicsim::cc
