#include "quicsim/cc/loss_rule.hpp"

#include <algorithm>

namespace quicsim::cc {

SimTime LossRule::time_threshold(const RttEstimator& rtt) const {
  if (!rtt.has_sample()) return SimTime();
  const SimTime base = std::max(rtt.smoothed_rtt(), rtt.latest_rtt());
  return SimTime::micros(base.ticks() * time_factor_num / time_factor_den);
}

bool LossRule::is_lost(std::uint64_t pn, SimTime sent_at, std::uint64_t largest_acked, SimTime now,
                       const RttEstimator& rtt) const {
  if (pn >= largest_acked) return false;
  if (largest_acked >= reorder_threshold && pn <= largest_acked - reorder_threshold) return true;
  const SimTime threshold = time_threshold(rtt);
  return rtt.has_sample() && sent_at <= now - threshold;
}

}  // namespace quicsim::cc
