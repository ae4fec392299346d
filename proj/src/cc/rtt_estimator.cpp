#include "quicsim/cc/rtt_estimator.hpp"

#include <algorithm>
#include <stdexcept>

namespace quicsim::cc {

void RttEstimator::update(SimTime sample, SimTime ack_delay) {
  if (sample <= SimTime()) throw std::invalid_argument("RTT sample must be positive");
  latest_ = sample;
  if (!has_sample_) {
    min_rtt_ = sample;
  } else {
    min_rtt_ = std::min(min_rtt_, sample);
  }
  const SimTime adjusted = std::max(sample - ack_delay, min_rtt_);
  if (!has_sample_) {
    srtt_ = adjusted;
    rttvar_ = adjusted / 2;
    has_sample_ = true;
    return;
  }
  const SimTime err = srtt_ > adjusted ? srtt_ - adjusted : adjusted - srtt_;
  rttvar_ = SimTime::micros((3 * rttvar_.ticks() + err.ticks()) / 4);
  srtt_ = SimTime::micros((7 * srtt_.ticks() + adjusted.ticks()) / 8);
}

SimTime RttEstimator::rto() const {
  if (!has_sample_) return kInitialRto;
  return std::clamp(srtt_ + rttvar_ * 4, kMinRto, kMaxRto);
}

}  // namespace quicsim::cc
