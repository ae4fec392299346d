#pragma once

#include "quicsim/sim/sim_time.hpp"

namespace quicsim::cc {

inline constexpr SimTime kMinRto = SimTime::millis(200);
inline constexpr SimTime kMaxRto = SimTime::seconds(60);
inline constexpr SimTime kInitialRto = SimTime::seconds(1);

/// Smoothed RTT with ack-delay correction. Samples shrink by the peer's
/// reported ack delay, but never below the minimum RTT seen.
class RttEstimator {
 public:
  void update(SimTime sample, SimTime ack_delay);

  bool has_sample() const { return has_sample_; }
  SimTime latest_rtt() const { return latest_; }
  SimTime smoothed_rtt() const { return srtt_; }
  SimTime rttvar() const { return rttvar_; }
  SimTime min_rtt() const { return min_rtt_; }
  /// srtt + 4*rttvar, clamped to [kMinRto, kMaxRto]; kInitialRto before the
  /// first sample.
  SimTime rto() const;

 private:
  bool has_sample_ = false;
  SimTime latest_;
  SimTime srtt_;
  SimTime rttvar_;
  SimTime min_rtt_;
};

}  // namespace quicsim::cc
