#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>

#include "quicsim/cc/algorithm.hpp"
#include "quicsim/cc/congestion_state.hpp"
#include "quicsim/cc/loss_rule.hpp"

namespace quicsim::cc {

/// Connection-side driver for a CongestionAlgorithm: owns the shared state,
/// feeds RTT samples through the estimator, applies the RTO backoff and
/// picks legacy or QUIC-native dispatch from the algorithm it was given.
class CongestionController {
 public:
  explicit CongestionController(std::unique_ptr<CongestionAlgorithm> algorithm,
                                std::uint64_t mss = kDefaultMss);

  const CongestionState& state() const { return state_; }
  CongestionState& mutable_state() { return state_; }
  const CongestionAlgorithm& algorithm() const { return *algorithm_; }
  const LossRule& loss_rule() const { return loss_rule_; }
  bool legacy_mode() const { return state_.legacy_mode; }

  /// Window gate combined with the flow-control gate (`flow_credit` bytes the
  /// peer still allows).
  bool can_send(std::uint64_t next_size,
                std::uint64_t flow_credit = std::numeric_limits<std::uint64_t>::max()) const;

  void on_packet_sent(std::uint64_t bytes, std::uint64_t pn, SimTime now, bool ack_eliciting);

  struct AckInput {
    std::uint64_t acked_bytes = 0;
    std::uint64_t acked_packets = 0;
    std::uint64_t largest_newly_acked_pn = 0;
    std::optional<SimTime> rtt_sample;
    SimTime ack_delay;
    SimTime now;
  };
  void on_ack(const AckInput& in);
  void on_packets_lost(std::uint64_t count, std::uint64_t bytes, std::uint64_t largest_lost_pn, SimTime now);
  /// Retransmission timeout. Returns false (nothing done) with an empty flight.
  bool on_rto(SimTime now);

  void set_bytes_in_flight(std::uint64_t bytes) { state_.bytes_in_flight = bytes; }
  /// Current timeout including exponential backoff.
  SimTime rto() const;
  void set_rtt_sample(SimTime sample, SimTime ack_delay) { state_.rtt.update(sample, ack_delay); }

 private:
  std::unique_ptr<CongestionAlgorithm> algorithm_;
  CongestionState state_;
  LossRule loss_rule_;
};

}  // namespace quicsim::cc
