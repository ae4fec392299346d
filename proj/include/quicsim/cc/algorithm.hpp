#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "quicsim/cc/congestion_state.hpp"

namespace quicsim::cc {

struct AckEvent {
  std::uint64_t acked_bytes = 0;
  std::uint64_t acked_packets = 0;
  std::uint64_t largest_acked_pn = 0;  // largest packet newly acknowledged
  SimTime rtt_sample;                  // zero when the ACK produced no sample
  SimTime ack_delay;
  SimTime now;
};

enum class CongestionEventKind { kLoss, kRto };

struct CongestionEvent {
  CongestionEventKind kind = CongestionEventKind::kLoss;
  std::uint64_t largest_lost_pn = 0;
  std::uint64_t lost_bytes = 0;
  std::uint64_t prior_in_flight = 0;  // bytes in flight before the lost packets were removed
  SimTime now;
};

/// Window-control contract. Implementations touch only the state handed to
/// them plus their own members, and read time only from their inputs.
class CongestionAlgorithm {
 public:
  virtual ~CongestionAlgorithm() = default;

  virtual std::string_view name() const = 0;
  /// True for algorithms that consume the extra QUIC hooks; false puts the
  /// socket in legacy mode.
  virtual bool quic_native() const { return false; }

  virtual void on_packet_sent(CongestionState&, std::uint64_t /*bytes*/, std::uint64_t /*pn*/, SimTime /*now*/) {}
  virtual void on_ack(CongestionState& s, const AckEvent& ack) = 0;
  virtual void on_congestion_event(CongestionState& s, const CongestionEvent& ev) = 0;
};

/// Loss-based NewReno: one MSS per acknowledged packet in slow start, one
/// MSS*MSS/cwnd increment per ACK in congestion avoidance, halving once per
/// recovery period.
class NewReno : public CongestionAlgorithm {
 public:
  std::string_view name() const override { return "newreno"; }
  void on_ack(CongestionState& s, const AckEvent& ack) override;
  void on_congestion_event(CongestionState& s, const CongestionEvent& ev) override;

 protected:
  void slow_start(CongestionState& s, std::uint64_t packets) const;
  void congestion_avoidance(CongestionState& s) const;
  std::uint64_t ssthresh_after_loss(const CongestionState& s, std::uint64_t prior_in_flight) const;
};

/// Delay-based Vegas. Once per round trip it compares expected and actual
/// throughput and moves cwnd by one MSS towards keeping between alpha and
/// beta segments queued in the network.
class Vegas : public NewReno {
 public:
  struct Params {
    double alpha = 2;
    double beta = 4;
    double gamma = 1;
  };

  Vegas() = default;
  explicit Vegas(Params p) : params_(p) {}

  std::string_view name() const override { return "vegas"; }
  void on_ack(CongestionState& s, const AckEvent& ack) override;
  void on_congestion_event(CongestionState& s, const CongestionEvent& ev) override;

  /// Estimated segments queued in the network: cwnd/MSS * (rtt - base)/rtt.
  static double queued_segments(std::uint64_t cwnd, std::uint64_t mss, SimTime base_rtt, SimTime rtt);

 private:
  Params params_;
  bool round_open_ = false;
  std::uint64_t round_end_pn_ = 0;
  unsigned samples_in_round_ = 0;
};

/// NewReno variant driven by acknowledged bytes instead of ACK counts, and
/// fed the QUIC-only hooks (packet sent, ack-delay-corrected RTT).
class QuicCongestionControl : public NewReno {
 public:
  std::string_view name() const override { return "quic"; }
  bool quic_native() const override { return true; }
  void on_ack(CongestionState& s, const AckEvent& ack) override;
};

const std::vector<std::string_view>& algorithm_names();
/// Throws ConfigError naming the valid options for an unknown name.
std::unique_ptr<CongestionAlgorithm> make_algorithm(std::string_view name);

}  // namespace quicsim::cc
