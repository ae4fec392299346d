#include "quicsim/cc/controller.hpp"

#include <algorithm>

namespace quicsim::cc {

CongestionController::CongestionController(std::unique_ptr<CongestionAlgorithm> algorithm, std::uint64_t mss)
    : algorithm_(std::move(algorithm)) {
  state_.mss = mss;
  state_.cwnd = kInitialWindowPackets * mss;
  state_.legacy_mode = !algorithm_->quic_native();
}

bool CongestionController::can_send(std::uint64_t next_size, std::uint64_t flow_credit) const {
  return flow_credit > 0 && state_.bytes_in_flight + next_size <= state_.cwnd;
}

void CongestionController::on_packet_sent(std::uint64_t bytes, std::uint64_t pn, SimTime now, bool ack_eliciting) {
  state_.largest_sent_pn = std::max(state_.largest_sent_pn, pn);
  if (ack_eliciting) state_.bytes_in_flight += bytes;
  if (!state_.legacy_mode) algorithm_->on_packet_sent(state_, bytes, pn, now);
}

void CongestionController::on_ack(const AckInput& in) {
  if (in.rtt_sample && *in.rtt_sample > SimTime()) state_.rtt.update(*in.rtt_sample, in.ack_delay);
  if (in.acked_packets == 0) return;
  state_.largest_acked_pn = std::max(state_.largest_acked_pn, in.largest_newly_acked_pn);
  state_.rto_backoff = 0;

  AckEvent ev;
  ev.acked_bytes = in.acked_bytes;
  ev.acked_packets = in.acked_packets;
  ev.largest_acked_pn = in.largest_newly_acked_pn;
  ev.now = in.now;
  if (in.rtt_sample) ev.rtt_sample = *in.rtt_sample;
  if (state_.legacy_mode) {
    // Legacy algorithms see the ACK the way a TCP stack would report it.
    algorithm_->on_ack(state_, ev);
  } else {
    ev.ack_delay = in.ack_delay;
    algorithm_->on_ack(state_, ev);
  }
}

void CongestionController::on_packets_lost(std::uint64_t count, std::uint64_t bytes, std::uint64_t largest_lost_pn,
                                           SimTime now) {
  if (count == 0) return;
  state_.packets_lost += count;
  CongestionEvent ev;
  ev.kind = CongestionEventKind::kLoss;
  ev.largest_lost_pn = largest_lost_pn;
  ev.lost_bytes = bytes;
  ev.prior_in_flight = state_.bytes_in_flight + bytes;
  ev.now = now;
  algorithm_->on_congestion_event(state_, ev);
}

bool CongestionController::on_rto(SimTime now) {
  if (state_.bytes_in_flight == 0) return false;
  CongestionEvent ev;
  ev.kind = CongestionEventKind::kRto;
  ev.prior_in_flight = state_.bytes_in_flight;
  ev.largest_lost_pn = state_.largest_sent_pn;
  ev.now = now;
  algorithm_->on_congestion_event(state_, ev);
  ++state_.rto_count;
  ++state_.rto_backoff;
  return true;
}

SimTime CongestionController::rto() const {
  SimTime rto = state_.rtt.rto();
  for (unsigned i = 0; i < state_.rto_backoff && rto < kMaxRto; ++i) rto = rto * 2;
  return std::min(rto, kMaxRto);
}

}  // namespace quicsim::cc
