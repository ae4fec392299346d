#include "quicsim/cc/algorithm.hpp"

#include <algorithm>
#include <string>

#include "quicsim/sim/network.hpp"

namespace quicsim::cc {

void NewReno::slow_start(CongestionState& s, std::uint64_t packets) const { s.cwnd += s.mss * packets; }

void NewReno::congestion_avoidance(CongestionState& s) const {
  s.cwnd += std::max<std::uint64_t>(1, s.mss * s.mss / s.cwnd);
}

std::uint64_t NewReno::ssthresh_after_loss(const CongestionState& s, std::uint64_t prior_in_flight) const {
  return std::max(prior_in_flight / 2, 2 * s.mss);
}

void NewReno::on_ack(CongestionState& s, const AckEvent& ack) {
  if (ack.acked_packets == 0 || s.in_recovery(ack.largest_acked_pn)) return;
  if (s.in_slow_start()) {
    slow_start(s, ack.acked_packets);
  } else {
    congestion_avoidance(s);
  }
}

void NewReno::on_congestion_event(CongestionState& s, const CongestionEvent& ev) {
  if (ev.kind == CongestionEventKind::kRto) {
    s.ssthresh = ssthresh_after_loss(s, ev.prior_in_flight);
    s.cwnd = s.minimum_window();
    s.recovery_end_pn = s.largest_sent_pn;
    return;
  }
  if (s.in_recovery(ev.largest_lost_pn)) return;
  s.ssthresh = ssthresh_after_loss(s, ev.prior_in_flight);
  s.cwnd = std::max(s.ssthresh, s.minimum_window());
  s.recovery_end_pn = s.largest_sent_pn;
  ++s.congestion_events;
}

double Vegas::queued_segments(std::uint64_t cwnd, std::uint64_t mss, SimTime base_rtt, SimTime rtt) {
  if (rtt <= SimTime()) return 0;
  const double segs = static_cast<double>(cwnd) / static_cast<double>(mss);
  return segs * static_cast<double>((rtt - base_rtt).ticks()) / static_cast<double>(rtt.ticks());
}

void Vegas::on_ack(CongestionState& s, const AckEvent& ack) {
  if (ack.acked_packets == 0) return;
  if (ack.rtt_sample > SimTime()) ++samples_in_round_;
  if (!round_open_) {
    round_open_ = true;
    round_end_pn_ = s.largest_sent_pn;
  }
  const bool round_done = ack.largest_acked_pn >= round_end_pn_;
  if (!round_done) {
    if (s.in_slow_start() && !s.in_recovery(ack.largest_acked_pn)) slow_start(s, ack.acked_packets);
    return;
  }

  const unsigned samples = samples_in_round_;
  samples_in_round_ = 0;
  round_end_pn_ = s.largest_sent_pn;
  if (samples <= 2 || !s.rtt.has_sample()) {
    NewReno::on_ack(s, ack);
    return;
  }

  const SimTime base = s.rtt.min_rtt();
  const SimTime rtt = s.rtt.smoothed_rtt();
  const double diff = queued_segments(s.cwnd, s.mss, base, rtt);
  if (s.in_slow_start()) {
    if (diff > params_.gamma) {
      // Leave slow start near the rate the path actually sustains.
      const auto target = static_cast<std::uint64_t>(static_cast<double>(s.cwnd) * base.ticks() / rtt.ticks());
      s.cwnd = std::max(std::min(s.cwnd, target + s.mss), s.minimum_window());
      s.ssthresh = std::max(std::min(s.ssthresh, s.cwnd - s.mss), 2 * s.mss);
    } else {
      slow_start(s, ack.acked_packets);
    }
    return;
  }
  if (diff > params_.beta) {
    s.cwnd = std::max(s.cwnd - s.mss, s.minimum_window());
    s.ssthresh = std::max(std::min(s.ssthresh, s.cwnd - s.mss), 2 * s.mss);
  } else if (diff < params_.alpha) {
    s.cwnd += s.mss;
  }
}

void Vegas::on_congestion_event(CongestionState& s, const CongestionEvent& ev) {
  NewReno::on_congestion_event(s, ev);
  round_open_ = false;
  samples_in_round_ = 0;
}

void QuicCongestionControl::on_ack(CongestionState& s, const AckEvent& ack) {
  if (ack.acked_bytes == 0 || s.in_recovery(ack.largest_acked_pn)) return;
  if (s.in_slow_start()) {
    s.cwnd += ack.acked_bytes;
  } else {
    s.cwnd += std::max<std::uint64_t>(1, s.mss * ack.acked_bytes / s.cwnd);
  }
}

const std::vector<std::string_view>& algorithm_names() {
  static const std::vector<std::string_view> names{"newreno", "vegas", "quic"};
  return names;
}

std::unique_ptr<CongestionAlgorithm> make_algorithm(std::string_view name) {
  if (name == "newreno") return std::make_unique<NewReno>();
  if (name == "vegas") return std::make_unique<Vegas>();
  if (name == "quic") return std::make_unique<QuicCongestionControl>();
  std::string msg = "unknown congestion control '" + std::string(name) + "' (valid:";
  for (auto n : algorithm_names()) msg += " " + std::string(n);
  msg += ")";
  throw ConfigError(msg);
}

}  // namespace quicsim::cc
