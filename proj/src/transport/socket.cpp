#include "quicsim/transport/socket.hpp"

#include <algorithm>

#include "quicsim/errors.hpp"
#include "quicsim/transport/l4.hpp"

namespace quicsim::transport {

namespace {

constexpr unsigned kMaxHandshakeAttempts = 8;

StreamMultiplexer::Config mux_config(const SocketConfig& cfg) {
  StreamMultiplexer::Config m;
  m.limits.send_buffer = cfg.stream_snd_buf;
  m.limits.recv_buffer = cfg.stream_rcv_buf;
  m.max_streams = cfg.params.max_streams;
  m.local_max_data = cfg.params.max_data;
  m.local_max_stream_data = cfg.params.max_stream_data;
  m.peer_max_data = cfg.params.max_data;
  m.peer_max_stream_data = cfg.params.max_stream_data;
  return m;
}

const wire::StreamFrame* handshake_frame(const wire::QuicPacket& p) {
  for (const auto& f : p.frames) {
    const auto* s = std::get_if<wire::StreamFrame>(&f);
    if (s != nullptr && s->stream_id == 0) return s;
  }
  return nullptr;
}

std::optional<TransportParameters> decode_params(const wire::StreamFrame* f) {
  if (f == nullptr || f->offset != 0 || f->data.size() < TransportParameters::kEncodedSize) return std::nullopt;
  try {
    TransportParameters p = TransportParameters::decode(f->data);
    p.validate();
    return p;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

void SocketConfig::validate() const {
  params.validate();
  if (max_packet_size < wire::kMaxShortHeaderSize + wire::kAckFrameOverhead + wire::kStreamFrameOverhead + 1 ||
      max_packet_size > wire::kMaxPacketSize) {
    throw ConfigError("max packet size out of range");
  }
  if (socket_snd_buf < max_packet_size || stream_snd_buf == 0) throw ConfigError("send buffers too small");
  if (params.max_data > socket_rcv_buf) throw ConfigError("max_data exceeds the socket receive buffer");
  if (params.max_stream_data > stream_rcv_buf) throw ConfigError("max_stream_data exceeds the stream receive buffer");
  if (supported_versions.empty()) throw ConfigError("no supported versions");
  cc::make_algorithm(cc_algorithm);
}

QuicSocket::QuicSocket(QuicL4& l4, SocketConfig cfg, SocketRole role)
    : l4_(l4),
      sim_(l4.sim()),
      cfg_((cfg.validate(), std::move(cfg))),
      role_(role),
      sock_tx_(cfg_.socket_snd_buf),
      sock_rx_(cfg_.socket_rcv_buf),
      l5_(mux_config(cfg_)),
      cc_(cc::make_algorithm(cfg_.cc_algorithm), cfg_.max_packet_size),
      flush_timer_(sim_),
      ack_timer_(sim_),
      rto_timer_(sim_),
      handshake_timer_(sim_),
      idle_timer_(sim_),
      drain_timer_(sim_) {
  if (cfg_.initial_ssthresh) cc_.mutable_state().ssthresh = *cfg_.initial_ssthresh;
  version_ = cfg_.params.initial_version;
}

QuicSocket::~QuicSocket() = default;

// ---------------------------------------------------------------------------
// application API

void QuicSocket::listen(std::uint16_t port) {
  if (role_ != SocketRole::kServerListener || state_ != ConnectionState::kIdle) {
    throw UsageError("listen requires an idle listener socket");
  }
  l4_.bind_listener(shared_from_this(), port);
  set_state(ConnectionState::kListening);
}

void QuicSocket::connect(Address remote) {
  if (role_ != SocketRole::kClient || state_ != ConnectionState::kIdle) {
    throw UsageError("connect requires an idle client socket");
  }
  peer_ = remote;
  local_ = l4_.bind_client(shared_from_this(), remote);
  if (l4_.zero_rtt_allowed(remote.node)) {
    cid_ = l4_.previous_connection_id(remote.node).value_or(random_connection_id());
    if (version_ == wire::kQuicVersionNegotiation) version_ = cfg_.supported_versions.front();
    header_mode_ = HeaderMode::kZeroRtt;
    const wire::Bytes hello = handshake_payload();
    handshake_stream_offset_ = hello.size();
    sock_tx_.add(wire::StreamFrame{0, 0, false, hello}, true);
    set_state(ConnectionState::kOpen);
    touch();
    if (auto cb = on_connected_) cb(*this);
    flush();
    return;
  }
  cid_ = random_connection_id();
  set_state(version_ == wire::kQuicVersionNegotiation ? ConnectionState::kConnecting2Rtt
                                                       : ConnectionState::kConnecting1Rtt);
  send_initial();
}

std::optional<std::size_t> QuicSocket::send(std::span<const std::uint8_t> data, std::uint32_t stream_hint) {
  if (role_ == SocketRole::kServerListener) throw UsageError("send on a listening socket");
  if (state_ == ConnectionState::kClosing || state_ == ConnectionState::kClosed) return 0;
  auto accepted = l5_.send(data, stream_hint);
  if (accepted && *accepted > 0) {
    stats_.app_bytes_accepted += *accepted;
    request_flush();
  }
  return accepted;
}

bool QuicSocket::finish_stream(std::uint32_t stream_id) {
  if (state_ == ConnectionState::kClosing || state_ == ConnectionState::kClosed) return false;
  if (!l5_.finish(stream_id)) return false;
  request_flush();
  return true;
}

std::optional<SocketRxBuffer::Chunk> QuicSocket::recv() {
  auto chunk = sock_rx_.pop();
  if (!chunk) return chunk;
  stats_.app_bytes_delivered += chunk->data.size();
  if (state_ == ConnectionState::kOpen) {
    for (auto& f : l5_.on_consumed(chunk->stream_id, chunk->data.size())) queue_control(std::move(f));
  }
  return chunk;
}

void QuicSocket::close() {
  switch (state_) {
    case ConnectionState::kClosing:
    case ConnectionState::kClosed:
      return;
    case ConnectionState::kListening: {
      for (auto& s : l4_.forked_sockets(local_.port)) s->close();
      set_state(ConnectionState::kClosed);
      teardown();
      return;
    }
    case ConnectionState::kOpen:
      enter_closing(true, TransportError::kNoError, "");
      return;
    default:
      set_state(ConnectionState::kClosed);
      teardown();
      return;
  }
}

TraceSample QuicSocket::trace_sample() const {
  const auto& s = cc_.state();
  TraceSample t;
  t.time = sim_.now();
  t.cwnd = s.cwnd;
  t.ssthresh = s.ssthresh;
  t.bytes_in_flight = s.bytes_in_flight;
  t.srtt = s.rtt.smoothed_rtt();
  t.latest_rtt = s.rtt.latest_rtt();
  t.state = state_;
  t.packets_lost = s.packets_lost;
  return t;
}

// ---------------------------------------------------------------------------
// handshake

wire::Bytes QuicSocket::handshake_payload() const {
  wire::Bytes out = cfg_.params.encode();
  for (std::size_t i = 0; i < kCryptoBlobSize; ++i) out.push_back(static_cast<std::uint8_t>(0xA5 ^ i));
  return out;
}

void QuicSocket::send_initial() {
  const std::uint64_t pn = next_pn_++;
  wire::QuicPacket p;
  p.header = wire::QuicHeader::make_long(wire::LongType::kClientInitial, cid_, version_, pn);
  const wire::Bytes hello = handshake_payload();
  handshake_stream_offset_ = hello.size();
  p.frames.emplace_back(wire::StreamFrame{0, 0, false, hello});
  transmit(p);
  sock_tx_.record_non_eliciting(pn, p.serialized_size(), sim_.now());
  handshake_sent_at_ = sim_.now();
  handshake_timer_.arm_in(cc::kInitialRto * (1u << handshake_attempts_), [this] { on_handshake_timeout(); });
}

void QuicSocket::on_handshake_timeout() {
  if (state_ != ConnectionState::kConnecting1Rtt && state_ != ConnectionState::kConnecting2Rtt) return;
  if (++handshake_attempts_ >= kMaxHandshakeAttempts) {
    set_state(ConnectionState::kClosed);
    teardown();
    return;
  }
  send_initial();
}

void QuicSocket::client_on_version_negotiation(const wire::QuicPacket& p) {
  if (state_ != ConnectionState::kConnecting2Rtt && state_ != ConnectionState::kConnecting1Rtt) return;
  const wire::VersionNegotiationFrame* vn = nullptr;
  for (const auto& f : p.frames) {
    if ((vn = std::get_if<wire::VersionNegotiationFrame>(&f)) != nullptr) break;
  }
  if (vn == nullptr) return;
  std::optional<std::uint32_t> chosen;
  for (std::uint32_t v : cfg_.supported_versions) {
    if (std::find(vn->versions.begin(), vn->versions.end(), v) != vn->versions.end()) {
      chosen = v;
      break;
    }
  }
  if (!chosen) {
    set_state(ConnectionState::kClosed);
    teardown();
    return;
  }
  version_ = *chosen;
  if (state_ == ConnectionState::kConnecting2Rtt) set_state(ConnectionState::kConnecting1Rtt);
  handshake_attempts_ = 0;
  send_initial();
}

void QuicSocket::client_complete_handshake(const wire::QuicPacket& p) {
  auto params = decode_params(handshake_frame(p));
  if (!params) return;
  handshake_timer_.cancel();
  cid_ = *p.header.connection_id;
  peer_params_ = params;
  l5_.set_peer_limits(params->max_data, params->max_stream_data);
  cc_.set_rtt_sample(sim_.now() - handshake_sent_at_, SimTime());
  ++stats_.rtt_samples;
  stats_.rtt_sample_sum = stats_.rtt_sample_sum + (sim_.now() - handshake_sent_at_);
  record_received(p.header.packet_number);
  ++unacked_eliciting_;
  ack_now_ = true;
  wire::Bytes finished(kCryptoBlobSize, 0x3C);
  sock_tx_.add(wire::StreamFrame{0, handshake_stream_offset_, false, std::move(finished)}, true);
  header_mode_ = HeaderMode::kHandshake;
  set_state(ConnectionState::kOpen);
  l4_.authenticate(peer_.node, cid_);
  touch();
  if (auto cb = on_connected_) cb(*this);
  flush();
}

void QuicSocket::on_listener_packet(const wire::QuicPacket& p, const Datagram& d) {
  if (state_ != ConnectionState::kListening || !p.header.is_long()) return;
  if (p.header.long_type == wire::LongType::kClientInitial) {
    server_on_initial(p, d);
  } else if (p.header.long_type == wire::LongType::kZeroRttProtected) {
    server_accept_zero_rtt(p, d);
  }
}

void QuicSocket::server_on_initial(const wire::QuicPacket& p, const Datagram& d) {
  const auto& versions = cfg_.supported_versions;
  if (std::find(versions.begin(), versions.end(), p.header.version) == versions.end()) {
    wire::QuicPacket vn;
    vn.header = wire::QuicHeader::make_long(wire::LongType::kVersionNegotiation, p.header.connection_id.value_or(0),
                                            wire::kQuicVersionNegotiation, 0);
    vn.frames.emplace_back(wire::VersionNegotiationFrame{versions});
    const wire::Bytes bytes = wire::serialize_packet(vn);
    l4_.send(Datagram{local_, d.src, bytes});
    return;
  }
  auto client_params = decode_params(handshake_frame(p));
  if (!client_params) return;
  auto child = l4_.fork(*this, d.src);
  child->version_ = p.header.version;
  child->cid_ = child->random_connection_id();
  child->peer_params_ = client_params;
  child->handshake_stream_offset_ = handshake_frame(p)->end();
  child->record_received(p.header.packet_number);
  child->forked_send_handshake();
  if (auto cb = on_accept_) cb(child);
}

void QuicSocket::server_accept_zero_rtt(const wire::QuicPacket& p, const Datagram& d) {
  if (!l4_.is_authenticated(d.src.node) && !l4_.force_0rtt()) return;
  const auto& versions = cfg_.supported_versions;
  if (std::find(versions.begin(), versions.end(), p.header.version) == versions.end()) return;
  auto child = l4_.fork(*this, d.src);
  child->version_ = p.header.version;
  child->cid_ = p.header.connection_id.value_or(0);
  child->peer_params_ = decode_params(handshake_frame(p));
  child->set_state(ConnectionState::kOpen);
  child->touch();
  if (auto cb = on_accept_) cb(child);
  child->on_packet(p, d);
}

void QuicSocket::forked_send_handshake() {
  const std::uint64_t pn = next_pn_++;
  wire::QuicPacket p;
  p.header = wire::QuicHeader::make_long(wire::LongType::kHandshake, cid_, version_, pn);
  if (auto ack = pending_ack()) p.frames.emplace_back(std::move(*ack));
  p.frames.emplace_back(wire::StreamFrame{0, 0, false, handshake_payload()});
  transmit(p);
  sock_tx_.record_non_eliciting(pn, p.serialized_size(), sim_.now());
  ack_sent();
  handshake_sent_at_ = sim_.now();
}

// ---------------------------------------------------------------------------
// receive path

void QuicSocket::on_packet(const wire::QuicPacket& p, const Datagram& d) {
  if (role_ == SocketRole::kServerListener) {
    on_listener_packet(p, d);
    return;
  }
  if (state_ == ConnectionState::kClosed) return;
  ++stats_.packets_received;
  const bool is_long = p.header.is_long();
  const auto type = p.header.long_type;

  if (role_ == SocketRole::kClient) {
    if (is_long && type == wire::LongType::kVersionNegotiation) {
      client_on_version_negotiation(p);
      return;
    }
    if (is_long && type == wire::LongType::kHandshake) {
      if (state_ == ConnectionState::kConnecting1Rtt) client_complete_handshake(p);
      return;
    }
    if (state_ != ConnectionState::kOpen && state_ != ConnectionState::kClosing) return;
    if (header_mode_ != HeaderMode::kShort) header_mode_ = HeaderMode::kShort;
  } else {
    if (is_long && type == wire::LongType::kClientInitial) {
      if (state_ == ConnectionState::kIdle) forked_send_handshake();
      return;
    }
    if (state_ == ConnectionState::kIdle) {
      cc_.set_rtt_sample(sim_.now() - handshake_sent_at_, SimTime());
      ++stats_.rtt_samples;
      stats_.rtt_sample_sum = stats_.rtt_sample_sum + (sim_.now() - handshake_sent_at_);
      set_state(ConnectionState::kOpen);
      l4_.authenticate(peer_.node, cid_);
    }
  }
  touch();
  process_frames(p);
}

bool QuicSocket::record_received(std::uint64_t pn) {
  if (!received_.insert(pn)) return false;
  if (received_.largest() == pn) largest_received_at_ = sim_.now();
  received_.trim(kMaxAckRanges);
  return true;
}

void QuicSocket::process_frames(const wire::QuicPacket& p) {
  const std::uint64_t pn = p.header.packet_number;
  const std::optional<std::uint64_t> prev_largest =
      received_.empty() ? std::nullopt : std::optional<std::uint64_t>(received_.largest());
  if (!record_received(pn)) {
    ++stats_.duplicate_packets;
    // A retransmission crossed our ACK; make sure the peer hears again.
    if (std::any_of(p.frames.begin(), p.frames.end(), wire::is_ack_eliciting)) on_eliciting_received(true);
    flush();
    return;
  }
  const bool out_of_order = prev_largest && pn != *prev_largest + 1;
  bool eliciting = false;
  bool new_data = false;
  bool peer_closed = false;
  try {
    for (const auto& f : p.frames) {
      eliciting = eliciting || wire::is_ack_eliciting(f);
      if (const auto* ack = std::get_if<wire::AckFrame>(&f)) {
        on_ack_frame(*ack);
      } else if (const auto* s = std::get_if<wire::StreamFrame>(&f)) {
        if (s->stream_id == 0) continue;
        const std::size_t before = sock_rx_.size();
        l5_.receive(*s, sock_rx_);
        new_data = new_data || sock_rx_.size() != before || s->fin;
      } else if (const auto* md = std::get_if<wire::MaxDataFrame>(&f)) {
        l5_.on_max_data(md->maximum);
      } else if (const auto* msd = std::get_if<wire::MaxStreamDataFrame>(&f)) {
        l5_.on_max_stream_data(msd->stream_id, msd->maximum);
      } else if (std::holds_alternative<wire::ConnectionCloseFrame>(f)) {
        peer_closed = true;
      }
      if (state_ == ConnectionState::kClosed) return;
    }
  } catch (const ProtocolError& e) {
    enter_closing(true, e.code(), e.what());
    return;
  }
  if (eliciting) on_eliciting_received(out_of_order);
  if (peer_closed) {
    enter_closing(true, TransportError::kNoError, "");
  }
  if (new_data) {
    if (auto cb = on_recv_) cb(*this);
  }
  if (state_ != ConnectionState::kClosed) flush();
}

void QuicSocket::on_eliciting_received(bool out_of_order) {
  ++unacked_eliciting_;
  if (out_of_order || (cfg_.ack_threshold > 0 && unacked_eliciting_ >= cfg_.ack_threshold)) {
    ack_now_ = true;
    return;
  }
  if (!ack_timer_.armed()) {
    ack_timer_.arm_in(cfg_.max_ack_delay, [this] {
      ack_now_ = true;
      flush();
    });
  }
}

void QuicSocket::on_ack_frame(const wire::AckFrame& f) {
  const SimTime now = sim_.now();
  const std::vector<wire::PnRange> ranges = wire::ack_ranges(f);
  const auto& rtt = cc_.state().rtt;
  const auto& rule = cc_.loss_rule();
  const AckOutcome out = sock_tx_.on_ack(ranges, now, [&](const SocketTxItem& item, std::uint64_t largest) {
    return rule.is_lost(*item.packet_number, item.sent_at, largest, now, rtt);
  });

  cc::CongestionController::AckInput in;
  in.now = now;
  in.ack_delay = SimTime::micros(f.ack_delay_us);
  for (const auto& item : out.newly_acked) {
    if (!item.ack_eliciting) continue;
    in.acked_bytes += item.wire_bytes;
    ++in.acked_packets;
    in.largest_newly_acked_pn = std::max(in.largest_newly_acked_pn, *item.packet_number);
  }
  if (out.largest_newly_acked_sent_at) {
    const SimTime sample = now - *out.largest_newly_acked_sent_at;
    if (sample > SimTime()) {
      in.rtt_sample = sample;
      ++stats_.rtt_samples;
      stats_.rtt_sample_sum = stats_.rtt_sample_sum + sample;
      if (on_rtt_) on_rtt_(sample);
    }
  }
  cc_.set_bytes_in_flight(sock_tx_.bytes_in_flight());
  cc_.on_ack(in);

  if (!out.newly_lost.empty()) {
    std::uint64_t bytes = 0;
    std::uint64_t largest = 0;
    for (const auto& item : out.newly_lost) {
      bytes += item.wire_bytes;
      largest = std::max(largest, *item.packet_number);
    }
    stats_.retransmitted_packets += sock_tx_.prepare_retransmissions();
    cc_.on_packets_lost(out.newly_lost.size(), bytes, largest, now);
  }

  if (!out.newly_acked.empty() || !out.newly_lost.empty()) {
    if (sock_tx_.bytes_in_flight() > 0) {
      arm_rto();
    } else {
      rto_timer_.cancel();
    }
  }
  emit_trace();
}

// ---------------------------------------------------------------------------
// send path

void QuicSocket::request_flush() {
  if (flush_timer_.armed()) return;
  flush_timer_.arm_in(SimTime(), [this] { flush(); });
}

void QuicSocket::flush() {
  if (state_ == ConnectionState::kOpen) {
    const std::size_t moved = send_data_packets();
    if (on_send_ && moved > 0) {
      auto cb = on_send_;
      cb(*this);
    }
  }
  if (state_ == ConnectionState::kClosed) return;
  if (ack_now_ && unacked_eliciting_ > 0) send_ack_only();
  emit_trace();
}

std::size_t QuicSocket::send_data_packets() {
  const std::size_t max_frame_data = cfg_.max_packet_size - wire::kMaxShortHeaderSize - wire::kStreamFrameOverhead;
  std::size_t moved = 0;
  while (true) {
    if (!pending_control_.empty()) {
      std::vector<wire::Frame> ctrl;
      ctrl.swap(pending_control_);
      for (auto& f : ctrl) queue_control(std::move(f));
    }
    moved += l5_.pump(sock_tx_, max_frame_data);
    if (!sock_tx_.has_unsent()) break;
    if (!cc_.can_send(cfg_.max_packet_size)) break;
    const std::uint64_t pn = next_pn_;
    const wire::QuicHeader header = make_header(pn);
    std::optional<wire::AckFrame> ack = unacked_eliciting_ > 0 ? pending_ack() : std::nullopt;
    const std::size_t overhead = header.serialized_size() + (ack ? wire::frame_size(*ack) : 0);
    const SocketTxItem* item = sock_tx_.next_packet(cfg_.max_packet_size - overhead, pn, sim_.now(), overhead);
    if (item == nullptr) break;
    wire::QuicPacket p;
    p.header = header;
    if (ack) p.frames.push_back(std::move(*ack));
    p.frames.insert(p.frames.end(), item->frames.begin(), item->frames.end());
    ++next_pn_;
    transmit(p);
    if (ack) ack_sent();
    cc_.on_packet_sent(item->wire_bytes, pn, sim_.now(), true);
    if (!rto_timer_.armed()) arm_rto();
  }
  return moved;
}

void QuicSocket::send_ack_only() {
  auto ack = pending_ack();
  if (!ack) return;
  const std::uint64_t pn = next_pn_++;
  wire::QuicPacket p;
  p.header = make_header(pn);
  p.frames.push_back(std::move(*ack));
  transmit(p);
  sock_tx_.record_non_eliciting(pn, p.serialized_size(), sim_.now());
  cc_.on_packet_sent(p.serialized_size(), pn, sim_.now(), false);
  ++stats_.ack_only_packets;
  ack_sent();
}

void QuicSocket::send_close_packet(TransportError code, const std::string& reason) {
  const std::uint64_t pn = next_pn_++;
  wire::QuicPacket p;
  p.header = make_header(pn);
  if (auto ack = unacked_eliciting_ > 0 ? pending_ack() : std::nullopt) p.frames.push_back(std::move(*ack));
  std::string why = reason.substr(0, 256);
  p.frames.emplace_back(wire::ConnectionCloseFrame{static_cast<std::uint16_t>(code), std::move(why)});
  transmit(p);
  sock_tx_.record_non_eliciting(pn, p.serialized_size(), sim_.now());
  ack_sent();
  ++stats_.close_frames_sent;
}

std::optional<wire::AckFrame> QuicSocket::pending_ack() {
  if (received_.empty()) return std::nullopt;
  const auto ranges = received_.descending();
  return wire::make_ack_frame(ranges, wire::ack_delay_encode(largest_received_at_, sim_.now()), kMaxAckRanges - 1);
}

void QuicSocket::ack_sent() {
  unacked_eliciting_ = 0;
  ack_now_ = false;
  ack_timer_.cancel();
}

wire::QuicHeader QuicSocket::make_header(std::uint64_t pn) const {
  switch (header_mode_) {
    case HeaderMode::kHandshake:
      return wire::QuicHeader::make_long(wire::LongType::kHandshake, cid_, version_, pn);
    case HeaderMode::kZeroRtt:
      return wire::QuicHeader::make_long(wire::LongType::kZeroRttProtected, cid_, version_, pn);
    case HeaderMode::kShort:
      break;
  }
  const bool omit = cfg_.params.omit_connection_id;
  return wire::QuicHeader::make_short(omit ? std::nullopt : std::optional<std::uint64_t>(cid_), pn);
}

void QuicSocket::transmit(const wire::QuicPacket& p) {
  if (state_ == ConnectionState::kClosed) throw std::logic_error("transmission on a closed connection");
  if (state_ == ConnectionState::kClosing) ++stats_.packets_sent_while_closing;
  wire::Bytes bytes = wire::serialize_packet(p);
  ++stats_.packets_sent;
  stats_.bytes_sent += bytes.size();
  if (on_packet_sent_) on_packet_sent_(p, sim_.now());
  l4_.send(Datagram{local_, peer_, std::move(bytes)});
  if (state_ == ConnectionState::kOpen) touch();
}

void QuicSocket::queue_control(wire::Frame f) {
  if (!sock_tx_.add(f, true)) {
    pending_control_.push_back(std::move(f));
    return;
  }
  request_flush();
}

// ---------------------------------------------------------------------------
// timers and termination

void QuicSocket::arm_rto() {
  rto_timer_.arm_in(cc_.rto(), [this] { on_rto(); });
}

void QuicSocket::on_rto() {
  if (state_ != ConnectionState::kOpen) return;
  if (!cc_.on_rto(sim_.now())) return;
  sock_tx_.mark_all_lost();
  stats_.retransmitted_packets += sock_tx_.prepare_retransmissions();
  cc_.set_bytes_in_flight(sock_tx_.bytes_in_flight());
  emit_trace();
  flush();
  if (sock_tx_.bytes_in_flight() > 0 && !rto_timer_.armed()) arm_rto();
}

void QuicSocket::touch() {
  last_activity_ = sim_.now();
  if (!idle_timer_.armed()) {
    idle_timer_.arm(last_activity_ + SimTime::seconds(cfg_.params.idle_timeout_s), [this] { on_idle_check(); });
  }
}

void QuicSocket::on_idle_check() {
  const SimTime deadline = last_activity_ + SimTime::seconds(cfg_.params.idle_timeout_s);
  if (sim_.now() < deadline) {
    idle_timer_.arm(deadline, [this] { on_idle_check(); });
    return;
  }
  if (state_ == ConnectionState::kOpen) enter_closing(false, TransportError::kNoError, "idle timeout");
}

void QuicSocket::enter_closing(bool send_close, TransportError code, const std::string& reason) {
  if (state_ == ConnectionState::kClosing || state_ == ConnectionState::kClosed) return;
  if (state_ != ConnectionState::kOpen) {
    set_state(ConnectionState::kClosed);
    teardown();
    return;
  }
  set_state(ConnectionState::kClosing);
  if (send_close) send_close_packet(code, reason);
  rto_timer_.cancel();
  idle_timer_.cancel();
  handshake_timer_.cancel();
  drain_timer_.arm_in(drain_period(), [this] { on_drain_timeout(); });
  emit_trace();
}

void QuicSocket::on_drain_timeout() {
  if (state_ != ConnectionState::kClosing) return;
  set_state(ConnectionState::kClosed);
  teardown();
}

void QuicSocket::teardown() {
  flush_timer_.cancel();
  ack_timer_.cancel();
  rto_timer_.cancel();
  handshake_timer_.cancel();
  idle_timer_.cancel();
  drain_timer_.cancel();
  emit_trace();
  auto closed = std::move(on_closed_);
  on_accept_ = nullptr;
  on_connected_ = nullptr;
  on_recv_ = nullptr;
  on_send_ = nullptr;
  on_closed_ = nullptr;
  on_trace_ = nullptr;
  on_packet_sent_ = nullptr;
  on_rtt_ = nullptr;
  if (closed) closed(*this);
  l4_.remove_socket(*this);
}

void QuicSocket::set_state(ConnectionState s) {
  if (!is_valid_transition(state_, s)) {
    throw std::logic_error(std::string("invalid transition ") + to_string(state_) + " -> " + to_string(s));
  }
  transitions_.push_back(StateTransition{sim_.now(), state_, s});
  state_ = s;
}

void QuicSocket::emit_trace() {
  if (!on_trace_) return;
  TraceSample t = trace_sample();
  if (last_trace_) {
    const TraceSample& l = *last_trace_;
    if (l.cwnd == t.cwnd && l.ssthresh == t.ssthresh && l.bytes_in_flight == t.bytes_in_flight && l.srtt == t.srtt &&
        l.latest_rtt == t.latest_rtt && l.state == t.state && l.packets_lost == t.packets_lost) {
      return;
    }
  }
  last_trace_ = t;
  on_trace_(t);
}

std::uint64_t QuicSocket::random_connection_id() { return sim_.rng()(); }

}  // namespace quicsim::transport
