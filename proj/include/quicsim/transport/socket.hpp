#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quicsim/buffers/socket_rx_buffer.hpp"
#include "quicsim/buffers/socket_tx_buffer.hpp"
#include "quicsim/cc/controller.hpp"
#include "quicsim/errors.hpp"
#include "quicsim/sim/network.hpp"
#include "quicsim/sim/simulator.hpp"
#include "quicsim/transport/connection_state.hpp"
#include "quicsim/transport/stream.hpp"
#include "quicsim/transport/transport_parameters.hpp"
#include "quicsim/wire/ack.hpp"
#include "quicsim/wire/packet.hpp"

namespace quicsim::transport {

class QuicL4;

enum class SocketRole : std::uint8_t { kClient, kServerListener, kServerForked };

/// Misuse of the socket API (connect twice, send on a listener, ...).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr std::size_t kCryptoBlobSize = 64;
inline constexpr std::size_t kMaxAckRanges = 32;

struct SocketConfig {
  TransportParameters params;
  std::size_t socket_snd_buf = 128 * 1024;
  std::size_t socket_rcv_buf = 128 * 1024;
  std::size_t stream_snd_buf = 64 * 1024;
  std::size_t stream_rcv_buf = 64 * 1024;
  std::string cc_algorithm = "newreno";
  std::size_t max_packet_size = wire::kMaxPacketSize;
  /// Longest an ACK for an ack-eliciting packet is held back.
  SimTime max_ack_delay = SimTime::millis(1);
  /// ACK as soon as this many ack-eliciting packets are unacknowledged;
  /// 0 leaves it to the delay timer.
  unsigned ack_threshold = 0;
  std::optional<std::uint64_t> initial_ssthresh;
  std::vector<std::uint32_t> supported_versions{wire::kQuicVersion13, wire::kQuicVersion14};

  void validate() const;
};

struct TraceSample {
  SimTime time;
  std::uint64_t cwnd = 0;
  std::uint64_t ssthresh = 0;
  std::uint64_t bytes_in_flight = 0;
  SimTime srtt;
  SimTime latest_rtt;
  ConnectionState state = ConnectionState::kIdle;
  std::uint64_t packets_lost = 0;
};

struct SocketStats {
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_received = 0;
  std::uint64_t bytes_sent = 0;
  std::uint64_t ack_only_packets = 0;
  std::uint64_t retransmitted_packets = 0;
  std::uint64_t duplicate_packets = 0;
  std::uint64_t app_bytes_accepted = 0;
  std::uint64_t app_bytes_delivered = 0;
  std::uint64_t rtt_samples = 0;
  SimTime rtt_sample_sum;
  std::uint64_t close_frames_sent = 0;
  std::uint64_t packets_sent_while_closing = 0;
};

/// One QUIC endpoint: a client connection, a server listener, or a
/// connection forked by a listener. Owns the socket buffers, the stream
/// layer and the congestion controller, and runs the connection state
/// machine.
class QuicSocket : public std::enable_shared_from_this<QuicSocket> {
 public:
  using Callback = std::function<void(QuicSocket&)>;
  using AcceptCallback = std::function<void(std::shared_ptr<QuicSocket>)>;
  using TraceCallback = std::function<void(const TraceSample&)>;
  /// Sees every packet this socket puts on the wire.
  using PacketObserver = std::function<void(const wire::QuicPacket&, SimTime)>;
  /// Raw RTT sample (ACK arrival minus send time of the largest acked packet).
  using RttCallback = std::function<void(SimTime sample)>;

  QuicSocket(QuicL4& l4, SocketConfig cfg, SocketRole role);
  ~QuicSocket();
  QuicSocket(const QuicSocket&) = delete;
  QuicSocket& operator=(const QuicSocket&) = delete;

  void listen(std::uint16_t port);
  void connect(Address remote);
  /// Queues `data` on stream `stream_hint` (0: stream 1). Returns the bytes
  /// accepted, or nullopt when the stream id exceeds max_streams.
  std::optional<std::size_t> send(std::span<const std::uint8_t> data, std::uint32_t stream_hint = 0);
  bool finish_stream(std::uint32_t stream_id);
  std::optional<SocketRxBuffer::Chunk> recv();
  void close();

  void set_accept_callback(AcceptCallback cb) { on_accept_ = std::move(cb); }
  void set_connected_callback(Callback cb) { on_connected_ = std::move(cb); }
  void set_recv_callback(Callback cb) { on_recv_ = std::move(cb); }
  void set_send_callback(Callback cb) { on_send_ = std::move(cb); }
  void set_closed_callback(Callback cb) { on_closed_ = std::move(cb); }
  void set_trace_callback(TraceCallback cb) { on_trace_ = std::move(cb); }
  void set_packet_observer(PacketObserver cb) { on_packet_sent_ = std::move(cb); }
  void set_rtt_callback(RttCallback cb) { on_rtt_ = std::move(cb); }

  SocketRole role() const { return role_; }
  ConnectionState state() const { return state_; }
  const std::vector<StateTransition>& transitions() const { return transitions_; }
  std::uint64_t connection_id() const { return cid_; }
  std::uint32_t version() const { return version_; }
  Address local_address() const { return local_; }
  Address peer_address() const { return peer_; }
  const SocketConfig& config() const { return cfg_; }
  const std::optional<TransportParameters>& peer_params() const { return peer_params_; }
  const cc::CongestionController& congestion() const { return cc_; }
  const SocketTxBuffer& tx_buffer() const { return sock_tx_; }
  const SocketRxBuffer& rx_buffer() const { return sock_rx_; }
  const StreamMultiplexer& streams() const { return l5_; }
  const SocketStats& stats() const { return stats_; }
  std::uint64_t next_packet_number() const { return next_pn_; }
  std::size_t send_space(std::uint32_t stream_hint = 0) const { return l5_.stream_send_space(stream_hint); }
  TraceSample trace_sample() const;
  bool idle_timer_armed() const { return idle_timer_.armed(); }
  SimTime drain_period() const { return cc_.rto() * 3; }

  /// L4 entry points.
  void on_packet(const wire::QuicPacket& p, const Datagram& d);
  void bind_addresses(Address local, Address peer) {
    local_ = local;
    peer_ = peer;
  }

 private:
  enum class HeaderMode : std::uint8_t { kHandshake, kZeroRtt, kShort };

  // handshake
  void send_initial();
  void on_listener_packet(const wire::QuicPacket& p, const Datagram& d);
  void server_on_initial(const wire::QuicPacket& p, const Datagram& d);
  void server_accept_zero_rtt(const wire::QuicPacket& p, const Datagram& d);
  void forked_send_handshake();
  void client_on_version_negotiation(const wire::QuicPacket& p);
  void client_complete_handshake(const wire::QuicPacket& p);
  void on_handshake_timeout();
  wire::Bytes handshake_payload() const;

  // receive path
  void process_frames(const wire::QuicPacket& p);
  bool record_received(std::uint64_t pn);
  void on_ack_frame(const wire::AckFrame& f);
  void on_eliciting_received(bool out_of_order);

  // send path
  void request_flush();
  void flush();
  std::size_t send_data_packets();
  void send_ack_only();
  void send_close_packet(TransportError code, const std::string& reason);
  std::optional<wire::AckFrame> pending_ack();
  void ack_sent();
  wire::QuicHeader make_header(std::uint64_t pn) const;
  void transmit(const wire::QuicPacket& p);
  void queue_control(wire::Frame f);

  // timers and termination
  void arm_rto();
  void on_rto();
  void touch();
  void on_idle_check();
  void enter_closing(bool send_close, TransportError code, const std::string& reason);
  void on_drain_timeout();
  void teardown();
  void set_state(ConnectionState s);
  void emit_trace();
  std::uint64_t random_connection_id();

  QuicL4& l4_;
  Simulator& sim_;
  SocketConfig cfg_;
  SocketRole role_;
  ConnectionState state_ = ConnectionState::kIdle;
  std::vector<StateTransition> transitions_;
  HeaderMode header_mode_ = HeaderMode::kShort;

  Address local_;
  Address peer_;
  std::uint64_t cid_ = 0;
  std::uint32_t version_ = 0;
  std::optional<TransportParameters> peer_params_;
  std::uint64_t next_pn_ = 0;
  std::uint64_t handshake_stream_offset_ = 0;
  SimTime handshake_sent_at_;
  unsigned handshake_attempts_ = 0;

  SocketTxBuffer sock_tx_;
  SocketRxBuffer sock_rx_;
  StreamMultiplexer l5_;
  cc::CongestionController cc_;
  std::vector<wire::Frame> pending_control_;

  wire::PnRangeSet received_;
  SimTime largest_received_at_;
  unsigned unacked_eliciting_ = 0;
  bool ack_now_ = false;

  Timer flush_timer_;
  Timer ack_timer_;
  Timer rto_timer_;
  Timer handshake_timer_;
  Timer idle_timer_;
  Timer drain_timer_;
  SimTime last_activity_;

  SocketStats stats_;
  std::optional<TraceSample> last_trace_;

  AcceptCallback on_accept_;
  Callback on_connected_;
  Callback on_recv_;
  Callback on_send_;
  Callback on_closed_;
  TraceCallback on_trace_;
  PacketObserver on_packet_sent_;
  RttCallback on_rtt_;
};

}  // namespace quicsim::transport
