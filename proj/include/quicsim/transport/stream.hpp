#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "quicsim/buffers/socket_rx_buffer.hpp"
#include "quicsim/buffers/socket_tx_buffer.hpp"
#include "quicsim/buffers/stream_rx_buffer.hpp"
#include "quicsim/buffers/stream_tx_buffer.hpp"
#include "quicsim/wire/frame.hpp"

namespace quicsim::transport {

struct StreamLimits {
  std::size_t send_buffer = 64 * 1024;
  std::size_t recv_buffer = 64 * 1024;
};

/// One bidirectional stream: buffers plus stream-level flow control.
class Stream {
 public:
  Stream(std::uint32_t id, StreamLimits limits, std::uint64_t peer_credit, std::uint64_t local_credit);

  std::uint32_t id() const { return id_; }
  StreamTxBuffer& tx() { return tx_; }
  const StreamTxBuffer& tx() const { return tx_; }
  StreamRxBuffer& rx() { return rx_; }
  const StreamRxBuffer& rx() const { return rx_; }

  /// Highest offset the peer lets us send up to.
  std::uint64_t send_credit() const { return send_credit_; }
  void raise_send_credit(std::uint64_t limit) { send_credit_ = std::max(send_credit_, limit); }
  /// End of the highest byte range handed to the socket.
  std::uint64_t highest_issued() const { return highest_issued_; }
  void note_issued(std::uint64_t end) { highest_issued_ = std::max(highest_issued_, end); }

  /// Limit advertised to the peer.
  std::uint64_t recv_limit() const { return recv_limit_; }
  std::uint64_t consumed() const { return consumed_; }
  /// Records `n` bytes read by the application. Returns the new limit to
  /// advertise once the remaining window has fallen to half the buffer.
  std::optional<std::uint64_t> on_consumed(std::uint64_t n);

  bool fin_delivered() const { return fin_delivered_; }
  void set_fin_delivered() { fin_delivered_ = true; }

 private:
  std::uint32_t id_;
  StreamTxBuffer tx_;
  StreamRxBuffer rx_;
  std::uint64_t send_credit_;
  std::uint64_t highest_issued_ = 0;
  std::uint64_t recv_window_;
  std::uint64_t recv_limit_;
  std::uint64_t consumed_ = 0;
  bool fin_delivered_ = false;
};

/// Connection-level stream layer: creates streams on demand, routes
/// application data by stream id, moves stream data into the socket send
/// buffer within stream and connection credit, and reassembles incoming
/// stream frames into the socket receive buffer.
class StreamMultiplexer {
 public:
  struct Config {
    StreamLimits limits;
    std::uint32_t max_streams = 8;
    std::uint64_t local_max_data = 128 * 1024;
    std::uint64_t local_max_stream_data = 64 * 1024;
    std::uint64_t peer_max_data = 128 * 1024;
    std::uint64_t peer_max_stream_data = 64 * 1024;
  };

  explicit StreamMultiplexer(Config cfg);

  /// Routes `data` to stream `hint` (0 selects stream 1). Returns the bytes
  /// accepted, or nullopt when the stream id is beyond max_streams.
  std::optional<std::size_t> send(std::span<const std::uint8_t> data, std::uint32_t hint);
  /// Marks the end of stream `id` after the data sent so far.
  bool finish(std::uint32_t id);

  /// Moves stream data into `socket` round-robin across streams, in frames
  /// of at most `max_frame_data` bytes. Returns the bytes moved.
  std::size_t pump(SocketTxBuffer& socket, std::size_t max_frame_data);
  bool has_pending() const;
  /// True when data is waiting but every pending stream is out of credit.
  bool flow_blocked() const;

  /// Stores an incoming stream frame and pushes newly contiguous bytes to
  /// `out`. Throws ProtocolError on stream-limit or flow-control violation.
  void receive(const wire::StreamFrame& f, SocketRxBuffer& out);
  /// Application read `n` bytes from stream `id`; returns credit updates to
  /// send back.
  std::vector<wire::Frame> on_consumed(std::uint32_t id, std::uint64_t n);

  void on_max_data(std::uint64_t limit) { peer_max_data_ = std::max(peer_max_data_, limit); }
  void on_max_stream_data(std::uint32_t id, std::uint64_t limit);

  Stream* find(std::uint32_t id);
  const Stream* find(std::uint32_t id) const;
  std::size_t stream_count() const { return streams_.size(); }
  std::uint64_t peer_max_data() const { return peer_max_data_; }
  std::uint64_t connection_bytes_sent() const { return conn_sent_; }
  std::uint64_t connection_bytes_received() const { return conn_received_; }
  std::uint64_t local_max_data() const { return local_max_data_; }
  std::size_t stream_send_space(std::uint32_t hint) const;
  std::uint32_t max_streams() const { return cfg_.max_streams; }

  void set_peer_limits(std::uint64_t max_data, std::uint64_t max_stream_data);

 private:
  Stream& get_or_create(std::uint32_t id);

  Config cfg_;
  std::map<std::uint32_t, std::unique_ptr<Stream>> streams_;
  std::uint64_t peer_max_data_;
  std::uint64_t conn_sent_ = 0;
  std::uint64_t local_max_data_;
  std::uint64_t conn_received_ = 0;
  std::uint64_t conn_consumed_ = 0;
  std::uint32_t rr_next_ = 1;
};

}  // namespace quicsim::transport
