#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "quicsim/sim/simulator.hpp"
#include "quicsim/transport/socket.hpp"

namespace quicsim::apps {

/// Payload byte at `offset` of `stream`. Senders fill streams with this
/// pattern so receivers can check content without keeping a copy.
std::uint8_t pattern_byte(std::uint32_t stream, std::uint64_t offset);

/// Stream hint for the i-th (0-based) application packet over n streams.
inline std::uint32_t round_robin_stream(std::uint64_t i, std::uint32_t n) {
  return static_cast<std::uint32_t>(i % n) + 1;
}

/// Client that writes fixed-size application packets as fast as the socket
/// accepts them (or one per interval), spreading them round-robin over
/// `streams` streams. With a byte budget it finishes every used stream once
/// the budget is written.
class BulkSender {
 public:
  struct Config {
    std::uint64_t bytes_to_send = 0;  // 0: unlimited
    std::size_t packet_size = 1024;
    SimTime interval;
    std::uint32_t streams = 1;
  };

  BulkSender(Simulator& sim, std::shared_ptr<transport::QuicSocket> socket, Config cfg);
  BulkSender(const BulkSender&) = delete;
  BulkSender& operator=(const BulkSender&) = delete;

  void start(Address remote);

  transport::QuicSocket& socket() { return *socket_; }
  const transport::QuicSocket& socket() const { return *socket_; }
  std::uint64_t bytes_written() const { return written_; }
  std::uint64_t stream_bytes_written(std::uint32_t stream) const;
  /// Stream of every completed application packet, in write order.
  const std::vector<std::uint32_t>& packet_streams() const { return packet_streams_; }
  bool finished() const { return finished_; }

 private:
  struct Pending {
    std::uint32_t stream = 0;
    std::size_t length = 0;
    std::size_t done = 0;
  };
  void write_more();
  void finish_all();

  Simulator& sim_;
  std::shared_ptr<transport::QuicSocket> socket_;
  Config cfg_;
  Timer timer_;
  std::optional<Pending> pending_;
  std::map<std::uint32_t, std::uint64_t> stream_offsets_;
  std::vector<std::uint32_t> packet_streams_;
  std::uint64_t written_ = 0;
  std::uint64_t packets_ = 0;
  bool finished_ = false;
  bool writing_ = false;
};

/// Server that accepts connections on a port and drains every stream,
/// checking content against pattern_byte.
class SinkServer {
 public:
  struct Delivery {
    SimTime at;
    std::uint32_t stream = 0;
    std::uint64_t offset = 0;
    std::size_t length = 0;
  };
  struct StreamRecord {
    std::uint64_t bytes = 0;
    bool fin = false;
    bool content_ok = true;
    SimTime first_byte;
    SimTime last_byte;
  };

  SinkServer(Simulator& sim, std::shared_ptr<transport::QuicSocket> listener, bool keep_log = false);
  SinkServer(const SinkServer&) = delete;
  SinkServer& operator=(const SinkServer&) = delete;

  void listen(std::uint16_t port);

  std::uint64_t bytes_received() const { return bytes_; }
  std::optional<SimTime> first_byte_time() const { return first_byte_; }
  const std::map<std::uint32_t, StreamRecord>& streams() const { return streams_; }
  const std::vector<Delivery>& deliveries() const { return log_; }
  bool content_ok() const;
  const std::vector<std::shared_ptr<transport::QuicSocket>>& connections() const { return connections_; }

 private:
  void drain(transport::QuicSocket& s);

  Simulator& sim_;
  std::shared_ptr<transport::QuicSocket> listener_;
  bool keep_log_;
  std::vector<std::shared_ptr<transport::QuicSocket>> connections_;
  std::map<std::uint32_t, StreamRecord> streams_;
  std::vector<Delivery> log_;
  std::uint64_t bytes_ = 0;
  std::optional<SimTime> first_byte_;
};

}  // namespace quicsim::apps
