#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "quicsim/sim/sim_time.hpp"
#include "quicsim/wire/ack.hpp"
#include "quicsim/wire/frame.hpp"

namespace quicsim {

/// One transmitted packet as tracked by the sender.
struct SocketTxItem {
  std::vector<wire::Frame> frames;  // retransmittable payload; cleared on release
  std::size_t payload_bytes = 0;    // serialized size of `frames`
  std::size_t wire_bytes = 0;       // full packet size, counted in flight
  std::optional<std::uint64_t> packet_number;
  SimTime sent_at;
  std::optional<SimTime> acked_at;
  bool ack_eliciting = true;
  bool lost = false;
  bool retransmitted = false;
  bool acked = false;
  bool released = false;

  bool in_flight() const { return ack_eliciting && !acked && !lost; }
};

struct AckOutcome {
  std::vector<SocketTxItem> newly_acked;  // stubs: payload already released
  std::vector<SocketTxItem> newly_lost;
  /// Send time of `largest_acked` when this ACK newly acknowledged it.
  std::optional<SimTime> largest_newly_acked_sent_at;
};

/// Socket-level send buffer: an unsent frame queue (stream-0 and control
/// frames ahead of data) and the sent list used for ACK processing, loss
/// marking, retransmission and bytes-in-flight accounting.
class SocketTxBuffer {
 public:
  /// Called for outstanding packets numbered below the largest acknowledged.
  using LossPredicate = std::function<bool(const SocketTxItem&, std::uint64_t largest_acked)>;

  explicit SocketTxBuffer(std::size_t capacity) : capacity_(capacity) {}

  /// Queues a frame. Priority frames (stream 0, control) go ahead of every
  /// non-priority frame. False when the frame would exceed capacity.
  bool add(wire::Frame frame, bool priority);

  /// Assembles at most `max_payload` bytes of unsent frames into a new sent
  /// item numbered `pn`, splitting a stream frame if needed.
  /// `extra_wire_bytes` (header, piggybacked ACK) is added to the item's
  /// in-flight size. Returns nullptr when nothing is unsent.
  const SocketTxItem* next_packet(std::size_t max_payload, std::uint64_t pn, SimTime now,
                                  std::size_t extra_wire_bytes);
  /// Tracks a packet that carries nothing retransmittable (e.g. ACK only).
  void record_non_eliciting(std::uint64_t pn, std::size_t wire_bytes, SimTime now);

  /// Marks every packet in `acked` as acknowledged, then applies `is_lost` to
  /// the remaining outstanding packets below `largest_acked`. Throws
  /// ProtocolError if the ACK covers a packet number never sent.
  AckOutcome on_ack(std::span<const wire::PnRange> acked, SimTime now, const LossPredicate& is_lost);
  /// Declares every in-flight packet lost (retransmission timeout).
  std::vector<SocketTxItem> mark_all_lost();
  /// Moves the frames of lost packets back to the head of the unsent queue.
  /// They receive new packet numbers when next transmitted.
  std::size_t prepare_retransmissions();

  bool has_unsent() const { return !priority_.empty() || !normal_.empty(); }
  bool has_priority_unsent() const { return !priority_.empty(); }
  std::size_t unsent_bytes() const { return unsent_bytes_; }
  std::size_t bytes_in_flight() const { return bytes_in_flight_; }
  std::size_t recompute_bytes_in_flight() const;
  /// Unsent plus sent-but-unresolved payload.
  std::size_t buffered_bytes() const { return unsent_bytes_ + sent_payload_bytes_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t free_space() const { return capacity_ - std::min(capacity_, buffered_bytes()); }
  std::optional<std::uint64_t> largest_sent() const { return largest_sent_; }
  std::optional<std::uint64_t> largest_acked() const { return largest_acked_; }
  const std::deque<SocketTxItem>& sent() const { return sent_; }
  std::size_t outstanding_lost() const;

 private:
  struct Queued {
    wire::Frame frame;
    bool priority;
  };
  SocketTxItem* find(std::uint64_t pn);
  void release(SocketTxItem& item);
  void prune();

  std::size_t capacity_;
  std::size_t unsent_bytes_ = 0;
  std::size_t sent_payload_bytes_ = 0;
  std::size_t bytes_in_flight_ = 0;
  std::optional<std::uint64_t> largest_sent_;
  std::optional<std::uint64_t> largest_acked_;
  std::deque<Queued> priority_;
  std::deque<Queued> normal_;
  std::deque<SocketTxItem> sent_;  // strictly increasing packet numbers
};

}  // namespace quicsim
