#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>

#include "quicsim/wire/frame.hpp"

namespace quicsim {

/// Sender-side stream buffer. Application bytes get a stream offset exactly
/// once, on append; frames handed to the socket that bounce back are
/// re-inserted at their original offset.
class StreamTxBuffer {
 public:
  struct Segment {
    std::uint64_t offset = 0;
    wire::Bytes data;
    bool fin = false;
  };

  explicit StreamTxBuffer(std::size_t capacity) : capacity_(capacity) {}

  /// Accepts as much of `data` as fits; returns the number of bytes taken.
  std::size_t append(std::span<const std::uint8_t> data);
  /// Marks the end of the stream after the bytes appended so far.
  void finish();

  /// Lowest-offset unsent bytes, at most `max_bytes` of them.
  std::optional<Segment> issue(std::size_t max_bytes);
  /// Returns a previously issued segment that the socket refused.
  void requeue(Segment seg);

  bool has_pending() const { return !unsent_.empty() || (fin_pending() && !fin_issued_); }
  std::uint64_t next_offset() const { return next_offset_; }
  std::size_t buffered_bytes() const { return buffered_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t free_space() const { return capacity_ - buffered_; }
  /// Offset of the first unsent byte, or next_offset() when nothing is queued.
  std::uint64_t lowest_unsent_offset() const;
  bool finished() const { return fin_offset_.has_value(); }

 private:
  bool fin_pending() const { return fin_offset_.has_value(); }

  std::size_t capacity_;
  std::size_t buffered_ = 0;
  std::uint64_t next_offset_ = 0;
  std::optional<std::uint64_t> fin_offset_;
  bool fin_issued_ = false;
  std::map<std::uint64_t, wire::Bytes> unsent_;
};

}  // namespace quicsim
