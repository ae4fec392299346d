#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>

#include "quicsim/wire/frame.hpp"

namespace quicsim {

/// Receiver-side stream buffer: holds out-of-order segments until the gap
/// before them fills, then releases the contiguous prefix.
class StreamRxBuffer {
 public:
  explicit StreamRxBuffer(std::size_t capacity) : capacity_(capacity) {}

  /// Stores the segment and returns the bytes that became contiguous.
  /// Overlaps with bytes already held or released are trimmed; the first
  /// copy received wins. Throws ProtocolError for data past the final size
  /// or a conflicting FIN.
  wire::Bytes insert(std::uint64_t offset, std::span<const std::uint8_t> data, bool fin);

  std::uint64_t next_expected_offset() const { return next_expected_; }
  std::optional<std::uint64_t> fin_offset() const { return fin_offset_; }
  /// Total stream length once FIN is known and every byte has been released.
  std::optional<std::uint64_t> total_length() const;
  bool complete() const { return total_length().has_value(); }
  /// Highest byte offset (exclusive) seen on this stream.
  std::uint64_t highest_received() const { return highest_; }
  std::size_t buffered_bytes() const { return buffered_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t buffered_ = 0;
  std::uint64_t next_expected_ = 0;
  std::uint64_t highest_ = 0;
  std::optional<std::uint64_t> fin_offset_;
  std::map<std::uint64_t, wire::Bytes> segments_;  // disjoint, all above next_expected_
};

}  // namespace quicsim
