#include "quicsim/buffers/stream_rx_buffer.hpp"

#include <algorithm>

#include "quicsim/errors.hpp"

namespace quicsim {

wire::Bytes StreamRxBuffer::insert(std::uint64_t offset, std::span<const std::uint8_t> data, bool fin) {
  const std::uint64_t end = offset + data.size();
  if (fin) {
    if (fin_offset_ && *fin_offset_ != end) {
      throw ProtocolError(TransportError::kFinalOffsetError, "conflicting stream FIN offsets");
    }
    if (end < highest_) throw ProtocolError(TransportError::kFinalOffsetError, "FIN below received data");
    fin_offset_ = end;
  }
  if (fin_offset_ && end > *fin_offset_) {
    throw ProtocolError(TransportError::kFinalOffsetError, "stream data beyond final offset");
  }
  highest_ = std::max(highest_, end);

  // Insert the parts of [offset, end) not already covered, walking the gaps.
  std::uint64_t cursor = std::max(offset, next_expected_);
  while (cursor < end) {
    auto next = segments_.upper_bound(cursor);
    if (next != segments_.begin()) {
      auto prev = std::prev(next);
      const std::uint64_t prev_end = prev->first + prev->second.size();
      if (prev_end > cursor) {
        cursor = prev_end;
        continue;
      }
    }
    const std::uint64_t piece_end = next == segments_.end() ? end : std::min(end, next->first);
    if (piece_end > cursor) {
      auto first = data.begin() + static_cast<std::ptrdiff_t>(cursor - offset);
      auto last = data.begin() + static_cast<std::ptrdiff_t>(piece_end - offset);
      segments_.emplace(cursor, wire::Bytes(first, last));
      buffered_ += piece_end - cursor;
      if (buffered_ > capacity_) {
        throw ProtocolError(TransportError::kFlowControlError, "stream receive buffer overflow");
      }
    }
    cursor = piece_end;
  }

  wire::Bytes released;
  for (auto it = segments_.begin(); it != segments_.end() && it->first == next_expected_;) {
    released.insert(released.end(), it->second.begin(), it->second.end());
    next_expected_ += it->second.size();
    buffered_ -= it->second.size();
    it = segments_.erase(it);
  }
  return released;
}

std::optional<std::uint64_t> StreamRxBuffer::total_length() const {
  if (fin_offset_ && next_expected_ == *fin_offset_) return fin_offset_;
  return std::nullopt;
}

}  // namespace quicsim
