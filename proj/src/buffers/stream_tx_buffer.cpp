#include "quicsim/buffers/stream_tx_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace quicsim {

std::size_t StreamTxBuffer::append(std::span<const std::uint8_t> data) {
  if (fin_offset_) throw std::logic_error("append after stream finished");
  const std::size_t n = std::min(data.size(), free_space());
  if (n == 0) return 0;
  auto last = unsent_.empty() ? unsent_.end() : std::prev(unsent_.end());
  if (last != unsent_.end() && last->first + last->second.size() == next_offset_) {
    last->second.insert(last->second.end(), data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    unsent_.emplace(next_offset_, wire::Bytes(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n)));
  }
  next_offset_ += n;
  buffered_ += n;
  return n;
}

void StreamTxBuffer::finish() {
  if (!fin_offset_) fin_offset_ = next_offset_;
}

std::optional<StreamTxBuffer::Segment> StreamTxBuffer::issue(std::size_t max_bytes) {
  if (unsent_.empty()) {
    if (fin_offset_ && !fin_issued_) {
      fin_issued_ = true;
      return Segment{*fin_offset_, {}, true};
    }
    return std::nullopt;
  }
  if (max_bytes == 0) return std::nullopt;
  auto it = unsent_.begin();
  Segment seg;
  seg.offset = it->first;
  if (it->second.size() <= max_bytes) {
    seg.data = std::move(it->second);
    unsent_.erase(it);
  } else {
    seg.data.assign(it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(max_bytes));
    wire::Bytes rest(it->second.begin() + static_cast<std::ptrdiff_t>(max_bytes), it->second.end());
    unsent_.erase(it);
    unsent_.emplace(seg.offset + max_bytes, std::move(rest));
  }
  buffered_ -= seg.data.size();
  if (fin_offset_ && seg.offset + seg.data.size() == *fin_offset_ && !fin_issued_) {
    seg.fin = true;
    fin_issued_ = true;
  }
  return seg;
}

void StreamTxBuffer::requeue(Segment seg) {
  if (seg.fin) fin_issued_ = false;
  if (seg.data.empty()) return;
  const std::uint64_t end = seg.offset + seg.data.size();
  if (end > next_offset_) throw std::logic_error("requeue of bytes never issued");
  auto next = unsent_.lower_bound(seg.offset);
  if (next != unsent_.end() && next->first < end) throw std::logic_error("requeue overlaps live data");
  if (next != unsent_.begin()) {
    auto prev = std::prev(next);
    if (prev->first + prev->second.size() > seg.offset) throw std::logic_error("requeue overlaps live data");
  }
  buffered_ += seg.data.size();
  unsent_.emplace(seg.offset, std::move(seg.data));
}

std::uint64_t StreamTxBuffer::lowest_unsent_offset() const {
  return unsent_.empty() ? next_offset_ : unsent_.begin()->first;
}

}  // namespace quicsim
