#include "quicsim/wire/ack.hpp"

#include <limits>
#include <stdexcept>

namespace quicsim::wire {

std::vector<PnRange> ack_ranges(const AckFrame& ack) {
  std::vector<PnRange> out;
  std::uint64_t high = ack.largest_acked;
  std::uint64_t low = high + 1 - ack.first_block_length;
  out.push_back({low, high});
  for (const auto& b : ack.blocks) {
    high = low - b.gap - 1;
    low = high + 1 - b.block_length;
    out.push_back({low, high});
  }
  return out;
}

std::vector<std::uint64_t> expand_ack(const AckFrame& ack) {
  std::vector<std::uint64_t> out;
  for (const auto& r : ack_ranges(ack)) {
    for (std::uint64_t pn = r.high + 1; pn-- > r.low;) out.push_back(pn);
  }
  return out;
}

AckFrame make_ack_frame(std::span<const PnRange> ranges, std::uint32_t ack_delay_us, std::size_t max_blocks) {
  if (ranges.empty()) throw std::invalid_argument("cannot acknowledge an empty set");
  AckFrame a;
  a.largest_acked = ranges[0].high;
  a.ack_delay_us = ack_delay_us;
  a.first_block_length = static_cast<std::uint32_t>(ranges[0].high - ranges[0].low + 1);
  std::uint64_t prev_low = ranges[0].low;
  for (std::size_t i = 1; i < ranges.size() && a.blocks.size() < max_blocks; ++i) {
    const auto& r = ranges[i];
    if (r.high + 1 >= prev_low) throw std::invalid_argument("ranges overlap or touch");
    a.blocks.push_back({static_cast<std::uint32_t>(prev_low - r.high - 1),
                        static_cast<std::uint32_t>(r.high - r.low + 1)});
    prev_low = r.low;
  }
  return a;
}

std::uint32_t ack_delay_encode(SimTime received_at, SimTime ack_sent_at) {
  if (ack_sent_at < received_at) throw std::logic_error("ACK sent before the packet was received");
  const std::int64_t d = (ack_sent_at - received_at).ticks();
  return d > std::numeric_limits<std::uint32_t>::max() ? std::numeric_limits<std::uint32_t>::max()
                                                       : static_cast<std::uint32_t>(d);
}

bool PnRangeSet::insert(std::uint64_t pn) {
  if (contains(pn)) return false;
  std::uint64_t low = pn;
  std::uint64_t high = pn;
  auto next = ranges_.upper_bound(pn);
  if (next != ranges_.end() && next->first == pn + 1) {
    high = next->second;
    next = ranges_.erase(next);
  }
  if (next != ranges_.begin()) {
    auto prev = std::prev(next);
    if (prev->second + 1 == pn) {
      low = prev->first;
      ranges_.erase(prev);
    }
  }
  ranges_[low] = high;
  return true;
}

bool PnRangeSet::contains(std::uint64_t pn) const {
  auto it = ranges_.upper_bound(pn);
  if (it == ranges_.begin()) return false;
  --it;
  return pn <= it->second;
}

std::vector<PnRange> PnRangeSet::descending() const {
  std::vector<PnRange> out;
  out.reserve(ranges_.size());
  for (auto it = ranges_.rbegin(); it != ranges_.rend(); ++it) out.push_back({it->first, it->second});
  return out;
}

void PnRangeSet::trim(std::size_t keep) {
  while (ranges_.size() > keep) ranges_.erase(ranges_.begin());
}

}  // namespace quicsim::wire
