#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "quicsim/sim/sim_time.hpp"
#include "quicsim/wire/frame.hpp"

namespace quicsim::wire {

/// Inclusive packet-number interval.
struct PnRange {
  std::uint64_t low = 0;
  std::uint64_t high = 0;
  bool operator==(const PnRange&) const = default;
};

/// Disjoint, non-adjacent ranges, highest first.
std::vector<PnRange> ack_ranges(const AckFrame& ack);
/// Every acknowledged packet number, highest first.
std::vector<std::uint64_t> expand_ack(const AckFrame& ack);
/// Encodes `ranges` (disjoint, non-adjacent, highest first). At most
/// `max_blocks` ranges beyond the first are kept; the lowest are dropped.
AckFrame make_ack_frame(std::span<const PnRange> ranges, std::uint32_t ack_delay_us,
                        std::size_t max_blocks = kMaxAckBlocks);

/// Microseconds between receiving the acknowledged packet and sending the ACK.
std::uint32_t ack_delay_encode(SimTime received_at, SimTime ack_sent_at);

/// Set of packet numbers kept as merged intervals.
class PnRangeSet {
 public:
  /// False if `pn` was already present.
  bool insert(std::uint64_t pn);
  bool contains(std::uint64_t pn) const;
  bool empty() const { return ranges_.empty(); }
  std::uint64_t largest() const { return ranges_.rbegin()->second; }
  std::size_t range_count() const { return ranges_.size(); }
  /// Highest first.
  std::vector<PnRange> descending() const;
  /// Forgets all but the `keep` highest ranges.
  void trim(std::size_t keep);

 private:
  std::map<std::uint64_t, std::uint64_t> ranges_;  // low -> high
};

}  // namespace quicsim::wire
