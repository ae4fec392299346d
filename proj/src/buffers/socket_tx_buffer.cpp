#include "quicsim/buffers/socket_tx_buffer.hpp"

#include <algorithm>

#include "quicsim/errors.hpp"

namespace quicsim {

namespace {

bool is_priority_frame(const wire::Frame& f) {
  if (const auto* s = std::get_if<wire::StreamFrame>(&f)) return s->stream_id == 0;
  return true;
}

}  // namespace

bool SocketTxBuffer::add(wire::Frame frame, bool priority) {
  const std::size_t size = wire::frame_size(frame);
  if (buffered_bytes() + size > capacity_) return false;
  unsent_bytes_ += size;
  (priority ? priority_ : normal_).push_back(Queued{std::move(frame), priority});
  return true;
}

const SocketTxItem* SocketTxBuffer::next_packet(std::size_t max_payload, std::uint64_t pn, SimTime now,
                                                std::size_t extra_wire_bytes) {
  if (largest_sent_ && pn <= *largest_sent_) throw std::logic_error("packet numbers must increase");
  SocketTxItem item;
  std::size_t budget = max_payload;
  while (budget > 0) {
    auto& queue = !priority_.empty() ? priority_ : normal_;
    if (queue.empty()) break;
    Queued& head = queue.front();
    const std::size_t size = wire::frame_size(head.frame);
    if (size <= budget) {
      budget -= size;
      unsent_bytes_ -= size;
      item.payload_bytes += size;
      item.frames.push_back(std::move(head.frame));
      queue.pop_front();
      continue;
    }
    auto* stream = std::get_if<wire::StreamFrame>(&head.frame);
    if (stream == nullptr || budget <= wire::kStreamFrameOverhead) break;
    // Split: the front part goes now, the rest stays queued at its offset.
    const std::size_t take = budget - wire::kStreamFrameOverhead;
    wire::StreamFrame part;
    part.stream_id = stream->stream_id;
    part.offset = stream->offset;
    part.data.assign(stream->data.begin(), stream->data.begin() + static_cast<std::ptrdiff_t>(take));
    stream->data.erase(stream->data.begin(), stream->data.begin() + static_cast<std::ptrdiff_t>(take));
    stream->offset += take;
    unsent_bytes_ -= take;
    item.payload_bytes += budget;
    item.frames.emplace_back(std::move(part));
    budget = 0;
  }
  if (item.frames.empty()) return nullptr;
  item.packet_number = pn;
  item.sent_at = now;
  item.wire_bytes = item.payload_bytes + extra_wire_bytes;
  sent_payload_bytes_ += item.payload_bytes;
  bytes_in_flight_ += item.wire_bytes;
  largest_sent_ = pn;
  sent_.push_back(std::move(item));
  return &sent_.back();
}

void SocketTxBuffer::record_non_eliciting(std::uint64_t pn, std::size_t wire_bytes, SimTime now) {
  if (largest_sent_ && pn <= *largest_sent_) throw std::logic_error("packet numbers must increase");
  SocketTxItem item;
  item.packet_number = pn;
  item.sent_at = now;
  item.wire_bytes = wire_bytes;
  item.ack_eliciting = false;
  item.released = true;
  largest_sent_ = pn;
  sent_.push_back(std::move(item));
  prune();
}

SocketTxItem* SocketTxBuffer::find(std::uint64_t pn) {
  auto it = std::lower_bound(sent_.begin(), sent_.end(), pn,
                             [](const SocketTxItem& i, std::uint64_t v) { return *i.packet_number < v; });
  return it != sent_.end() && *it->packet_number == pn ? &*it : nullptr;
}

void SocketTxBuffer::release(SocketTxItem& item) {
  if (item.released) return;
  sent_payload_bytes_ -= item.payload_bytes;
  item.frames.clear();
  item.frames.shrink_to_fit();
  item.released = true;
}

AckOutcome SocketTxBuffer::on_ack(std::span<const wire::PnRange> acked, SimTime now, const LossPredicate& is_lost) {
  AckOutcome out;
  if (acked.empty()) return out;
  std::uint64_t frame_largest = 0;
  for (const auto& r : acked) {
    if (!largest_sent_ || r.high > *largest_sent_) {
      throw ProtocolError(TransportError::kProtocolViolation, "ACK for a packet number never sent");
    }
    frame_largest = std::max(frame_largest, r.high);
  }
  for (const auto& r : acked) {
    auto it = std::lower_bound(sent_.begin(), sent_.end(), r.low,
                               [](const SocketTxItem& i, std::uint64_t v) { return *i.packet_number < v; });
    for (; it != sent_.end() && *it->packet_number <= r.high; ++it) {
      SocketTxItem& item = *it;
      if (item.acked || item.lost) continue;
      item.acked = true;
      item.acked_at = now;
      if (item.ack_eliciting) bytes_in_flight_ -= item.wire_bytes;
      release(item);
      if (*item.packet_number == frame_largest) out.largest_newly_acked_sent_at = item.sent_at;
      out.newly_acked.push_back(item);
    }
  }
  if (!largest_acked_ || frame_largest > *largest_acked_) largest_acked_ = frame_largest;

  for (auto& item : sent_) {
    if (*item.packet_number >= *largest_acked_) break;
    if (!item.in_flight() || !is_lost(item, *largest_acked_)) continue;
    item.lost = true;
    bytes_in_flight_ -= item.wire_bytes;
    out.newly_lost.push_back(item);
  }
  prune();
  return out;
}

std::vector<SocketTxItem> SocketTxBuffer::mark_all_lost() {
  std::vector<SocketTxItem> lost;
  for (auto& item : sent_) {
    if (!item.in_flight()) continue;
    item.lost = true;
    bytes_in_flight_ -= item.wire_bytes;
    lost.push_back(item);
  }
  return lost;
}

std::size_t SocketTxBuffer::prepare_retransmissions() {
  std::size_t count = 0;
  for (auto it = sent_.rbegin(); it != sent_.rend(); ++it) {
    SocketTxItem& item = *it;
    if (!item.lost || item.retransmitted) continue;
    for (auto f = item.frames.rbegin(); f != item.frames.rend(); ++f) {
      const bool prio = is_priority_frame(*f);
      unsent_bytes_ += wire::frame_size(*f);
      (prio ? priority_ : normal_).push_front(Queued{std::move(*f), prio});
    }
    item.retransmitted = true;
    release(item);
    ++count;
  }
  prune();
  return count;
}

std::size_t SocketTxBuffer::recompute_bytes_in_flight() const {
  std::size_t n = 0;
  for (const auto& item : sent_) {
    if (item.in_flight()) n += item.wire_bytes;
  }
  return n;
}

std::size_t SocketTxBuffer::outstanding_lost() const {
  return static_cast<std::size_t>(
      std::count_if(sent_.begin(), sent_.end(), [](const SocketTxItem& i) { return i.lost && !i.retransmitted; }));
}

void SocketTxBuffer::prune() {
  while (!sent_.empty()) {
    const SocketTxItem& front = sent_.front();
    if (!(front.acked || front.retransmitted || !front.ack_eliciting)) break;
    sent_.pop_front();
  }
}

}  // namespace quicsim
