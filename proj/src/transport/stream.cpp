#include "quicsim/transport/stream.hpp"

#include <algorithm>
#include <stdexcept>

#include "quicsim/errors.hpp"

namespace quicsim::transport {

Stream::Stream(std::uint32_t id, StreamLimits limits, std::uint64_t peer_credit, std::uint64_t local_credit)
    : id_(id),
      tx_(limits.send_buffer),
      rx_(limits.recv_buffer),
      send_credit_(peer_credit),
      recv_window_(local_credit),
      recv_limit_(local_credit) {}

std::optional<std::uint64_t> Stream::on_consumed(std::uint64_t n) {
  consumed_ += n;
  if (recv_limit_ - consumed_ > recv_window_ / 2) return std::nullopt;
  recv_limit_ = consumed_ + recv_window_;
  return recv_limit_;
}

StreamMultiplexer::StreamMultiplexer(Config cfg)
    : cfg_(cfg),
      peer_max_data_(cfg.peer_max_data),
      local_max_data_(cfg.local_max_data) {}

void StreamMultiplexer::set_peer_limits(std::uint64_t max_data, std::uint64_t max_stream_data) {
  peer_max_data_ = max_data;
  cfg_.peer_max_stream_data = max_stream_data;
  for (auto& [id, s] : streams_) s->raise_send_credit(max_stream_data);
}

Stream& StreamMultiplexer::get_or_create(std::uint32_t id) {
  auto it = streams_.find(id);
  if (it == streams_.end()) {
    it = streams_
             .emplace(id, std::make_unique<Stream>(id, cfg_.limits, cfg_.peer_max_stream_data,
                                                   cfg_.local_max_stream_data))
             .first;
  }
  return *it->second;
}

Stream* StreamMultiplexer::find(std::uint32_t id) {
  auto it = streams_.find(id);
  return it == streams_.end() ? nullptr : it->second.get();
}

const Stream* StreamMultiplexer::find(std::uint32_t id) const {
  auto it = streams_.find(id);
  return it == streams_.end() ? nullptr : it->second.get();
}

std::optional<std::size_t> StreamMultiplexer::send(std::span<const std::uint8_t> data, std::uint32_t hint) {
  const std::uint32_t id = hint == 0 ? 1 : hint;
  if (id > cfg_.max_streams) return std::nullopt;
  Stream& s = get_or_create(id);
  if (s.tx().finished()) return 0;
  return s.tx().append(data);
}

bool StreamMultiplexer::finish(std::uint32_t id) {
  if (id == 0 || id > cfg_.max_streams) return false;
  get_or_create(id).tx().finish();
  return true;
}

std::size_t StreamMultiplexer::stream_send_space(std::uint32_t hint) const {
  const std::uint32_t id = hint == 0 ? 1 : hint;
  if (id > cfg_.max_streams) return 0;
  const Stream* s = find(id);
  return s ? s->tx().free_space() : cfg_.limits.send_buffer;
}

bool StreamMultiplexer::has_pending() const {
  return std::any_of(streams_.begin(), streams_.end(), [](const auto& kv) { return kv.second->tx().has_pending(); });
}

bool StreamMultiplexer::flow_blocked() const {
  bool any_pending = false;
  for (const auto& [id, s] : streams_) {
    if (!s->tx().has_pending()) continue;
    any_pending = true;
    const bool retransmittable = s->tx().lowest_unsent_offset() < s->highest_issued();
    const bool has_credit = s->send_credit() > s->highest_issued() && peer_max_data_ > conn_sent_;
    if (retransmittable || has_credit) return false;
  }
  return any_pending;
}

std::size_t StreamMultiplexer::pump(SocketTxBuffer& socket, std::size_t max_frame_data) {
  std::size_t moved = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<Stream*> order;
    for (auto it = streams_.lower_bound(rr_next_); it != streams_.end(); ++it) order.push_back(it->second.get());
    for (auto it = streams_.begin(); it != streams_.end() && it->first < rr_next_; ++it) {
      order.push_back(it->second.get());
    }
    for (Stream* s : order) {
      if (!s->tx().has_pending()) continue;
      const std::size_t free = socket.free_space();
      if (free <= wire::kStreamFrameOverhead) return moved;
      std::uint64_t cap = std::min<std::uint64_t>(max_frame_data, free - wire::kStreamFrameOverhead);
      const std::uint64_t lowest = s->tx().lowest_unsent_offset();
      if (lowest < s->highest_issued()) {
        cap = std::min(cap, s->highest_issued() - lowest);
      } else {
        const std::uint64_t stream_credit =
            s->send_credit() > s->highest_issued() ? s->send_credit() - s->highest_issued() : 0;
        const std::uint64_t conn_credit = peer_max_data_ > conn_sent_ ? peer_max_data_ - conn_sent_ : 0;
        cap = std::min({cap, stream_credit, conn_credit});
      }
      auto seg = s->tx().issue(static_cast<std::size_t>(cap));
      if (!seg) continue;
      const std::uint64_t end = seg->offset + seg->data.size();
      wire::StreamFrame frame{s->id(), seg->offset, seg->fin, seg->data};
      if (!socket.add(std::move(frame), false)) {
        s->tx().requeue(std::move(*seg));
        return moved;
      }
      if (end > s->highest_issued()) {
        conn_sent_ += end - s->highest_issued();
        s->note_issued(end);
      }
      moved += seg->data.size();
      rr_next_ = s->id() + 1;
      progress = true;
    }
  }
  return moved;
}

void StreamMultiplexer::receive(const wire::StreamFrame& f, SocketRxBuffer& out) {
  if (f.stream_id == 0 || f.stream_id > cfg_.max_streams) {
    throw ProtocolError(TransportError::kStreamLimitError, "stream id beyond the stream limit");
  }
  Stream& s = get_or_create(f.stream_id);
  if (f.end() > s.recv_limit()) {
    throw ProtocolError(TransportError::kFlowControlError, "stream data beyond advertised credit");
  }
  const std::uint64_t fresh = f.end() > s.rx().highest_received() ? f.end() - s.rx().highest_received() : 0;
  if (conn_received_ + fresh > local_max_data_) {
    throw ProtocolError(TransportError::kFlowControlError, "connection data beyond advertised credit");
  }
  wire::Bytes released = s.rx().insert(f.offset, f.data, f.fin);
  conn_received_ += fresh;
  const bool fin_now = s.rx().complete() && !s.fin_delivered();
  if (released.empty() && !fin_now) return;
  if (fin_now) s.set_fin_delivered();
  if (!out.push(SocketRxBuffer::Chunk{s.id(), std::move(released), fin_now})) {
    throw std::logic_error("socket receive buffer overflow within flow-control credit");
  }
}

std::vector<wire::Frame> StreamMultiplexer::on_consumed(std::uint32_t id, std::uint64_t n) {
  std::vector<wire::Frame> frames;
  if (n == 0) return frames;
  if (Stream* s = find(id)) {
    if (auto limit = s->on_consumed(n)) frames.emplace_back(wire::MaxStreamDataFrame{id, *limit});
  }
  conn_consumed_ += n;
  if (local_max_data_ - conn_consumed_ <= cfg_.local_max_data / 2) {
    local_max_data_ = conn_consumed_ + cfg_.local_max_data;
    frames.emplace_back(wire::MaxDataFrame{local_max_data_});
  }
  return frames;
}

void StreamMultiplexer::on_max_stream_data(std::uint32_t id, std::uint64_t limit) {
  if (id == 0 || id > cfg_.max_streams) return;
  get_or_create(id).raise_send_credit(limit);
}

}  // namespace quicsim::transport
