#include "quicsim/apps/applications.hpp"

#include <algorithm>

namespace quicsim::apps {

std::uint8_t pattern_byte(std::uint32_t stream, std::uint64_t offset) {
  const std::uint64_t x = offset * 0x9E3779B97F4A7C15ull + stream * 0xBF58476D1CE4E5B9ull;
  return static_cast<std::uint8_t>(x >> 56);
}

BulkSender::BulkSender(Simulator& sim, std::shared_ptr<transport::QuicSocket> socket, Config cfg)
    : sim_(sim), socket_(std::move(socket)), cfg_(cfg), timer_(sim) {
  if (cfg_.streams == 0 || cfg_.packet_size == 0) throw std::invalid_argument("bulk sender needs streams and a size");
}

void BulkSender::start(Address remote) {
  socket_->set_connected_callback([this](transport::QuicSocket&) { write_more(); });
  socket_->set_send_callback([this](transport::QuicSocket&) {
    if (!timer_.armed()) write_more();
  });
  socket_->connect(remote);
}

std::uint64_t BulkSender::stream_bytes_written(std::uint32_t stream) const {
  auto it = stream_offsets_.find(stream);
  return it == stream_offsets_.end() ? 0 : it->second;
}

void BulkSender::write_more() {
  if (finished_ || writing_) return;
  writing_ = true;
  std::vector<std::uint8_t> buf;
  while (!finished_) {
    if (!pending_) {
      if (cfg_.bytes_to_send > 0 && written_ >= cfg_.bytes_to_send) {
        finish_all();
        break;
      }
      std::size_t len = cfg_.packet_size;
      if (cfg_.bytes_to_send > 0) len = static_cast<std::size_t>(std::min<std::uint64_t>(len, cfg_.bytes_to_send - written_));
      pending_ = Pending{round_robin_stream(packets_, cfg_.streams), len, 0};
    }
    Pending& p = *pending_;
    std::uint64_t& offset = stream_offsets_[p.stream];
    buf.resize(p.length - p.done);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = pattern_byte(p.stream, offset + i);
    const auto accepted = socket_->send(buf, p.stream);
    if (!accepted || *accepted == 0) break;
    p.done += *accepted;
    offset += *accepted;
    written_ += *accepted;
    if (p.done < p.length) break;
    packet_streams_.push_back(p.stream);
    ++packets_;
    pending_.reset();
    if (cfg_.interval > SimTime()) {
      timer_.arm_in(cfg_.interval, [this] { write_more(); });
      break;
    }
  }
  writing_ = false;
}

void BulkSender::finish_all() {
  const std::uint32_t used = static_cast<std::uint32_t>(std::min<std::uint64_t>(cfg_.streams, packets_));
  for (std::uint32_t s = 1; s <= used; ++s) socket_->finish_stream(s);
  finished_ = true;
}

SinkServer::SinkServer(Simulator& sim, std::shared_ptr<transport::QuicSocket> listener, bool keep_log)
    : sim_(sim), listener_(std::move(listener)), keep_log_(keep_log) {}

void SinkServer::listen(std::uint16_t port) {
  listener_->set_accept_callback([this](std::shared_ptr<transport::QuicSocket> s) {
    s->set_recv_callback([this](transport::QuicSocket& sock) { drain(sock); });
    connections_.push_back(std::move(s));
  });
  listener_->listen(port);
}

void SinkServer::drain(transport::QuicSocket& s) {
  while (auto chunk = s.recv()) {
    const SimTime now = sim_.now();
    StreamRecord& r = streams_[chunk->stream_id];
    if (!chunk->data.empty()) {
      if (r.bytes == 0) r.first_byte = now;
      r.last_byte = now;
      for (std::size_t i = 0; i < chunk->data.size() && r.content_ok; ++i) {
        r.content_ok = chunk->data[i] == pattern_byte(chunk->stream_id, r.bytes + i);
      }
      if (keep_log_) log_.push_back(Delivery{now, chunk->stream_id, r.bytes, chunk->data.size()});
      if (!first_byte_) first_byte_ = now;
    }
    r.bytes += chunk->data.size();
    bytes_ += chunk->data.size();
    if (chunk->fin) r.fin = true;
  }
}

bool SinkServer::content_ok() const {
  return std::all_of(streams_.begin(), streams_.end(), [](const auto& kv) { return kv.second.content_ok; });
}

}  // namespace quicsim::apps
