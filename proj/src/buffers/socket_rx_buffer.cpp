#include "quicsim/buffers/socket_rx_buffer.hpp"

namespace quicsim {

bool SocketRxBuffer::push(Chunk chunk) {
  if (bytes_ + chunk.data.size() > capacity_) return false;
  bytes_ += chunk.data.size();
  chunks_.push_back(std::move(chunk));
  return true;
}

std::optional<SocketRxBuffer::Chunk> SocketRxBuffer::pop() {
  if (chunks_.empty()) return std::nullopt;
  Chunk c = std::move(chunks_.front());
  chunks_.pop_front();
  bytes_ -= c.data.size();
  return c;
}

}  // namespace quicsim
