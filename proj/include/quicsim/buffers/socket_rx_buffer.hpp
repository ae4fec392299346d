#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "quicsim/wire/frame.hpp"

namespace quicsim {

/// In-order data released by the streams, waiting for the application.
class SocketRxBuffer {
 public:
  struct Chunk {
    std::uint32_t stream_id = 0;
    wire::Bytes data;
    bool fin = false;
  };

  explicit SocketRxBuffer(std::size_t capacity) : capacity_(capacity) {}

  /// False (and no change) if the chunk does not fit.
  bool push(Chunk chunk);
  std::optional<Chunk> pop();

  bool empty() const { return chunks_.empty(); }
  std::size_t size() const { return bytes_; }
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  std::size_t bytes_ = 0;
  std::deque<Chunk> chunks_;
};

}  // namespace quicsim
