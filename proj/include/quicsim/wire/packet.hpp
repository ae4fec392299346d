#pragma once

#include <span>
#include <vector>

#include "quicsim/wire/frame.hpp"
#include "quicsim/wire/header.hpp"

namespace quicsim::wire {

inline constexpr std::size_t kMaxPacketSize = 1460;

struct QuicPacket {
  QuicHeader header;
  std::vector<Frame> frames;

  std::size_t serialized_size() const;
  bool operator==(const QuicPacket&) const = default;
};

/// Throws EncodeError for an empty frame list or a packet above kMaxPacketSize.
Bytes serialize_packet(const QuicPacket& p);
QuicPacket parse_packet(std::span<const std::uint8_t> in);

}  // namespace quicsim::wire
