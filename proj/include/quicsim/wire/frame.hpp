#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "quicsim/wire/byte_io.hpp"

namespace quicsim::wire {

/// Frame type bytes. STREAM uses two codes; the low bit carries FIN.
enum class FrameType : std::uint8_t {
  kPadding = 0x00,
  kAck = 0x01,
  kConnectionClose = 0x02,
  kMaxData = 0x04,
  kMaxStreamData = 0x05,
  kVersionNegotiation = 0x06,
  kStream = 0x10,
  kStreamFin = 0x11,
};

struct StreamFrame {
  std::uint32_t stream_id = 0;
  std::uint64_t offset = 0;
  bool fin = false;
  Bytes data;

  std::uint64_t end() const { return offset + data.size(); }
  bool operator==(const StreamFrame&) const = default;
};

struct AckBlock {
  std::uint32_t gap = 0;           // packets missing above this block
  std::uint32_t block_length = 0;  // packets acknowledged in this block
  bool operator==(const AckBlock&) const = default;
};

/// `first_block_length` counts the packets acknowledged downward from and
/// including `largest_acked`. Each further block skips `gap` packets then
/// acknowledges `block_length` more.
struct AckFrame {
  std::uint64_t largest_acked = 0;
  std::uint32_t ack_delay_us = 0;
  std::uint32_t first_block_length = 1;
  std::vector<AckBlock> blocks;
  bool operator==(const AckFrame&) const = default;
};

struct VersionNegotiationFrame {
  std::vector<std::uint32_t> versions;
  bool operator==(const VersionNegotiationFrame&) const = default;
};

struct ConnectionCloseFrame {
  std::uint16_t error_code = 0;
  std::string reason;
  bool operator==(const ConnectionCloseFrame&) const = default;
};

struct MaxDataFrame {
  std::uint64_t maximum = 0;
  bool operator==(const MaxDataFrame&) const = default;
};

struct MaxStreamDataFrame {
  std::uint32_t stream_id = 0;
  std::uint64_t maximum = 0;
  bool operator==(const MaxStreamDataFrame&) const = default;
};

/// A run of zero bytes.
struct PaddingFrame {
  std::size_t length = 1;
  bool operator==(const PaddingFrame&) const = default;
};

using Frame = std::variant<StreamFrame, AckFrame, VersionNegotiationFrame, ConnectionCloseFrame,
                           MaxDataFrame, MaxStreamDataFrame, PaddingFrame>;

inline constexpr std::size_t kStreamFrameOverhead = 15;
inline constexpr std::size_t kAckFrameOverhead = 14;
inline constexpr std::size_t kAckBlockSize = 8;
inline constexpr std::size_t kMaxAckBlocks = 255;

std::size_t frame_size(const Frame& f);
void serialize_frame(const Frame& f, Bytes& out);
Bytes serialize_frame(const Frame& f);
/// Decodes frames until the payload is exhausted. Consecutive padding bytes
/// form one PaddingFrame. `base_offset` positions error offsets within the
/// enclosing packet.
std::vector<Frame> parse_frames(std::span<const std::uint8_t> payload, std::size_t base_offset = 0);

/// Frames that oblige the receiver to acknowledge the packet.
bool is_ack_eliciting(const Frame& f);

}  // namespace quicsim::wire
