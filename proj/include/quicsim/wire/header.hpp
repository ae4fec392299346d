#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "quicsim/wire/byte_io.hpp"

namespace quicsim::wire {

inline constexpr std::uint32_t kQuicVersionNegotiation = 0x00000000;
inline constexpr std::uint32_t kQuicVersion13 = 0x0000000D;
inline constexpr std::uint32_t kQuicVersion14 = 0x0000000E;

inline constexpr std::size_t kLongHeaderSize = 17;
inline constexpr std::size_t kMinShortHeaderSize = 2;
inline constexpr std::size_t kMaxShortHeaderSize = 13;
inline constexpr std::uint64_t kMaxPacketNumber = 0xFFFFFFFFull;

enum class HeaderForm : std::uint8_t { kLong, kShort };

enum class LongType : std::uint8_t {
  kVersionNegotiation = 0x01,
  kClientInitial = 0x02,
  kHandshake = 0x03,
  kZeroRttProtected = 0x04,
};

const char* to_string(LongType t);

/// Packet header. Layout (big-endian):
///   LONG : flags(1) | connection id(8) | version(4) | packet number(4)
///   SHORT: flags(1) | [connection id(8)] | packet number(1|2|4)
/// Flags: bit 7 set for LONG. LONG keeps the packet type in bits 0-6.
/// SHORT sets bit 6 when the connection id is omitted and encodes the packet
/// number width in bits 0-1 (0: 1 byte, 1: 2 bytes, 2: 4 bytes).
struct QuicHeader {
  HeaderForm form = HeaderForm::kShort;
  LongType long_type = LongType::kClientInitial;
  std::optional<std::uint64_t> connection_id;
  std::uint32_t version = 0;
  std::uint64_t packet_number = 0;

  static QuicHeader make_long(LongType type, std::uint64_t connection_id, std::uint32_t version,
                              std::uint64_t pn);
  static QuicHeader make_short(std::optional<std::uint64_t> connection_id, std::uint64_t pn);

  bool is_long() const { return form == HeaderForm::kLong; }
  /// Width of the encoded packet number: 4 for LONG, minimal of {1,2,4} for SHORT.
  std::size_t pn_length() const;
  std::size_t serialized_size() const;

  bool operator==(const QuicHeader& o) const;
};

/// Smallest of {1,2,4} bytes able to hold `pn`.
std::size_t minimal_pn_length(std::uint64_t pn);

void serialize_header(const QuicHeader& h, Bytes& out);
Bytes serialize_header(const QuicHeader& h);
/// Returns the header and the number of bytes consumed.
std::pair<QuicHeader, std::size_t> parse_header(std::span<const std::uint8_t> in);

}  // namespace quicsim::wire
