#include "quicsim/wire/header.hpp"

namespace quicsim::wire {

namespace {
constexpr std::uint8_t kLongBit = 0x80;
constexpr std::uint8_t kOmitConnectionIdBit = 0x40;
constexpr std::uint8_t kPnLengthMask = 0x03;

bool valid_long_type(std::uint8_t t) {
  return t >= static_cast<std::uint8_t>(LongType::kVersionNegotiation) &&
         t <= static_cast<std::uint8_t>(LongType::kZeroRttProtected);
}
}  // namespace

const char* to_string(LongType t) {
  switch (t) {
    case LongType::kVersionNegotiation: return "VERSION_NEGOTIATION";
    case LongType::kClientInitial: return "CLIENT_INITIAL";
    case LongType::kHandshake: return "HANDSHAKE";
    case LongType::kZeroRttProtected: return "ZRTT_PROTECTED";
  }
  return "?";
}

QuicHeader QuicHeader::make_long(LongType type, std::uint64_t connection_id, std::uint32_t version,
                                 std::uint64_t pn) {
  QuicHeader h;
  h.form = HeaderForm::kLong;
  h.long_type = type;
  h.connection_id = connection_id;
  h.version = version;
  h.packet_number = pn;
  return h;
}

QuicHeader QuicHeader::make_short(std::optional<std::uint64_t> connection_id, std::uint64_t pn) {
  QuicHeader h;
  h.form = HeaderForm::kShort;
  h.connection_id = connection_id;
  h.packet_number = pn;
  return h;
}

std::size_t minimal_pn_length(std::uint64_t pn) {
  if (pn <= 0xFF) return 1;
  if (pn <= 0xFFFF) return 2;
  return 4;
}

std::size_t QuicHeader::pn_length() const { return is_long() ? 4 : minimal_pn_length(packet_number); }

std::size_t QuicHeader::serialized_size() const {
  if (is_long()) return kLongHeaderSize;
  return 1 + (connection_id ? 8 : 0) + pn_length();
}

bool QuicHeader::operator==(const QuicHeader& o) const {
  if (form != o.form || packet_number != o.packet_number || connection_id != o.connection_id) return false;
  if (is_long()) return long_type == o.long_type && version == o.version;
  return true;
}

void serialize_header(const QuicHeader& h, Bytes& out) {
  if (h.packet_number > kMaxPacketNumber) throw EncodeError("packet number exceeds 32 bits");
  ByteWriter w(out);
  if (h.is_long()) {
    if (!h.connection_id) throw EncodeError("long header requires a connection id");
    w.u8(kLongBit | static_cast<std::uint8_t>(h.long_type));
    w.u64(*h.connection_id);
    w.u32(h.version);
    w.u32(static_cast<std::uint32_t>(h.packet_number));
    return;
  }
  const std::size_t len = h.pn_length();
  std::uint8_t flags = len == 1 ? 0 : len == 2 ? 1 : 2;
  if (!h.connection_id) flags |= kOmitConnectionIdBit;
  w.u8(flags);
  if (h.connection_id) w.u64(*h.connection_id);
  w.be(h.packet_number, static_cast<int>(len));
}

Bytes serialize_header(const QuicHeader& h) {
  Bytes out;
  serialize_header(h, out);
  return out;
}

std::pair<QuicHeader, std::size_t> parse_header(std::span<const std::uint8_t> in) {
  ByteReader r(in);
  if (r.empty()) r.fail("empty header");
  const std::uint8_t flags = r.u8();
  QuicHeader h;
  if (flags & kLongBit) {
    const std::uint8_t type = flags & 0x7F;
    if (!valid_long_type(type)) throw CodecError("unknown long header type", 0);
    h.form = HeaderForm::kLong;
    h.long_type = static_cast<LongType>(type);
    h.connection_id = r.u64();
    h.version = r.u32();
    h.packet_number = r.u32();
    return {h, r.pos()};
  }
  h.form = HeaderForm::kShort;
  const std::uint8_t enc = flags & kPnLengthMask;
  if (enc == 3) throw CodecError("invalid packet number length encoding", 0);
  if (!(flags & kOmitConnectionIdBit)) h.connection_id = r.u64();
  h.packet_number = r.be(enc == 0 ? 1 : enc == 1 ? 2 : 4);
  return {h, r.pos()};
}

}  // namespace quicsim::wire
