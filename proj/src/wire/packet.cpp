#include "quicsim/wire/packet.hpp"

namespace quicsim::wire {

std::size_t QuicPacket::serialized_size() const {
  std::size_t n = header.serialized_size();
  for (const auto& f : frames) n += frame_size(f);
  return n;
}

Bytes serialize_packet(const QuicPacket& p) {
  if (p.frames.empty()) throw EncodeError("packet carries no frames");
  if (p.serialized_size() > kMaxPacketSize) throw EncodeError("packet exceeds maximum size");
  Bytes out;
  out.reserve(p.serialized_size());
  serialize_header(p.header, out);
  for (const auto& f : p.frames) serialize_frame(f, out);
  return out;
}

QuicPacket parse_packet(std::span<const std::uint8_t> in) {
  auto [header, consumed] = parse_header(in);
  QuicPacket p{header, parse_frames(in.subspan(consumed), consumed)};
  if (p.frames.empty()) throw CodecError("packet carries no frames", consumed);
  return p;
}

}  // namespace quicsim::wire
