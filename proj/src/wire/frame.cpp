#include "quicsim/wire/frame.hpp"

#include <limits>

#include "quicsim/wire/header.hpp"

namespace quicsim::wire {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_ack(const AckFrame& a) {
  if (a.largest_acked > kMaxPacketNumber) throw EncodeError("ACK largest exceeds 32 bits");
  if (a.blocks.size() > kMaxAckBlocks) throw EncodeError("too many ACK blocks");
  if (a.first_block_length == 0 || a.first_block_length > a.largest_acked + 1) {
    throw EncodeError("ACK first block out of range");
  }
  std::uint64_t next = a.largest_acked + 1 - a.first_block_length;  // lowest acked so far
  for (const auto& b : a.blocks) {
    if (b.gap == 0 || b.block_length == 0) throw EncodeError("ACK blocks must be separated and non-empty");
    if (static_cast<std::uint64_t>(b.gap) + b.block_length > next) throw EncodeError("ACK blocks underflow");
    next -= static_cast<std::uint64_t>(b.gap) + b.block_length;
  }
}

StreamFrame parse_stream(ByteReader& r, bool fin) {
  StreamFrame s;
  s.fin = fin;
  s.stream_id = r.u32();
  s.offset = r.u64();
  const std::uint16_t len = r.u16();
  if (r.remaining() < len) r.fail("stream frame extends past payload end");
  auto data = r.bytes(len);
  s.data.assign(data.begin(), data.end());
  return s;
}

AckFrame parse_ack(ByteReader& r) {
  const std::size_t start = r.offset() - 1;
  AckFrame a;
  a.largest_acked = r.u32();
  a.ack_delay_us = r.u32();
  const std::uint8_t count = r.u8();
  a.first_block_length = r.u32();
  a.blocks.reserve(count);
  for (int i = 0; i < count; ++i) {
    AckBlock b;
    b.gap = r.u32();
    b.block_length = r.u32();
    a.blocks.push_back(b);
  }
  try {
    check_ack(a);
  } catch (const EncodeError& e) {
    throw CodecError(std::string("overlapping or malformed ACK blocks: ") + e.what(), start);
  }
  return a;
}

}  // namespace

std::size_t frame_size(const Frame& f) {
  return std::visit(
      Overloaded{
          [](const StreamFrame& s) { return kStreamFrameOverhead + s.data.size(); },
          [](const AckFrame& a) { return kAckFrameOverhead + kAckBlockSize * a.blocks.size(); },
          [](const VersionNegotiationFrame& v) -> std::size_t { return 2 + 4 * v.versions.size(); },
          [](const ConnectionCloseFrame& c) -> std::size_t { return 5 + c.reason.size(); },
          [](const MaxDataFrame&) -> std::size_t { return 9; },
          [](const MaxStreamDataFrame&) -> std::size_t { return 13; },
          [](const PaddingFrame& p) { return p.length; },
      },
      f);
}

void serialize_frame(const Frame& f, Bytes& out) {
  ByteWriter w(out);
  std::visit(Overloaded{
                 [&](const StreamFrame& s) {
                   if (s.data.size() > std::numeric_limits<std::uint16_t>::max()) {
                     throw EncodeError("stream frame too long");
                   }
                   w.u8(static_cast<std::uint8_t>(s.fin ? FrameType::kStreamFin : FrameType::kStream));
                   w.u32(s.stream_id);
                   w.u64(s.offset);
                   w.u16(static_cast<std::uint16_t>(s.data.size()));
                   w.bytes(s.data);
                 },
                 [&](const AckFrame& a) {
                   check_ack(a);
                   w.u8(static_cast<std::uint8_t>(FrameType::kAck));
                   w.u32(static_cast<std::uint32_t>(a.largest_acked));
                   w.u32(a.ack_delay_us);
                   w.u8(static_cast<std::uint8_t>(a.blocks.size()));
                   w.u32(a.first_block_length);
                   for (const auto& b : a.blocks) {
                     w.u32(b.gap);
                     w.u32(b.block_length);
                   }
                 },
                 [&](const VersionNegotiationFrame& v) {
                   if (v.versions.size() > 255) throw EncodeError("too many versions");
                   w.u8(static_cast<std::uint8_t>(FrameType::kVersionNegotiation));
                   w.u8(static_cast<std::uint8_t>(v.versions.size()));
                   for (auto ver : v.versions) w.u32(ver);
                 },
                 [&](const ConnectionCloseFrame& c) {
                   if (c.reason.size() > std::numeric_limits<std::uint16_t>::max()) {
                     throw EncodeError("close reason too long");
                   }
                   w.u8(static_cast<std::uint8_t>(FrameType::kConnectionClose));
                   w.u16(c.error_code);
                   w.u16(static_cast<std::uint16_t>(c.reason.size()));
                   w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(c.reason.data()), c.reason.size()));
                 },
                 [&](const MaxDataFrame& m) {
                   w.u8(static_cast<std::uint8_t>(FrameType::kMaxData));
                   w.u64(m.maximum);
                 },
                 [&](const MaxStreamDataFrame& m) {
                   w.u8(static_cast<std::uint8_t>(FrameType::kMaxStreamData));
                   w.u32(m.stream_id);
                   w.u64(m.maximum);
                 },
                 [&](const PaddingFrame& p) {
                   if (p.length == 0) throw EncodeError("empty padding");
                   out.insert(out.end(), p.length, 0);
                 },
             },
             f);
}

Bytes serialize_frame(const Frame& f) {
  Bytes out;
  serialize_frame(f, out);
  return out;
}

std::vector<Frame> parse_frames(std::span<const std::uint8_t> payload, std::size_t base_offset) {
  ByteReader r(payload, base_offset);
  std::vector<Frame> frames;
  while (!r.empty()) {
    const std::size_t type_offset = r.offset();
    const std::uint8_t type = r.u8();
    switch (static_cast<FrameType>(type)) {
      case FrameType::kPadding: {
        std::size_t n = 1;
        while (!r.empty() && r.peek() == 0) {
          r.u8();
          ++n;
        }
        frames.emplace_back(PaddingFrame{n});
        break;
      }
      case FrameType::kAck:
        frames.emplace_back(parse_ack(r));
        break;
      case FrameType::kConnectionClose: {
        ConnectionCloseFrame c;
        c.error_code = r.u16();
        const std::uint16_t len = r.u16();
        if (r.remaining() < len) r.fail("close reason extends past payload end");
        auto reason = r.bytes(len);
        c.reason.assign(reason.begin(), reason.end());
        frames.emplace_back(std::move(c));
        break;
      }
      case FrameType::kMaxData:
        frames.emplace_back(MaxDataFrame{r.u64()});
        break;
      case FrameType::kMaxStreamData: {
        MaxStreamDataFrame m;
        m.stream_id = r.u32();
        m.maximum = r.u64();
        frames.emplace_back(m);
        break;
      }
      case FrameType::kVersionNegotiation: {
        VersionNegotiationFrame v;
        const std::uint8_t n = r.u8();
        for (int i = 0; i < n; ++i) v.versions.push_back(r.u32());
        frames.emplace_back(std::move(v));
        break;
      }
      case FrameType::kStream:
      case FrameType::kStreamFin:
        frames.emplace_back(parse_stream(r, type == static_cast<std::uint8_t>(FrameType::kStreamFin)));
        break;
      default:
        throw CodecError("unknown frame type", type_offset);
    }
  }
  return frames;
}

bool is_ack_eliciting(const Frame& f) {
  return !std::holds_alternative<AckFrame>(f) && !std::holds_alternative<PaddingFrame>(f);
}

}  // namespace quicsim::wire
