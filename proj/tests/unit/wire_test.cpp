#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "quicsim/wire/ack.hpp"
#include "quicsim/wire/frame.hpp"
#include "quicsim/wire/header.hpp"
#include "quicsim/wire/packet.hpp"
#include "wire_random.hpp"

using namespace quicsim;
using namespace quicsim::wire;
using namespace quicsim::testing;

namespace {

std::map<std::string, Bytes> load_golden() {
  std::ifstream in(std::string(QUICSIM_GOLDEN_DIR) + "/wire_vectors.txt");
  REQUIRE(in.good());
  std::map<std::string, Bytes> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    std::string hex;
    for (char c : line.substr(colon + 1)) {
      if (!std::isspace(static_cast<unsigned char>(c))) hex += c;
    }
    Bytes b;
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2) b.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
    out[line.substr(0, colon)] = b;
  }
  return out;
}

Bytes bytes_of(const std::string& s) { return Bytes(s.begin(), s.end()); }

}  // namespace

TEST_CASE("long headers are 17 bytes for every field value") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const auto h = QuicHeader::make_long(LongType::kClientInitial, rng(), static_cast<std::uint32_t>(rng()),
                                         rng() & kMaxPacketNumber);
    CHECK(serialize_header(h).size() == 17);
  }
}

TEST_CASE("short header sizes span 2 to 13 bytes") {
  CHECK(serialize_header(QuicHeader::make_short(std::nullopt, 7)).size() == 2);
  CHECK(serialize_header(QuicHeader::make_short(0xABCDull, 1u << 20)).size() == 13);
  const std::set<std::size_t> expected{2, 3, 5, 10, 11, 13};
  std::set<std::size_t> seen;
  for (bool cid : {false, true}) {
    for (std::uint64_t pn : std::vector<std::uint64_t>{0, 255, 256, 65535, 65536, kMaxPacketNumber}) {
      const auto h = QuicHeader::make_short(cid ? std::optional<std::uint64_t>(9) : std::nullopt, pn);
      const std::size_t n = serialize_header(h).size();
      CHECK(n == h.serialized_size());
      CHECK(n == 1 + (cid ? 8u : 0u) + minimal_pn_length(pn));
      seen.insert(n);
    }
  }
  CHECK(seen == expected);
}

TEST_CASE("packet number width is minimal") {
  CHECK(minimal_pn_length(0) == 1);
  CHECK(minimal_pn_length(255) == 1);
  CHECK(minimal_pn_length(256) == 2);
  CHECK(minimal_pn_length(65535) == 2);
  CHECK(minimal_pn_length(65536) == 4);
  CHECK(minimal_pn_length(kMaxPacketNumber) == 4);
}

TEST_CASE("packet numbers above 32 bits cannot be encoded") {
  CHECK_THROWS_AS(serialize_header(QuicHeader::make_short(std::nullopt, kMaxPacketNumber + 1)), EncodeError);
  CHECK_THROWS_AS(serialize_header(QuicHeader::make_long(LongType::kHandshake, 1, 1, kMaxPacketNumber + 1)),
                  EncodeError);
}

TEST_CASE("golden header and frame bytes") {
  const auto g = load_golden();
  CHECK(serialize_header(QuicHeader::make_long(LongType::kClientInitial, 0x0102030405060708ull, kQuicVersion13, 0)) ==
        g.at("long_initial_v13_pn0"));
  CHECK(serialize_header(QuicHeader::make_long(LongType::kVersionNegotiation, 0x0102030405060708ull,
                                               kQuicVersionNegotiation, 0)) == g.at("long_vn_version0"));
  CHECK(serialize_header(QuicHeader::make_long(LongType::kHandshake, 0x1122334455667788ull, kQuicVersion14, 1)) ==
        g.at("long_handshake_pn1"));
  CHECK(serialize_header(QuicHeader::make_short(std::nullopt, 7)) == g.at("short_nocid_pn7"));
  CHECK(serialize_header(QuicHeader::make_short(std::nullopt, 300)) == g.at("short_nocid_pn300"));
  CHECK(serialize_header(QuicHeader::make_short(0x1122334455667788ull, 1u << 20)) == g.at("short_cid_pn2pow20"));
  CHECK(serialize_header(QuicHeader::make_short(0x1122334455667788ull, 255)) == g.at("short_cid_pn255"));

  CHECK(serialize_frame(StreamFrame{1, 0, true, bytes_of("hi")}) == g.at("stream_id1_off0_fin_hi"));
  CHECK(serialize_frame(StreamFrame{2, 70000, false, bytes_of("x")}) == g.at("stream_id2_off70000_x"));
  CHECK(serialize_frame(AckFrame{10, 25000, 3, {AckBlock{2, 3}}}) == g.at("ack_10_first3_gap2_len3"));
  CHECK(serialize_frame(AckFrame{7, 0, 1, {}}) == g.at("ack_7_first1"));
  CHECK(serialize_frame(VersionNegotiationFrame{{kQuicVersion13, kQuicVersion14}}) == g.at("vn_two_versions"));
  CHECK(serialize_frame(ConnectionCloseFrame{10, "bye"}) == g.at("close_code10_bye"));
  CHECK(serialize_frame(MaxDataFrame{65536}) == g.at("max_data_65536"));
  CHECK(serialize_frame(MaxStreamDataFrame{3, 4096}) == g.at("max_stream_data_s3_4096"));
  CHECK(serialize_frame(PaddingFrame{4}) == g.at("padding_4"));

  QuicPacket p{QuicHeader::make_short(std::nullopt, 7), {MaxDataFrame{65536}}};
  CHECK(serialize_packet(p) == g.at("packet_short_pn7_maxdata"));
  CHECK(parse_packet(g.at("packet_short_pn7_maxdata")) == p);
}

TEST_CASE("every golden vector parses back to the bytes it came from") {
  for (const auto& [name, bytes] : load_golden()) {
    CAPTURE(name);
    if (name.rfind("long_", 0) == 0 || name.rfind("short_", 0) == 0) {
      const auto [h, used] = parse_header(bytes);
      CHECK(used == bytes.size());
      CHECK(serialize_header(h) == bytes);
    } else if (name.rfind("packet_", 0) == 0) {
      CHECK(serialize_packet(parse_packet(bytes)) == bytes);
    } else {
      const auto frames = parse_frames(bytes);
      REQUIRE(frames.size() == 1);
      CHECK(serialize_frame(frames[0]) == bytes);
    }
  }
}

TEST_CASE("version field survives a round trip") {
  const auto h = QuicHeader::make_long(LongType::kHandshake, 5, 0x0A0A0A0A, 9);
  const Bytes b = serialize_header(h);
  REQUIRE(b.size() == 17);
  CHECK(b[9] == 0x0A);
  CHECK(b[12] == 0x0A);
  CHECK(parse_header(b).first.version == 0x0A0A0A0Au);
}

TEST_CASE("random headers round-trip") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const QuicHeader h = random_header(rng);
    const Bytes b = serialize_header(h);
    const auto [parsed, used] = parse_header(b);
    REQUIRE(parsed == h);
    REQUIRE(used == b.size());
    REQUIRE(b.size() == h.serialized_size());
    if (h.is_long()) {
      REQUIRE(b.size() == 17);
    } else {
      REQUIRE(b.size() >= 2);
      REQUIRE(b.size() <= 13);
    }
  }
}

TEST_CASE("random frame sequences round-trip and partition the payload") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10000; ++i) {
    std::vector<Frame> frames;
    const int n = 1 + static_cast<int>(rng() % 5);
    bool prev_padding = true;  // no padding first, so it cannot merge with anything
    for (int k = 0; k < n; ++k) {
      Frame f = random_frame(rng, !prev_padding);
      prev_padding = std::holds_alternative<PaddingFrame>(f);
      frames.push_back(std::move(f));
    }
    Bytes payload;
    std::size_t sizes = 0;
    for (const auto& f : frames) {
      serialize_frame(f, payload);
      sizes += frame_size(f);
    }
    REQUIRE(sizes == payload.size());
    REQUIRE(parse_frames(payload) == frames);
  }
}

TEST_CASE("random packets round-trip") {
  std::mt19937_64 rng(5);
  int checked = 0;
  while (checked < 2000) {
    QuicPacket p{random_header(rng), {random_frame(rng, false), random_frame(rng, false)}};
    if (p.serialized_size() > kMaxPacketSize) continue;
    const Bytes b = serialize_packet(p);
    REQUIRE(b.size() == p.serialized_size());
    REQUIRE(parse_packet(b) == p);
    ++checked;
  }
}

TEST_CASE("ACK blocks expand to the acknowledged set") {
  const AckFrame a{10, 0, 3, {AckBlock{2, 3}}};
  CHECK(expand_ack(a) == std::vector<std::uint64_t>{10, 9, 8, 5, 4, 3});
  CHECK(ack_ranges(a) == std::vector<PnRange>{{8, 10}, {3, 5}});

  // {1,2,3}: one block, no gaps.
  const std::set<std::uint64_t> in_order{1, 2, 3};
  const AckFrame b = make_ack_frame(runs(in_order), 0);
  CHECK(b.largest_acked == 3);
  CHECK(b.first_block_length == 3);
  CHECK(b.blocks.empty());

  // {1,2,5}: the gap covers {3,4}.
  const AckFrame c = make_ack_frame(runs({1, 2, 5}), 0);
  CHECK(c.largest_acked == 5);
  CHECK(c.first_block_length == 1);
  REQUIRE(c.blocks.size() == 1);
  CHECK(c.blocks[0] == AckBlock{2, 2});
}

TEST_CASE("random acknowledged sets survive compress, encode, parse, expand") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    std::set<std::uint64_t> pns;
    const std::uint64_t base = rng() % 1'000'000;
    const int n = 1 + static_cast<int>(rng() % 80);
    for (int k = 0; k < n; ++k) pns.insert(base + rng() % 300);
    const AckFrame f = make_ack_frame(runs(pns), 17);
    const auto parsed = parse_frames(serialize_frame(f));
    REQUIRE(parsed.size() == 1);
    const auto expanded = expand_ack(std::get<AckFrame>(parsed[0]));
    REQUIRE(std::set<std::uint64_t>(expanded.begin(), expanded.end()) == pns);
    REQUIRE(std::is_sorted(expanded.rbegin(), expanded.rend()));
  }
}

TEST_CASE("make_ack_frame keeps the highest ranges when capped") {
  std::set<std::uint64_t> pns;
  for (std::uint64_t k = 0; k < 10; ++k) pns.insert(k * 3);
  const AckFrame f = make_ack_frame(runs(pns), 0, 2);
  CHECK(f.blocks.size() == 2);
  CHECK(expand_ack(f) == std::vector<std::uint64_t>{27, 24, 21});
}

TEST_CASE("ack delay is the receive-to-send interval") {
  CHECK(ack_delay_encode(SimTime::millis(1000), SimTime::millis(1025)) == 25'000u);
  CHECK(ack_delay_encode(SimTime::millis(7), SimTime::millis(7)) == 0u);
  CHECK_THROWS_AS(ack_delay_encode(SimTime::millis(8), SimTime::millis(7)), std::logic_error);
  const AckFrame f{4, ack_delay_encode(SimTime::micros(10), SimTime::micros(2010)), 1, {}};
  CHECK(std::get<AckFrame>(parse_frames(serialize_frame(f))[0]).ack_delay_us == 2000u);
}

TEST_CASE("parse errors carry offsets") {
  CHECK_THROWS_AS(parse_header(Bytes{}), CodecError);
  // Unknown long type 0x05.
  Bytes bad_type = serialize_header(QuicHeader::make_long(LongType::kHandshake, 1, 1, 1));
  bad_type[0] = 0x85;
  CHECK_THROWS_AS(parse_header(bad_type), CodecError);
  // pn width code 3 is invalid.
  CHECK_THROWS_AS(parse_header(Bytes{0x43, 0, 0, 0, 0}), CodecError);
  // Truncated long header.
  const Bytes long_h = serialize_header(QuicHeader::make_long(LongType::kHandshake, 1, 1, 1));
  CHECK_THROWS_AS(parse_header(std::span(long_h).first(10)), CodecError);

  try {
    parse_frames(Bytes{0x04, 0, 0, 0, 0, 0, 0, 0, 1, 0x7F}, 20);
    FAIL("unknown frame type accepted");
  } catch (const CodecError& e) {
    CHECK(e.offset() == 29);
  }
  Bytes stream = serialize_frame(StreamFrame{1, 0, false, bytes_of("abcdef")});
  stream.pop_back();
  CHECK_THROWS_AS(parse_frames(stream), CodecError);
}

TEST_CASE("overlapping or malformed ACK blocks are rejected") {
  // gap 0 would merge two blocks.
  Bytes b = serialize_frame(AckFrame{10, 0, 3, {AckBlock{2, 3}}});
  b[17] = 0;  // low byte of the gap
  CHECK_THROWS_WITH_AS(parse_frames(b), doctest::Contains("ACK"), CodecError);
  // Blocks running below packet zero.
  CHECK_THROWS_AS(serialize_frame(AckFrame{3, 0, 2, {AckBlock{1, 5}}}), EncodeError);
  CHECK_THROWS_AS(serialize_frame(AckFrame{3, 0, 0, {}}), EncodeError);
}

TEST_CASE("packets need frames and must fit the maximum size") {
  CHECK_THROWS_AS(serialize_packet(QuicPacket{QuicHeader::make_short(std::nullopt, 1), {}}), EncodeError);
  StreamFrame big{1, 0, false, Bytes(kMaxPacketSize, 1)};
  CHECK_THROWS_AS(serialize_packet(QuicPacket{QuicHeader::make_short(std::nullopt, 1), {big}}), EncodeError);
  const Bytes header_only = serialize_header(QuicHeader::make_short(std::nullopt, 1));
  CHECK_THROWS_AS(parse_packet(header_only), CodecError);
}

TEST_CASE("padding runs parse as one no-op frame") {
  Bytes b(5, 0);
  serialize_frame(MaxDataFrame{1}, b);
  const auto frames = parse_frames(b);
  REQUIRE(frames.size() == 2);
  CHECK(std::get<PaddingFrame>(frames[0]).length == 5);
  CHECK_FALSE(is_ack_eliciting(frames[0]));
  CHECK_FALSE(is_ack_eliciting(AckFrame{1, 0, 1, {}}));
  CHECK(is_ack_eliciting(MaxDataFrame{1}));
}

TEST_CASE("PnRangeSet merges neighbours and trims low ranges") {
  PnRangeSet s;
  for (std::uint64_t pn : std::vector<std::uint64_t>{5, 1, 2, 9, 3}) CHECK(s.insert(pn));
  CHECK_FALSE(s.insert(2));
  CHECK(s.descending() == std::vector<PnRange>{{9, 9}, {5, 5}, {1, 3}});
  CHECK(s.insert(4));
  CHECK(s.descending() == std::vector<PnRange>{{9, 9}, {1, 5}});
  s.trim(1);
  CHECK(s.descending() == std::vector<PnRange>{{9, 9}});
  CHECK_FALSE(s.contains(3));
  CHECK(s.largest() == 9);
}
