#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "quicsim/buffers/socket_rx_buffer.hpp"
#include "quicsim/buffers/socket_tx_buffer.hpp"
#include "quicsim/buffers/stream_rx_buffer.hpp"
#include "quicsim/buffers/stream_tx_buffer.hpp"
#include "quicsim/errors.hpp"
#include "quicsim/wire/ack.hpp"

using namespace quicsim;
using wire::Bytes;

namespace {

Bytes fill(std::size_t n, std::uint8_t seed = 0) {
  Bytes b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(seed + i * 7);
  return b;
}

wire::StreamFrame stream_frame(std::uint32_t id, std::uint64_t off, std::size_t len) {
  return wire::StreamFrame{id, off, false, fill(len, static_cast<std::uint8_t>(off))};
}

const SocketTxBuffer::LossPredicate kReorder3 = [](const SocketTxItem& item, std::uint64_t largest) {
  return *item.packet_number + 3 <= largest;
};

const SocketTxBuffer::LossPredicate kNeverLost = [](const SocketTxItem&, std::uint64_t) { return false; };

std::vector<std::uint64_t> pns_of(const std::vector<SocketTxItem>& items) {
  std::vector<std::uint64_t> out;
  for (const auto& i : items) out.push_back(*i.packet_number);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

// ----------------------------------------------------------------- tx side

TEST_SUITE("quic-tx-buffer") {
  TEST_CASE("socket buffer rejects additions past capacity") {
    SocketTxBuffer tx(10'000);
    CHECK(tx.add(stream_frame(1, 0, 8'000 - wire::kStreamFrameOverhead), false));
    CHECK(tx.buffered_bytes() == 8'000);
    CHECK_FALSE(tx.add(stream_frame(1, 8'000, 3'000 - wire::kStreamFrameOverhead), false));
    CHECK(tx.buffered_bytes() == 8'000);
    CHECK(tx.add(stream_frame(1, 8'000, 2'000 - wire::kStreamFrameOverhead), false));
    CHECK(tx.free_space() == 0);

    SocketTxBuffer empty(10'000);
    CHECK(empty.add(stream_frame(1, 0, 1'000), false));
  }

  TEST_CASE("stream-0 frames leave before queued data") {
    SocketTxBuffer tx(100'000);
    REQUIRE(tx.add(stream_frame(1, 0, 500), false));
    REQUIRE(tx.add(stream_frame(0, 0, 64), true));
    const SocketTxItem* item = tx.next_packet(wire::kStreamFrameOverhead + 64, 1, SimTime(), 0);
    REQUIRE(item != nullptr);
    REQUIRE(item->frames.size() == 1);
    CHECK(std::get<wire::StreamFrame>(item->frames[0]).stream_id == 0);
  }

  TEST_CASE("large frames are split at the packet budget, keeping offsets") {
    SocketTxBuffer tx(100'000);
    REQUIRE(tx.add(stream_frame(1, 0, 3'000), false));
    // Budget counts the frame subheader: 1460 stream bytes plus 15.
    const SocketTxItem* p1 = tx.next_packet(1'460 + wire::kStreamFrameOverhead, 1, SimTime(), 0);
    REQUIRE(p1 != nullptr);
    const auto& f1 = std::get<wire::StreamFrame>(p1->frames.at(0));
    CHECK(f1.offset == 0);
    CHECK(f1.data.size() == 1'460);
    const Bytes whole = fill(3'000);
    CHECK(f1.data == Bytes(whole.begin(), whole.begin() + 1'460));
    const SocketTxItem* p2 = tx.next_packet(1'460 + wire::kStreamFrameOverhead, 2, SimTime(), 0);
    const auto& f2 = std::get<wire::StreamFrame>(p2->frames.at(0));
    CHECK(f2.offset == 1'460);
    CHECK(f2.data.size() == 1'460);
    const SocketTxItem* p3 = tx.next_packet(1'460 + wire::kStreamFrameOverhead, 3, SimTime(), 0);
    CHECK(std::get<wire::StreamFrame>(p3->frames.at(0)).offset == 2'920);
    CHECK(std::get<wire::StreamFrame>(p3->frames.at(0)).data.size() == 80);
    CHECK(tx.next_packet(1'460, 4, SimTime(), 0) == nullptr);
  }

  TEST_CASE("small frames share a packet") {
    SocketTxBuffer tx(100'000);
    tx.add(stream_frame(1, 0, 400), false);
    tx.add(stream_frame(2, 0, 400), false);
    const SocketTxItem* p = tx.next_packet(1'460, 1, SimTime(), 13);
    REQUIRE(p != nullptr);
    CHECK(p->frames.size() == 2);
    CHECK(p->payload_bytes == 2 * (400 + wire::kStreamFrameOverhead));
    CHECK(p->wire_bytes == p->payload_bytes + 13);
    CHECK(tx.bytes_in_flight() == p->wire_bytes);
  }

  TEST_CASE("ACK marks acked and reorder-lost packets") {
    SocketTxBuffer tx(100'000);
    for (std::uint64_t pn = 1; pn <= 10; ++pn) {
      tx.add(stream_frame(1, (pn - 1) * 100, 100), false);
      REQUIRE(tx.next_packet(1'460, pn, SimTime::millis(static_cast<std::int64_t>(pn)), 10) != nullptr);
    }
    const std::vector<wire::PnRange> acked{{8, 10}, {3, 5}};
    const AckOutcome out = tx.on_ack(acked, SimTime::millis(200), kReorder3);
    CHECK(pns_of(out.newly_acked) == std::vector<std::uint64_t>{3, 4, 5, 8, 9, 10});
    CHECK(pns_of(out.newly_lost) == std::vector<std::uint64_t>{1, 2, 6, 7});
    CHECK(out.largest_newly_acked_sent_at == SimTime::millis(10));
    CHECK(tx.bytes_in_flight() == 0);
    CHECK(tx.bytes_in_flight() == tx.recompute_bytes_in_flight());
    for (const auto& item : out.newly_acked) CHECK_FALSE(item.lost);
  }

  TEST_CASE("acknowledging everything empties the flight; duplicates change nothing") {
    SocketTxBuffer tx(100'000);
    for (std::uint64_t pn = 0; pn < 5; ++pn) {
      tx.add(stream_frame(1, pn * 10, 10), false);
      tx.next_packet(1'460, pn, SimTime(), 5);
    }
    const std::vector<wire::PnRange> all{{0, 4}};
    CHECK(tx.on_ack(all, SimTime::millis(1), kNeverLost).newly_acked.size() == 5);
    CHECK(tx.bytes_in_flight() == 0);
    CHECK(tx.buffered_bytes() == 0);
    const AckOutcome again = tx.on_ack(all, SimTime::millis(2), kNeverLost);
    CHECK(again.newly_acked.empty());
    CHECK(again.newly_lost.empty());
    CHECK(tx.bytes_in_flight() == 0);
  }

  TEST_CASE("ACK for an unsent packet number is a protocol error") {
    SocketTxBuffer tx(100'000);
    tx.add(stream_frame(1, 0, 10), false);
    tx.next_packet(1'460, 0, SimTime(), 5);
    const std::vector<wire::PnRange> bogus{{0, 3}};
    CHECK_THROWS_AS(tx.on_ack(bogus, SimTime(), kNeverLost), ProtocolError);
  }

  TEST_CASE("lost packets are re-queued and go out under fresh packet numbers") {
    SocketTxBuffer tx(100'000);
    for (std::uint64_t pn = 1; pn <= 6; ++pn) {
      tx.add(stream_frame(1, (pn - 1) * 100, 100), false);
      tx.next_packet(wire::kStreamFrameOverhead + 100, pn, SimTime(), 0);
    }
    CHECK(tx.prepare_retransmissions() == 0);
    const std::vector<wire::PnRange> acked{{5, 6}};
    const AckOutcome out = tx.on_ack(acked, SimTime(), kReorder3);
    CHECK(pns_of(out.newly_lost) == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(tx.prepare_retransmissions() == 3);
    CHECK(tx.bytes_in_flight() == wire::kStreamFrameOverhead + 100);  // pn 4
    const SocketTxItem* r1 = tx.next_packet(wire::kStreamFrameOverhead + 100, 7, SimTime(), 0);
    REQUIRE(r1 != nullptr);
    CHECK(*r1->packet_number == 7);
    CHECK(std::get<wire::StreamFrame>(r1->frames[0]).offset == 0);
    const SocketTxItem* r2 = tx.next_packet(wire::kStreamFrameOverhead + 100, 8, SimTime(), 0);
    CHECK(std::get<wire::StreamFrame>(r2->frames[0]).offset == 100);
    CHECK_THROWS_AS(tx.next_packet(1'460, 4, SimTime(), 0), std::logic_error);
  }

  TEST_CASE("stream buffer requeue restores bytes at their original offset") {
    StreamTxBuffer s(64 * 1024);
    CHECK(s.append(fill(800)) == 800);
    auto seg = s.issue(500);
    REQUIRE(seg);
    CHECK(seg->offset == 0);
    CHECK(seg->data.size() == 500);
    s.requeue(*seg);
    auto again = s.issue(500);
    REQUIRE(again);
    CHECK(again->offset == 0);
    CHECK(again->data == seg->data);
    s.requeue(std::move(*again));
    auto part = s.issue(200);
    CHECK(part->offset == 0);
    CHECK(part->data.size() == 200);
    s.requeue(StreamTxBuffer::Segment{});  // nothing to restore
    CHECK(s.lowest_unsent_offset() == 200);
  }

  TEST_CASE("socket-full requeue round trip through the stream buffer") {
    StreamTxBuffer stream(64 * 1024);
    SocketTxBuffer socket(1'000);
    stream.append(fill(3'000));
    std::vector<std::uint64_t> accepted_offsets;
    while (auto seg = stream.issue(600)) {
      const std::uint64_t off = seg->offset;
      if (!socket.add(wire::StreamFrame{1, off, seg->fin, seg->data}, false)) {
        stream.requeue(std::move(*seg));
        break;
      }
      accepted_offsets.push_back(off);
    }
    CHECK(accepted_offsets == std::vector<std::uint64_t>{0});
    CHECK(stream.lowest_unsent_offset() == 600);
    CHECK(stream.buffered_bytes() == 2'400);
    auto next = stream.issue(600);
    CHECK(next->offset == 600);
  }

  TEST_CASE("requeue overlapping live data is a logic error") {
    StreamTxBuffer s(1'000);
    s.append(fill(300));
    auto seg = s.issue(100);
    CHECK_THROWS_AS(s.requeue(StreamTxBuffer::Segment{50, fill(100), false}), std::logic_error);
    CHECK_THROWS_AS(s.requeue(StreamTxBuffer::Segment{250, fill(100), false}), std::logic_error);
    s.requeue(std::move(*seg));
  }

  TEST_CASE("stream buffer accepts up to its capacity") {
    StreamTxBuffer s(1'000);
    CHECK(s.append(fill(700)) == 700);
    CHECK(s.append(fill(700)) == 300);
    CHECK(s.append(fill(1)) == 0);
    CHECK(s.next_offset() == 1'000);
  }

  TEST_CASE("finish yields a FIN on the last segment or alone") {
    StreamTxBuffer s(1'000);
    s.append(fill(100));
    s.finish();
    auto seg = s.issue(1'000);
    CHECK(seg->fin);
    CHECK_FALSE(s.has_pending());

    StreamTxBuffer t(1'000);
    t.append(fill(100));
    auto data = t.issue(1'000);
    CHECK_FALSE(data->fin);
    t.finish();
    auto fin = t.issue(1'000);
    REQUIRE(fin);
    CHECK(fin->fin);
    CHECK(fin->offset == 100);
    CHECK(fin->data.empty());
  }

  TEST_CASE("random operations keep flight accounting and capacity exact") {
    std::mt19937_64 rng(3);
    SocketTxBuffer tx(20'000);
    std::uint64_t pn = 0;
    std::uint64_t offset = 0;
    std::set<std::uint64_t> sent_pns;
    for (int step = 0; step < 5'000; ++step) {
      switch (rng() % 4) {
        case 0: {
          const std::size_t len = 1 + rng() % 2'000;
          const std::size_t before = tx.buffered_bytes();
          const bool fits = before + len + wire::kStreamFrameOverhead <= tx.capacity();
          REQUIRE(tx.add(stream_frame(static_cast<std::uint32_t>(1 + rng() % 3), offset, len), rng() % 5 == 0) == fits);
          if (fits) {
            REQUIRE(tx.buffered_bytes() == before + len + wire::kStreamFrameOverhead);
            offset += len;
          }
          break;
        }
        case 1:
          if (tx.next_packet(100 + rng() % 1'400, pn, SimTime::micros(step), 13)) sent_pns.insert(pn++);
          break;
        case 2: {
          if (pn == 0) break;
          const std::uint64_t hi = rng() % pn;
          const std::uint64_t lo = hi - std::min<std::uint64_t>(hi, rng() % 5);
          const std::vector<wire::PnRange> r{{lo, hi}};
          tx.on_ack(r, SimTime::micros(step), kReorder3);
          break;
        }
        default:
          tx.prepare_retransmissions();
          break;
      }
      REQUIRE(tx.bytes_in_flight() == tx.recompute_bytes_in_flight());
      std::uint64_t prev = 0;
      bool first = true;
      for (const auto& item : tx.sent()) {
        REQUIRE((first || *item.packet_number > prev));
        REQUIRE_FALSE((item.acked && item.lost));
        prev = *item.packet_number;
        first = false;
      }
    }
  }
}

// ----------------------------------------------------------------- rx side

TEST_SUITE("quic-rx-buffer") {
  TEST_CASE("in-order data is released, gaps hold later bytes back") {
    StreamRxBuffer rx(64 * 1024);
    const Bytes data = fill(1'500);
    CHECK(rx.insert(0, std::span(data).first(500), false).size() == 500);
    CHECK(rx.insert(1'000, std::span(data).subspan(1'000, 500), false).empty());
    CHECK(rx.buffered_bytes() == 500);
    const Bytes released = rx.insert(500, std::span(data).subspan(500, 500), false);
    CHECK(released == Bytes(data.begin() + 500, data.end()));
    CHECK(rx.next_expected_offset() == 1'500);
    CHECK(rx.buffered_bytes() == 0);
  }

  TEST_CASE("duplicates release nothing and change nothing") {
    StreamRxBuffer rx(64 * 1024);
    const Bytes data = fill(500);
    rx.insert(0, data, false);
    CHECK(rx.insert(0, data, false).empty());
    CHECK(rx.next_expected_offset() == 500);
    CHECK(rx.buffered_bytes() == 0);
  }

  TEST_CASE("overlaps keep the first bytes received") {
    StreamRxBuffer rx(64 * 1024);
    rx.insert(10, Bytes(10, 0xAA), false);
    const Bytes out = rx.insert(0, Bytes(30, 0xBB), false);
    REQUIRE(out.size() == 30);
    CHECK(out[5] == 0xBB);
    CHECK(out[15] == 0xAA);
    CHECK(out[25] == 0xBB);
  }

  TEST_CASE("FIN fixes the stream length") {
    StreamRxBuffer rx(64 * 1024);
    rx.insert(0, fill(100), true);
    CHECK(rx.total_length() == 100u);
    CHECK(rx.complete());

    StreamRxBuffer gap(64 * 1024);
    gap.insert(50, fill(50), true);
    CHECK(gap.fin_offset() == 100u);
    CHECK_FALSE(gap.complete());
    gap.insert(0, fill(50), false);
    CHECK(gap.total_length() == 100u);
  }

  TEST_CASE("FIN-only segment after data completes the stream") {
    StreamRxBuffer rx(64 * 1024);
    rx.insert(0, fill(40), false);
    CHECK_FALSE(rx.complete());
    rx.insert(40, {}, true);
    CHECK(rx.total_length() == 40u);
  }

  TEST_CASE("data beyond the final offset is a protocol error") {
    StreamRxBuffer rx(64 * 1024);
    rx.insert(0, fill(100), true);
    CHECK_THROWS_AS(rx.insert(100, fill(1), false), ProtocolError);
    CHECK_THROWS_AS(rx.insert(0, fill(120), true), ProtocolError);
    StreamRxBuffer low(64 * 1024);
    low.insert(0, fill(100), false);
    CHECK_THROWS_AS(low.insert(0, fill(50), true), ProtocolError);
  }

  TEST_CASE("out-of-order bytes beyond capacity are refused") {
    StreamRxBuffer rx(1'000);
    rx.insert(1, fill(1'000), false);
    CHECK_THROWS_AS(rx.insert(2'000, fill(1), false), ProtocolError);
  }

  TEST_CASE("random arrival order always releases a prefix of the stream") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t total = 1 + rng() % 20'000;
      const Bytes stream = fill(total, static_cast<std::uint8_t>(trial));
      std::vector<std::pair<std::uint64_t, std::size_t>> pieces;
      for (std::size_t off = 0; off < total;) {
        const std::size_t len = std::min<std::size_t>(total - off, 1 + rng() % 1'500);
        pieces.emplace_back(off, len);
        off += len;
      }
      // Shuffle and duplicate some pieces.
      const std::size_t n = pieces.size();
      for (std::size_t i = 0; i < n / 3; ++i) pieces.push_back(pieces[rng() % n]);
      std::shuffle(pieces.begin(), pieces.end(), rng);
      StreamRxBuffer rx(64 * 1024);
      Bytes out;
      for (const auto& [off, len] : pieces) {
        const bool fin = off + len == total;
        const Bytes rel = rx.insert(off, std::span(stream).subspan(off, len), fin);
        out.insert(out.end(), rel.begin(), rel.end());
        REQUIRE(out.size() == rx.next_expected_offset());
        REQUIRE(std::equal(out.begin(), out.end(), stream.begin()));
      }
      REQUIRE(out == stream);
      REQUIRE(rx.total_length() == total);
    }
  }

  TEST_CASE("socket receive buffer is a bounded FIFO") {
    SocketRxBuffer rx(100);
    CHECK(rx.push({1, fill(60), false}));
    CHECK_FALSE(rx.push({2, fill(50), false}));
    CHECK(rx.push({2, fill(40), true}));
    CHECK(rx.size() == 100);
    auto a = rx.pop();
    CHECK(a->stream_id == 1);
    auto b = rx.pop();
    CHECK(b->stream_id == 2);
    CHECK(b->fin);
    CHECK_FALSE(rx.pop());
    CHECK(rx.size() == 0);
  }
}
