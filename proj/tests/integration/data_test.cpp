#include "doctest.h"
#include "scenarios.hpp"

using namespace quicsim;
using namespace quicsim::testing;

TEST_CASE("lossless multi-stream transfer delivers every byte in order") {
  Pair p;
  for (std::uint32_t s = 1; s <= 4; ++s) p.queue(s, pattern(300'000 + s, s));
  p.connect();
  p.sim.run_until(SimTime::seconds(10));
  ScenarioResult r;
  for (std::uint32_t s = 1; s <= 4; ++s) {
    CHECK(p.received[s] == p.outgoing[s]);
    CHECK(p.fins.count(s));
  }
  check_connection(*p.client, p.client_sent, "client", r);
  check_connection(*p.server(), p.server_sent, "server", r);
  CHECK_MESSAGE(r.ok, r.failure);
  CHECK(p.client->stats().retransmitted_packets == 0);
}

TEST_CASE("randomized scripted-loss scenarios deliver intact data") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ScenarioResult r = run_loss_scenario(seed);
    CHECK_MESSAGE(r.ok, r.failure);
  }
}

TEST_CASE("a loss on stream 1 does not delay stream 2") {
  const HolRun base = run_hol(false);
  const HolRun lossy = run_hol(true);
  REQUIRE(base.complete);
  REQUIRE(lossy.complete);
  REQUIRE(lossy.dropped == 1);
  const auto b2 = stream_deliveries(base.deliveries, 2);
  const auto l2 = stream_deliveries(lossy.deliveries, 2);
  REQUIRE(b2.size() == l2.size());
  for (std::size_t i = 0; i < b2.size(); ++i) {
    CHECK(std::abs((b2[i].at - l2[i].at).ticks()) <= 1);
    CHECK(b2[i].offset == l2[i].offset);
  }
  // Stream 1 completes later, after its retransmission.
  const auto b1 = stream_deliveries(base.deliveries, 1);
  const auto l1 = stream_deliveries(lossy.deliveries, 1);
  CHECK(l1.back().at > b1.back().at);
  CHECK(l1.back().at > l2.back().at);
}

TEST_CASE("retransmissions reuse no packet number") {
  Pair p;
  p.queue(1, pattern(50'000, 1));
  int n = 0;
  p.set_loss([&](const wire::QuicPacket& pkt, const Datagram&) { return carries_stream(pkt, 1) && ++n % 7 == 0; });
  p.connect();
  p.sim.run_until(SimTime::seconds(20));
  CHECK(p.received[1] == p.outgoing[1]);
  CHECK(p.client->stats().retransmitted_packets > 0);
  CHECK(dense_packet_numbers(p.client_sent));
  CHECK(dense_packet_numbers(p.server_sent));
}

TEST_CASE("receiver generates selective ACKs covering gaps") {
  Pair p;
  p.queue(1, pattern(20'000, 1));
  bool dropped = false;
  p.set_loss([&](const wire::QuicPacket& pkt, const Datagram&) {
    if (!dropped && carries_stream(pkt, 1) && pkt.header.packet_number >= 3) {
      dropped = true;
      return true;
    }
    return false;
  });
  p.connect();
  p.sim.run_until(SimTime::seconds(5));
  REQUIRE(dropped);
  bool saw_gap = false;
  for (const auto& s : p.server_sent) {
    for (const auto& f : s.frames) {
      if (const auto* a = std::get_if<wire::AckFrame>(&f)) saw_gap |= !a->blocks.empty();
    }
  }
  CHECK(saw_gap);
  CHECK(p.received[1] == p.outgoing[1]);
}

TEST_CASE("ACK delay reflects the delayed-ACK timer") {
  Pair p;
  p.queue(1, pattern(100, 1));
  p.connect();
  p.sim.run_until(SimTime::seconds(1));
  bool found = false;
  for (const auto& s : p.server_sent) {
    for (const auto& f : s.frames) {
      if (const auto* a = std::get_if<wire::AckFrame>(&f); a && s.frames.size() == 1) {
        CHECK(a->ack_delay_us <= 1'000);
        found = true;
      }
    }
  }
  CHECK(found);
}

TEST_CASE("sender never exceeds stream or connection credit") {
  PairConfig cfg;
  cfg.socket.params.max_stream_data = 8 * 1024;
  cfg.socket.params.max_data = 12 * 1024;
  cfg.socket.stream_rcv_buf = 8 * 1024;
  cfg.socket.socket_rcv_buf = 12 * 1024;
  Pair p(cfg);
  for (std::uint32_t s = 1; s <= 3; ++s) p.queue(s, pattern(100'000, s));
  p.connect();
  // The receiver application reads slowly: one chunk every 50 ms.
  p.listener->set_accept_callback([&](std::shared_ptr<transport::QuicSocket> s) {
    p.accepted.push_back(s);
    s->set_packet_observer([&, raw = s.get()](const wire::QuicPacket& pkt, SimTime at) {
      p.server_sent.push_back(SentPacket{at, pkt.header.packet_number, raw->state(), pkt.frames});
    });
  });
  auto reader = std::make_shared<Timer>(p.sim);
  std::function<void()> read = [&] {
    if (auto s = p.server()) {
      if (auto c = s->recv()) {
        auto& got = p.received[c->stream_id];
        got.insert(got.end(), c->data.begin(), c->data.end());
      }
    }
    reader->arm(p.sim.now() + SimTime::millis(5), [&] { read(); });
  };
  read();
  std::map<std::uint32_t, std::uint64_t> max_end;
  p.client->set_packet_observer([&](const wire::QuicPacket& pkt, SimTime at) {
    p.client_sent.push_back(SentPacket{at, pkt.header.packet_number, p.client->state(), pkt.frames});
    for (const auto& f : pkt.frames) {
      if (const auto* s = std::get_if<wire::StreamFrame>(&f); s && s->stream_id != 0) {
        max_end[s->stream_id] = std::max(max_end[s->stream_id], s->end());
        const auto* st = p.client->streams().find(s->stream_id);
        REQUIRE(st != nullptr);
        REQUIRE(s->end() <= st->send_credit());
      }
    }
    REQUIRE(p.client->streams().connection_bytes_sent() <= p.client->streams().peer_max_data());
  });
  p.sim.run_until(SimTime::seconds(120));
  reader->cancel();
  for (std::uint32_t s = 1; s <= 3; ++s) CHECK(p.received[s] == p.outgoing[s]);
  ScenarioResult r;
  check_connection(*p.server(), p.server_sent, "server", r);
  CHECK_MESSAGE(r.ok, r.failure);
}
