#pragma once

#include <optional>
#include <random>
#include <set>
#include <vector>

#include "quicsim/wire/ack.hpp"
#include "quicsim/wire/frame.hpp"
#include "quicsim/wire/header.hpp"

namespace quicsim::testing {

using namespace quicsim::wire;

// Brute-force oracle: contiguous runs of a packet-number set, highest first.
inline std::vector<PnRange> runs(const std::set<std::uint64_t>& pns) {
  std::vector<PnRange> out;
  for (auto it = pns.rbegin(); it != pns.rend(); ++it) {
    if (!out.empty() && out.back().low == *it + 1) {
      out.back().low = *it;
    } else {
      out.push_back(PnRange{*it, *it});
    }
  }
  return out;
}

inline QuicHeader random_header(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::uint64_t> pn_dist(0, kMaxPacketNumber);
  std::uniform_int_distribution<int> width(0, 2);
  std::uint64_t pn = pn_dist(rng);
  if (width(rng) == 0) pn &= 0xFF;
  else if (width(rng) == 1) pn &= 0xFFFF;
  if (coin(rng)) {
    const LongType types[] = {LongType::kVersionNegotiation, LongType::kClientInitial, LongType::kHandshake,
                              LongType::kZeroRttProtected};
    return QuicHeader::make_long(types[rng() % 4], rng(), static_cast<std::uint32_t>(rng()), pn);
  }
  return QuicHeader::make_short(coin(rng) ? std::optional<std::uint64_t>(rng()) : std::nullopt, pn);
}

inline AckFrame random_ack(std::mt19937_64& rng) {
  std::set<std::uint64_t> pns;
  const std::uint64_t base = rng() % 100000;
  const int n = 1 + static_cast<int>(rng() % 60);
  for (int i = 0; i < n; ++i) pns.insert(base + rng() % 200);
  const auto r = runs(pns);
  return make_ack_frame(r, static_cast<std::uint32_t>(rng()));
}

inline Frame random_frame(std::mt19937_64& rng, bool allow_padding) {
  switch (rng() % (allow_padding ? 7 : 6)) {
    case 0: {
      StreamFrame s;
      s.stream_id = static_cast<std::uint32_t>(rng() % 9);
      s.offset = rng() >> 8;
      s.fin = rng() % 2;
      s.data.resize(rng() % 300);
      for (auto& b : s.data) b = static_cast<std::uint8_t>(rng());
      return s;
    }
    case 1:
      return random_ack(rng);
    case 2: {
      VersionNegotiationFrame v;
      v.versions.resize(1 + rng() % 5);
      for (auto& x : v.versions) x = static_cast<std::uint32_t>(rng());
      return v;
    }
    case 3: {
      ConnectionCloseFrame c;
      c.error_code = static_cast<std::uint16_t>(rng());
      c.reason.resize(rng() % 40);
      for (auto& ch : c.reason) ch = static_cast<char>('a' + rng() % 26);
      return c;
    }
    case 4:
      return MaxDataFrame{rng()};
    case 5:
      return MaxStreamDataFrame{static_cast<std::uint32_t>(rng()), rng()};
    default:
      return PaddingFrame{1 + rng() % 20};
  }
}

}  // namespace quicsim::testing
