#include "quicsim/sim/dumbbell.hpp"

#include <tuple>

namespace quicsim {

std::uint64_t TopologyConfig::bdp_bytes() const {
  return bottleneck_rate_bps * static_cast<std::uint64_t>(min_rtt().ticks()) / 8'000'000;
}

std::size_t TopologyConfig::effective_bottleneck_queue() const {
  if (bottleneck_queue != 0) return bottleneck_queue;
  const std::uint64_t bdp = bdp_bytes();
  return static_cast<std::size_t>((bdp + max_packet_size - 1) / max_packet_size);
}

void TopologyConfig::validate() const {
  if (pairs == 0) throw ConfigError("topology needs at least one client/server pair");
  if (bottleneck_rate_bps == 0 || access_rate_bps == 0) throw ConfigError("link rates must be positive");
  if (bottleneck_delay < SimTime() || access_delay < SimTime()) {
    throw ConfigError("link delays must be non-negative");
  }
  if (access_queue == 0) throw ConfigError("access queue must hold at least one packet");
  if (effective_bottleneck_queue() == 0) throw ConfigError("bottleneck queue must hold at least one packet");
}

Dumbbell build_dumbbell(Network& net, const TopologyConfig& cfg) {
  cfg.validate();
  Dumbbell d;
  for (std::size_t i = 0; i < cfg.pairs; ++i) d.clients.push_back(net.add_node("client" + std::to_string(i)));
  d.left_router = net.add_node("left");
  d.right_router = net.add_node("right");
  for (std::size_t i = 0; i < cfg.pairs; ++i) d.servers.push_back(net.add_node("server" + std::to_string(i)));

  const LinkConfig access{cfg.access_rate_bps, cfg.access_delay, cfg.access_queue};
  const LinkConfig bottleneck{cfg.bottleneck_rate_bps, cfg.bottleneck_delay, cfg.effective_bottleneck_queue()};
  std::tie(d.bottleneck_forward, d.bottleneck_reverse) = net.add_duplex_link(d.left_router, d.right_router, bottleneck);

  for (std::size_t i = 0; i < cfg.pairs; ++i) {
    const auto [c_up, c_down] = net.add_duplex_link(d.clients[i], d.left_router, access);
    const auto [s_down, s_up] = net.add_duplex_link(d.right_router, d.servers[i], access);
    for (std::size_t j = 0; j < cfg.pairs; ++j) {
      net.add_route(d.clients[i], d.servers[j], c_up);
      net.add_route(d.servers[i], d.clients[j], s_up);
      net.add_route(d.left_router, d.servers[j], d.bottleneck_forward);
      net.add_route(d.right_router, d.clients[j], d.bottleneck_reverse);
    }
    net.add_route(d.left_router, d.clients[i], c_down);
    net.add_route(d.right_router, d.servers[i], s_down);
  }
  return d;
}

}  // namespace quicsim
