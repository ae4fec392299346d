#pragma once

#include <cstdint>
#include <vector>

#include "quicsim/sim/network.hpp"

namespace quicsim {

/// N senders and N receivers joined through one shared bottleneck:
///
///   client_i --access-- left --bottleneck-- right --access-- server_i
struct TopologyConfig {
  std::size_t pairs = 2;
  std::uint64_t bottleneck_rate_bps = 2'000'000;
  SimTime bottleneck_delay = SimTime::millis(46);
  std::uint64_t access_rate_bps = 100'000'000;
  SimTime access_delay = SimTime::millis(2);
  /// Bottleneck queue in packets; 0 selects one BDP of max-size packets.
  std::size_t bottleneck_queue = 0;
  std::size_t access_queue = 1000;
  std::size_t max_packet_size = 1460;

  /// Twice the sum of one-way propagation delays along a flow's path.
  SimTime min_rtt() const { return (access_delay * 2 + bottleneck_delay) * 2; }
  std::uint64_t bdp_bytes() const;
  std::size_t effective_bottleneck_queue() const;
  void validate() const;
};

struct Dumbbell {
  std::vector<NodeId> clients;
  std::vector<NodeId> servers;
  NodeId left_router = 0;
  NodeId right_router = 0;
  LinkId bottleneck_forward = 0;  // left -> right
  LinkId bottleneck_reverse = 0;  // right -> left
};

Dumbbell build_dumbbell(Network& net, const TopologyConfig& cfg);

}  // namespace quicsim
