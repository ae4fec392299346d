#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "quicsim/sim/sim_time.hpp"
#include "quicsim/sim/simulator.hpp"

namespace quicsim {

/// Invalid topology or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

inline constexpr std::size_t kMtuPayload = 1500;

struct Address {
  NodeId node = 0;
  std::uint16_t port = 0;
  auto operator<=>(const Address&) const = default;
};

struct Datagram {
  Address src;
  Address dst;
  std::vector<std::uint8_t> payload;
};

struct LinkConfig {
  std::uint64_t rate_bps = 0;
  SimTime delay;
  std::size_t queue_capacity = 100;  // packets, including the one on the wire
};

struct LinkStats {
  std::uint64_t enqueued = 0;
  std::uint64_t dropped = 0;  // queue overflow
  std::uint64_t lost = 0;     // discarded by the drop filter after serialization
  std::uint64_t departed = 0;
  std::uint64_t bytes_departed = 0;
  std::size_t max_occupancy = 0;
};

class Network;

/// Unidirectional point-to-point channel with a drop-tail FIFO in front of
/// the transmitter.
class Link {
 public:
  Link(Network& net, LinkId id, NodeId from, NodeId to, LinkConfig cfg);

  LinkId id() const { return id_; }
  NodeId from() const { return from_; }
  NodeId to() const { return to_; }
  const LinkConfig& config() const { return cfg_; }
  const LinkStats& stats() const { return stats_; }
  std::size_t queue_length() const { return queue_.size(); }
  std::size_t propagating() const { return propagating_; }

  /// Drop-tail enqueue. Returns false when the datagram was dropped.
  bool transmit(Datagram d);

 private:
  void start_transmission();
  void finish_transmission();

  Network& net_;
  LinkId id_;
  NodeId from_;
  NodeId to_;
  LinkConfig cfg_;
  std::deque<Datagram> queue_;
  bool busy_ = false;
  std::size_t propagating_ = 0;
  LinkStats stats_;
};

struct NetworkCounters {
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
};

/// Nodes, static routes and links. Datagrams are forwarded hop by hop along
/// the configured routes and handed to the handler bound on the destination
/// port.
class Network {
 public:
  using Handler = std::function<void(const Datagram&)>;
  /// Returns true to lose the datagram once `link` has serialized it.
  using DropFilter = std::function<bool(const Datagram&, const Link&)>;

  explicit Network(Simulator& sim) : sim_(sim) {}
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  Simulator& sim() { return sim_; }

  NodeId add_node(std::string name = {});
  LinkId add_link(NodeId from, NodeId to, LinkConfig cfg);
  /// Two links, one per direction, with identical configuration.
  std::pair<LinkId, LinkId> add_duplex_link(NodeId a, NodeId b, LinkConfig cfg);
  /// Datagrams at `at` headed for `dst` leave on `link`.
  void add_route(NodeId at, NodeId dst, LinkId link);

  void bind(Address addr, Handler handler);
  void unbind(Address addr);
  bool is_bound(Address addr) const { return handlers_.count(addr) > 0; }
  /// Lowest free port >= 49152 on `node`.
  std::uint16_t ephemeral_port(NodeId node) const;

  void send(Datagram d);

  void set_drop_filter(DropFilter f) { drop_filter_ = std::move(f); }

  std::size_t node_count() const { return node_names_.size(); }
  const std::string& node_name(NodeId n) const { return node_names_.at(n); }
  Link& link(LinkId id) { return *links_.at(id); }
  const Link& link(LinkId id) const { return *links_.at(id); }
  std::size_t link_count() const { return links_.size(); }

  const NetworkCounters& counters() const { return counters_; }
  /// Datagrams queued or propagating on any link, recounted from the links.
  std::uint64_t in_flight() const;
  /// injected == delivered + dropped + in_flight.
  bool conserved() const;

 private:
  friend class Link;
  void forward(NodeId at, Datagram d);
  void on_drop() { ++counters_.dropped; }
  void arrive(NodeId at, Datagram d);

  Simulator& sim_;
  std::vector<std::string> node_names_;
  std::vector<std::unique_ptr<Link>> links_;
  std::map<std::pair<NodeId, NodeId>, LinkId> routes_;
  std::map<Address, Handler> handlers_;
  DropFilter drop_filter_;
  NetworkCounters counters_;
};

}  // namespace quicsim
