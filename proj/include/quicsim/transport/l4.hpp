#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "quicsim/sim/network.hpp"
#include "quicsim/transport/socket.hpp"

namespace quicsim::transport {

struct L4Counters {
  std::uint64_t datagrams_received = 0;
  std::uint64_t parse_errors = 0;
  std::uint64_t unroutable = 0;
};

/// Per-node QUIC endpoint layer: owns the UDP bindings, demultiplexes
/// datagrams to connection sockets by remote address, forks server
/// connections and remembers authenticated peers for 0-RTT.
class QuicL4 {
 public:
  QuicL4(Network& net, NodeId node);
  ~QuicL4();
  QuicL4(const QuicL4&) = delete;
  QuicL4& operator=(const QuicL4&) = delete;

  std::shared_ptr<QuicSocket> create_socket(SocketConfig cfg, SocketRole role = SocketRole::kClient);

  Simulator& sim() { return net_.sim(); }
  Network& network() { return net_; }
  NodeId node() const { return node_; }

  void set_force_0rtt(bool on) { force_0rtt_ = on; }
  bool force_0rtt() const { return force_0rtt_; }
  bool is_authenticated(NodeId peer) const { return registry_.count(peer) > 0; }
  bool zero_rtt_allowed(NodeId peer) const { return force_0rtt_ || is_authenticated(peer); }
  std::optional<std::uint64_t> previous_connection_id(NodeId peer) const;
  void authenticate(NodeId peer, std::uint64_t connection_id) { registry_[peer] = connection_id; }

  bool port_bound(std::uint16_t port) const { return bindings_.count(port) > 0; }
  std::size_t connection_count() const;
  std::vector<std::shared_ptr<QuicSocket>> forked_sockets(std::uint16_t port) const;
  const L4Counters& counters() const { return counters_; }

  // Socket-facing.
  void bind_listener(std::shared_ptr<QuicSocket> s, std::uint16_t port);
  Address bind_client(std::shared_ptr<QuicSocket> s, Address remote);
  std::shared_ptr<QuicSocket> fork(QuicSocket& listener, Address remote);
  void remove_socket(QuicSocket& s);
  void send(Datagram d) { net_.send(std::move(d)); }

 private:
  struct Binding {
    std::shared_ptr<QuicSocket> listener;
    std::map<Address, std::shared_ptr<QuicSocket>> connections;
  };

  void open_port(std::uint16_t port);
  void on_datagram(std::uint16_t port, const Datagram& d);

  Network& net_;
  NodeId node_;
  bool force_0rtt_ = false;
  std::map<NodeId, std::uint64_t> registry_;
  std::map<std::uint16_t, Binding> bindings_;
  // Removed sockets stay alive until the next event so callers up the
  // stack can finish unwinding.
  std::vector<std::shared_ptr<QuicSocket>> graveyard_;
  L4Counters counters_;
};

}  // namespace quicsim::transport
