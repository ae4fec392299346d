#include "quicsim/transport/l4.hpp"

#include "quicsim/wire/packet.hpp"

namespace quicsim::transport {

QuicL4::QuicL4(Network& net, NodeId node) : net_(net), node_(node) {}

QuicL4::~QuicL4() {
  for (const auto& [port, b] : bindings_) net_.unbind(Address{node_, port});
}

std::shared_ptr<QuicSocket> QuicL4::create_socket(SocketConfig cfg, SocketRole role) {
  if (role == SocketRole::kServerForked) throw UsageError("forked sockets are created by listeners");
  return std::make_shared<QuicSocket>(*this, std::move(cfg), role);
}

std::optional<std::uint64_t> QuicL4::previous_connection_id(NodeId peer) const {
  auto it = registry_.find(peer);
  if (it == registry_.end()) return std::nullopt;
  return it->second;
}

std::size_t QuicL4::connection_count() const {
  std::size_t n = 0;
  for (const auto& [port, b] : bindings_) n += b.connections.size();
  return n;
}

std::vector<std::shared_ptr<QuicSocket>> QuicL4::forked_sockets(std::uint16_t port) const {
  std::vector<std::shared_ptr<QuicSocket>> out;
  auto it = bindings_.find(port);
  if (it == bindings_.end()) return out;
  for (const auto& [addr, s] : it->second.connections) {
    if (s->role() == SocketRole::kServerForked) out.push_back(s);
  }
  return out;
}

void QuicL4::open_port(std::uint16_t port) {
  net_.bind(Address{node_, port}, [this, port](const Datagram& d) { on_datagram(port, d); });
}

void QuicL4::bind_listener(std::shared_ptr<QuicSocket> s, std::uint16_t port) {
  if (net_.is_bound(Address{node_, port})) throw UsageError("port already in use");
  open_port(port);
  s->bind_addresses(Address{node_, port}, Address{});
  bindings_[port].listener = std::move(s);
}

Address QuicL4::bind_client(std::shared_ptr<QuicSocket> s, Address remote) {
  const std::uint16_t port = net_.ephemeral_port(node_);
  open_port(port);
  const Address local{node_, port};
  s->bind_addresses(local, remote);
  bindings_[port].connections.emplace(remote, std::move(s));
  return local;
}

std::shared_ptr<QuicSocket> QuicL4::fork(QuicSocket& listener, Address remote) {
  const std::uint16_t port = listener.local_address().port;
  auto child = std::make_shared<QuicSocket>(*this, listener.config(), SocketRole::kServerForked);
  child->bind_addresses(listener.local_address(), remote);
  bindings_.at(port).connections[remote] = child;
  return child;
}

void QuicL4::remove_socket(QuicSocket& s) {
  const std::uint16_t port = s.local_address().port;
  auto it = bindings_.find(port);
  if (it == bindings_.end()) return;
  Binding& b = it->second;
  if (b.listener.get() == &s) {
    graveyard_.push_back(std::move(b.listener));
  } else {
    auto c = b.connections.find(s.peer_address());
    if (c == b.connections.end() || c->second.get() != &s) return;
    graveyard_.push_back(std::move(c->second));
    b.connections.erase(c);
  }
  if (!b.listener && b.connections.empty()) {
    net_.unbind(Address{node_, port});
    bindings_.erase(it);
  }
}

void QuicL4::on_datagram(std::uint16_t port, const Datagram& d) {
  graveyard_.clear();
  ++counters_.datagrams_received;
  wire::QuicPacket p;
  try {
    p = wire::parse_packet(d.payload);
  } catch (const wire::CodecError&) {
    ++counters_.parse_errors;
    return;
  }
  auto it = bindings_.find(port);
  if (it == bindings_.end()) {
    ++counters_.unroutable;
    return;
  }
  Binding& b = it->second;
  auto c = b.connections.find(d.src);
  if (c != b.connections.end()) {
    std::shared_ptr<QuicSocket> keep = c->second;
    keep->on_packet(p, d);
    return;
  }
  if (b.listener) {
    std::shared_ptr<QuicSocket> keep = b.listener;
    keep->on_packet(p, d);
    return;
  }
  ++counters_.unroutable;
}

}  // namespace quicsim::transport
