#include "quicsim/sim/network.hpp"

#include <algorithm>

namespace quicsim {

Link::Link(Network& net, LinkId id, NodeId from, NodeId to, LinkConfig cfg)
    : net_(net), id_(id), from_(from), to_(to), cfg_(cfg) {}

bool Link::transmit(Datagram d) {
  if (queue_.size() >= cfg_.queue_capacity) {
    ++stats_.dropped;
    net_.on_drop();
    return false;
  }
  queue_.push_back(std::move(d));
  ++stats_.enqueued;
  stats_.max_occupancy = std::max(stats_.max_occupancy, queue_.size());
  if (!busy_) start_transmission();
  return true;
}

void Link::start_transmission() {
  busy_ = true;
  const SimTime tx = serialization_time(queue_.front().payload.size(), cfg_.rate_bps);
  net_.sim_.schedule_in(tx, [this] { finish_transmission(); });
}

void Link::finish_transmission() {
  Datagram d = std::move(queue_.front());
  queue_.pop_front();
  ++stats_.departed;
  stats_.bytes_departed += d.payload.size();
  if (net_.drop_filter_ && net_.drop_filter_(d, *this)) {
    // Lost on the wire: the link stays busy for the serialization time.
    ++stats_.lost;
    net_.on_drop();
    busy_ = false;
    if (!queue_.empty()) start_transmission();
    return;
  }
  ++propagating_;
  net_.sim_.schedule_in(cfg_.delay, [this, d = std::move(d)]() mutable {
    --propagating_;
    net_.arrive(to_, std::move(d));
  });
  busy_ = false;
  if (!queue_.empty()) start_transmission();
}

NodeId Network::add_node(std::string name) {
  const auto id = static_cast<NodeId>(node_names_.size());
  if (name.empty()) name = "n" + std::to_string(id);
  node_names_.push_back(std::move(name));
  return id;
}

LinkId Network::add_link(NodeId from, NodeId to, LinkConfig cfg) {
  if (from >= node_count() || to >= node_count()) throw ConfigError("link endpoint is not a node");
  if (cfg.rate_bps == 0) throw ConfigError("link rate must be positive");
  if (cfg.delay < SimTime()) throw ConfigError("link delay must be non-negative");
  if (cfg.queue_capacity == 0) throw ConfigError("link queue capacity must be positive");
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back(std::make_unique<Link>(*this, id, from, to, cfg));
  return id;
}

std::pair<LinkId, LinkId> Network::add_duplex_link(NodeId a, NodeId b, LinkConfig cfg) {
  return {add_link(a, b, cfg), add_link(b, a, cfg)};
}

void Network::add_route(NodeId at, NodeId dst, LinkId link) {
  if (links_.at(link)->from() != at) throw ConfigError("route link does not start at node");
  routes_[{at, dst}] = link;
}

void Network::bind(Address addr, Handler handler) {
  if (!handlers_.emplace(addr, std::move(handler)).second) {
    throw std::logic_error("address already bound");
  }
}

void Network::unbind(Address addr) { handlers_.erase(addr); }

std::uint16_t Network::ephemeral_port(NodeId node) const {
  for (std::uint32_t p = 49152; p <= 65535; ++p) {
    if (!is_bound(Address{node, static_cast<std::uint16_t>(p)})) return static_cast<std::uint16_t>(p);
  }
  throw std::runtime_error("no free ephemeral port");
}

void Network::send(Datagram d) {
  ++counters_.injected;
  const NodeId at = d.src.node;
  forward(at, std::move(d));
}

void Network::forward(NodeId at, Datagram d) {
  if (at == d.dst.node) {
    arrive(at, std::move(d));
    return;
  }
  auto it = routes_.find({at, d.dst.node});
  if (it == routes_.end()) {
    on_drop();
    return;
  }
  links_[it->second]->transmit(std::move(d));
}

void Network::arrive(NodeId at, Datagram d) {
  if (at != d.dst.node) {
    forward(at, std::move(d));
    return;
  }
  auto it = handlers_.find(d.dst);
  if (it == handlers_.end()) {
    on_drop();
    return;
  }
  ++counters_.delivered;
  // Copy the handler: it may unbind itself.
  Handler h = it->second;
  h(d);
}

std::uint64_t Network::in_flight() const {
  std::uint64_t n = 0;
  for (const auto& l : links_) n += l->queue_length() + l->propagating();
  return n;
}

bool Network::conserved() const {
  return counters_.injected == counters_.delivered + counters_.dropped + in_flight();
}

}  // namespace quicsim
