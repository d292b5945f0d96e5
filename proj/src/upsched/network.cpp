#include "upsched/network.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace upsched {

SimTime transmission_ticks(std::int64_t bits, std::int64_t bps) {
  if (bps == 0) return 0;
  if (bits < 0 || bps < 0) throw ContractViolation("negative size or bandwidth");
  const __int128 num = static_cast<__int128>(bits) * kNsPerSec;
  return static_cast<SimTime>((num + bps - 1) / bps);
}

NodeId Network::add_node(std::string name, std::int64_t egress_bandwidth_bps) {
  if (egress_bandwidth_bps < 0) throw ConfigError("negative egress bandwidth for " + name);
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  const PortId egress{static_cast<std::uint32_t>(ports_.size())};
  ports_.push_back(Port{id, LinkId{}, NodeId{}, egress_bandwidth_bps, 0, kUnboundedBuffer});
  nodes_.push_back(Node{std::move(name), egress, {}});
  return id;
}

LinkId Network::add_link(NodeId from, NodeId to, std::int64_t bandwidth_bps, SimTime prop_delay,
                         std::int64_t buffer_limit_bytes) {
  if (from.index() >= nodes_.size() || to.index() >= nodes_.size() || from == to) {
    throw ConfigError("link endpoints invalid");
  }
  if (bandwidth_bps < 0 || prop_delay < 0) throw ConfigError("negative link parameter");
  const LinkId id{static_cast<std::uint32_t>(links_.size())};
  const PortId port{static_cast<std::uint32_t>(ports_.size())};
  ports_.push_back(Port{from, id, to, bandwidth_bps, prop_delay, buffer_limit_bytes});
  links_.push_back(Link{from, to, port});
  nodes_[from.index()].out.push_back(id);
  return id;
}

std::pair<LinkId, LinkId> Network::add_duplex(NodeId a, NodeId b, std::int64_t bandwidth_bps,
                                              SimTime prop_delay) {
  return {add_link(a, b, bandwidth_bps, prop_delay), add_link(b, a, bandwidth_bps, prop_delay)};
}

std::optional<NodeId> Network::find_node(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name == name) return NodeId{static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

std::optional<LinkId> Network::find_link(NodeId from, NodeId to) const {
  for (LinkId l : nodes_.at(from.index()).out) {
    if (links_[l.index()].to == to) return l;
  }
  return std::nullopt;
}

RouteId Network::add_route(std::span<const NodeId> path) {
  if (path.empty()) throw ConfigError("empty route");
  std::vector<std::uint32_t> key;
  key.reserve(path.size());
  for (NodeId n : path) key.push_back(n.value);
  if (auto it = route_index_.find(key); it != route_index_.end()) return it->second;

  std::set<std::uint32_t> seen;
  Route r;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path[k].index() >= nodes_.size()) throw ConfigError("route references unknown node");
    if (!seen.insert(path[k].value).second) throw ConfigError("route revisits a node");
    r.nodes.push_back(path[k]);
    if (k + 1 < path.size()) {
      auto l = find_link(path[k], path[k + 1]);
      if (!l) {
        throw ConfigError("route uses missing link " + nodes_[path[k].index()].name + "->" +
                          nodes_[path[k + 1].index()].name);
      }
      r.ports.push_back(links_[l->index()].port);
    } else {
      r.ports.push_back(nodes_[path[k].index()].egress);
    }
  }
  const RouteId id{static_cast<std::uint32_t>(routes_.size())};
  routes_.push_back(std::move(r));
  route_index_.emplace(std::move(key), id);
  return id;
}

RouteId Network::shortest_route(NodeId src, NodeId dst) {
  const auto cache_key = std::make_pair(src.value, dst.value);
  if (auto it = shortest_cache_.find(cache_key); it != shortest_cache_.end()) return it->second;

  // BFS from the destination gives hop distances; walking forward from src
  // and always taking the smallest-id neighbour one step closer yields the
  // lexicographically smallest shortest path.
  const std::size_t n = nodes_.size();
  std::vector<std::vector<std::uint32_t>> incoming(n);
  for (const Link& l : links_) incoming[l.to.index()].push_back(l.from.value);
  std::vector<std::int64_t> dist(n, -1);
  std::deque<std::uint32_t> frontier{dst.value};
  dist[dst.index()] = 0;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop_front();
    for (auto v : incoming[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  if (dist[src.index()] < 0) {
    throw ConfigError("no route from " + nodes_[src.index()].name + " to " +
                      nodes_[dst.index()].name);
  }
  std::vector<NodeId> path{src};
  NodeId cur = src;
  while (cur != dst) {
    std::uint32_t best = NodeId::kInvalid;
    for (LinkId l : nodes_[cur.index()].out) {
      const auto v = links_[l.index()].to.value;
      if (dist[v] == dist[cur.index()] - 1) best = std::min(best, v);
    }
    cur = NodeId{best};
    path.push_back(cur);
  }
  const RouteId id = add_route(path);
  shortest_cache_.emplace(cache_key, id);
  return id;
}

void Network::set_buffer_limit_all(std::int64_t bytes) {
  for (Port& p : ports_) p.buffer_limit_bytes = bytes;
}

std::size_t Network::hop_of(const Route& r, NodeId node) const {
  auto it = std::find(r.nodes.begin(), r.nodes.end(), node);
  if (it == r.nodes.end()) throw ContractViolation("node is not on the packet's path");
  return static_cast<std::size_t>(it - r.nodes.begin());
}

SimTime Network::hop_transmission(std::int64_t bits, RouteId r, std::size_t hop) const {
  const Route& route = routes_.at(r.index());
  return transmission_ticks(bits, ports_[route.ports.at(hop).index()].bandwidth_bps);
}

SimTime Network::hop_t_min(std::int64_t bits, RouteId r, std::size_t from_hop,
                           std::size_t to_hop) const {
  const Route& route = routes_.at(r.index());
  if (from_hop > to_hop || to_hop >= route.hops()) {
    throw ContractViolation("t_min: start node does not precede end node");
  }
  SimTime total = 0;
  for (std::size_t k = from_hop; k <= to_hop; ++k) {
    const Port& port = ports_[route.ports[k].index()];
    total += transmission_ticks(bits, port.bandwidth_bps);
    if (k < to_hop) total += port.prop_delay;
  }
  return total;
}

SimTime Network::transmission_time(const Packet& p, NodeId node) const {
  const Route& r = routes_.at(p.route.index());
  return hop_transmission(p.size_bits, p.route, hop_of(r, node));
}

SimTime Network::t_min(const Packet& p, NodeId a, NodeId b) const {
  const Route& r = routes_.at(p.route.index());
  return hop_t_min(p.size_bits, p.route, hop_of(r, a), hop_of(r, b));
}

}  // namespace upsched
