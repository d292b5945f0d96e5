#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upsched/types.hpp"

namespace upsched {

inline constexpr std::int64_t kUnboundedBuffer = -1;

// An output port: either the transmit side of a unidirectional link, or a
// node's egress toward the outside world. bandwidth_bps == 0 means packets
// cross the port instantly (ingress/egress hosts, uncongested fixture
// routers) and are never queued.
struct Port {
  NodeId node;
  LinkId link;  // invalid for an egress port
  NodeId next;  // invalid for an egress port
  std::int64_t bandwidth_bps = 0;
  SimTime prop_delay = 0;
  std::int64_t buffer_limit_bytes = kUnboundedBuffer;

  bool instant() const { return bandwidth_bps == 0; }
  bool egress() const { return !link.valid(); }
};

struct Link {
  NodeId from;
  NodeId to;
  PortId port;
};

struct Node {
  std::string name;
  PortId egress;
  std::vector<LinkId> out;
};

struct Route {
  std::vector<NodeId> nodes;
  std::vector<PortId> ports;  // ports[k] is the port packets use at nodes[k]
  std::size_t hops() const { return nodes.size(); }
  NodeId src() const { return nodes.front(); }
  NodeId dest() const { return nodes.back(); }
};

// Header fields written at the ingress and read by the in-network schedulers.
// One field is meaningful per discipline; waiting accounting keeps both
// `slack` and `accumulated_wait` current at every hop.
struct SchedHeader {
  SimTime slack = 0;             // LSTF remaining slack, may go negative
  std::int64_t priority = 0;     // static priority, smaller is served first
  SimTime target_exit = 0;       // o(p) carried for per-router EDF
  SimTime accumulated_wait = 0;  // FIFO+ queueing delay so far
  std::vector<SimTime> hop_times;  // omniscient per-hop scheduling times
};

struct Packet {
  PacketId id;
  FlowId flow;
  std::int64_t size_bits = 0;
  SimTime ingress = 0;
  RouteId route;
  std::uint16_t hop = 0;
  SchedHeader header;
  std::int64_t flow_bytes = 0;            // SJF key
  std::int64_t remaining_flow_bytes = 0;  // SRPT key, stamped at injection
  std::uint32_t seq = 0;                  // transport sequence number
  std::uint32_t source = std::numeric_limits<std::uint32_t>::max();
};

class Network {
 public:
  NodeId add_node(std::string name, std::int64_t egress_bandwidth_bps = 0);
  LinkId add_link(NodeId from, NodeId to, std::int64_t bandwidth_bps, SimTime prop_delay,
                  std::int64_t buffer_limit_bytes = kUnboundedBuffer);
  // Two links, from->to then to->from.
  std::pair<LinkId, LinkId> add_duplex(NodeId a, NodeId b, std::int64_t bandwidth_bps,
                                       SimTime prop_delay);

  // Registers an explicit path. Consecutive nodes must be linked and the
  // path must not revisit a node.
  RouteId add_route(std::span<const NodeId> path);
  // Fewest-hop path; among equal-length paths the one that is
  // lexicographically smallest in NodeId wins. Cached.
  RouteId shortest_route(NodeId src, NodeId dst);

  void set_buffer_limit_all(std::int64_t bytes);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t port_count() const { return ports_.size(); }
  std::size_t route_count() const { return routes_.size(); }

  const Node& node(NodeId id) const { return nodes_.at(id.index()); }
  const Link& link(LinkId id) const { return links_.at(id.index()); }
  const Port& port(PortId id) const { return ports_.at(id.index()); }
  Port& port(PortId id) { return ports_.at(id.index()); }
  const Route& route(RouteId id) const { return routes_.at(id.index()); }
  std::optional<NodeId> find_node(std::string_view name) const;
  std::optional<LinkId> find_link(NodeId from, NodeId to) const;

  // T(p, node): serialization time of p on the port it uses at `node`.
  SimTime transmission_time(const Packet& p, NodeId node) const;
  // t_min(p, a, b): propagation plus per-hop transmission from a through b
  // inclusive, in an otherwise empty network. t_min(p, a, a) == T(p, a).
  SimTime t_min(const Packet& p, NodeId a, NodeId b) const;

  SimTime hop_transmission(std::int64_t bits, RouteId r, std::size_t hop) const;
  SimTime hop_t_min(std::int64_t bits, RouteId r, std::size_t from_hop, std::size_t to_hop) const;
  std::size_t hop_of(const Route& r, NodeId node) const;  // throws if absent

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<Port> ports_;
  std::vector<Route> routes_;
  std::map<std::vector<std::uint32_t>, RouteId> route_index_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, RouteId> shortest_cache_;
};

}  // namespace upsched
