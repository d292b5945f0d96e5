#include <vector>

#include "doctest.h"
#include "upsched/network.hpp"
#include "upsched/workload.hpp"

using namespace upsched;

TEST_CASE("transmission ticks round up to whole nanoseconds") {
  CHECK(transmission_ticks(1500 * 8, 1'000'000'000) == 12'000);
  CHECK(transmission_ticks(1, 1'000'000'000) == 1);
  CHECK(transmission_ticks(1, 3'000'000'000) == 1);
  CHECK(transmission_ticks(10, 3'000'000'000) == 4);
  CHECK(transmission_ticks(0, 1'000'000'000) == 0);
  CHECK(transmission_ticks(12'000, 0) == 0);
  CHECK_THROWS_AS(transmission_ticks(-1, 10), ContractViolation);
}

namespace {

// Three routers in a line with hosts at both ends; bandwidths differ per hop.
struct Line {
  Network net;
  NodeId h0, r0, r1, r2, h1;
  Line() {
    h0 = net.add_node("h0");
    r0 = net.add_node("r0");
    r1 = net.add_node("r1");
    r2 = net.add_node("r2");
    h1 = net.add_node("h1");
    net.add_link(h0, r0, 0, 100);
    net.add_link(r0, r1, 1'000'000'000, 2'000);
    net.add_link(r1, r2, 500'000'000, 3'000);
    net.add_link(r2, h1, 10'000'000'000, 50);
  }
};

Packet packet_on(RouteId r, std::int64_t bytes) {
  Packet p;
  p.route = r;
  p.size_bits = bytes * 8;
  return p;
}

// Direct sum over the route's links, independent of Network::t_min.
SimTime walk_t_min(const Network& net, const Route& r, std::int64_t bits, std::size_t a,
                   std::size_t b) {
  SimTime total = 0;
  for (std::size_t k = a; k <= b; ++k) {
    std::int64_t bw = 0;
    SimTime prop = 0;
    if (k + 1 < r.nodes.size()) {
      const Link& l = net.link(*net.find_link(r.nodes[k], r.nodes[k + 1]));
      bw = net.port(l.port).bandwidth_bps;
      prop = net.port(l.port).prop_delay;
    } else {
      bw = net.port(net.node(r.nodes[k]).egress).bandwidth_bps;
    }
    if (bw > 0) total += (bits * 1'000'000'000 + bw - 1) / bw;
    if (k < b) total += prop;
  }
  return total;
}

}  // namespace

TEST_CASE("t_min on a line matches a hand computation") {
  Line l;
  const RouteId r = l.net.shortest_route(l.h0, l.h1);
  const Packet p = packet_on(r, 1500);
  CHECK(l.net.t_min(p, l.h0, l.h0) == 0);  // instant ingress
  CHECK(l.net.t_min(p, l.r0, l.r0) == 12'000);
  CHECK(l.net.t_min(p, l.r1, l.r1) == 24'000);
  CHECK(l.net.t_min(p, l.r2, l.r2) == 1'200);
  // 100 + 12000 + 2000 + 24000 + 3000 + 1200 + 50, egress instant.
  CHECK(l.net.t_min(p, l.h0, l.h1) == 42'350);
  CHECK(l.net.transmission_time(p, l.r1) == 24'000);
}

TEST_CASE("t_min(a, a) equals the node's own transmission time") {
  Line l;
  const RouteId r = l.net.shortest_route(l.h0, l.h1);
  for (std::int64_t bytes : {1, 64, 999, 1500}) {
    const Packet p = packet_on(r, bytes);
    for (NodeId n : l.net.route(r).nodes) CHECK(l.net.t_min(p, n, n) == l.net.transmission_time(p, n));
  }
}

TEST_CASE("t_min is additive along random routes") {
  StarOfStarsParams sp;
  Topology t = build_star_of_stars(sp);
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const NodeId src = rng.pick(t.hosts);
    NodeId dst = rng.pick(t.hosts);
    if (src == dst) continue;
    const RouteId rid = t.net.shortest_route(src, dst);
    const Route& route = t.net.route(rid);
    const Packet p = packet_on(rid, rng.uniform_int(40, 1500));
    const auto n = static_cast<std::int64_t>(route.hops());
    const auto a = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
    const auto b = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(a), n - 1));
    CHECK(t.net.t_min(p, route.nodes[a], route.nodes[b]) ==
          walk_t_min(t.net, route, p.size_bits, a, b));
    if (b > a) {
      const auto m = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b) - 1));
      const SimTime link_prop = t.net.port(route.ports[m]).prop_delay;
      CHECK(t.net.t_min(p, route.nodes[a], route.nodes[b]) ==
            t.net.t_min(p, route.nodes[a], route.nodes[m]) + link_prop +
                t.net.t_min(p, route.nodes[m + 1], route.nodes[b]));
    }
  }
}

TEST_CASE("t_min rejects reversed or foreign nodes") {
  Line l;
  const RouteId r = l.net.shortest_route(l.r0, l.r2);
  const Packet p = packet_on(r, 100);
  CHECK_THROWS_AS(l.net.t_min(p, l.r2, l.r0), ContractViolation);
  CHECK_THROWS_AS(l.net.t_min(p, l.h0, l.r2), ContractViolation);
}

TEST_CASE("routes must follow existing links without revisiting nodes") {
  Line l;
  const std::vector<NodeId> gap{l.h0, l.r1};
  CHECK_THROWS_AS(l.net.add_route(gap), ConfigError);
  const std::vector<NodeId> ok{l.h0, l.r0, l.r1};
  const RouteId r = l.net.add_route(ok);
  CHECK(l.net.add_route(ok) == r);
  CHECK(l.net.route(r).ports.size() == 3);
  CHECK(l.net.port(l.net.route(r).ports.back()).egress());
  CHECK_THROWS_AS(l.net.shortest_route(l.h1, l.h0), ConfigError);  // links are one-way
}

TEST_CASE("shortest route prefers the lexicographically smallest path") {
  Network net;
  const NodeId s = net.add_node("s");
  const NodeId b = net.add_node("b");
  const NodeId a = net.add_node("a");
  const NodeId d = net.add_node("d");
  net.add_link(s, a, 1, 0);
  net.add_link(s, b, 1, 0);
  net.add_link(a, d, 1, 0);
  net.add_link(b, d, 1, 0);
  const Route& r = net.route(net.shortest_route(s, d));
  CHECK(r.nodes == std::vector<NodeId>{s, b, d});  // b has the smaller id
}
