#include <algorithm>
#include <vector>

#include "doctest.h"
#include "upsched/replay.hpp"
#include "upsched/simulation.hpp"
#include "upsched/workload.hpp"

using namespace upsched;

namespace {

constexpr std::int64_t kGbps = 1'000'000'000;

Packet packet(std::uint32_t id, RouteId r, std::int64_t bytes, SimTime at,
              std::uint32_t flow = 0) {
  Packet p;
  p.id = PacketId{id};
  p.flow = FlowId{flow};
  p.route = r;
  p.size_bits = bytes * 8;
  p.ingress = at;
  return p;
}

// h0 -> r0 -(1G, 5us)-> r1 -> h1, with instant host links.
struct TwoRouters {
  Network net;
  NodeId h0, r0, r1, h1;
  RouteId route;
  TwoRouters() {
    h0 = net.add_node("h0");
    r0 = net.add_node("r0");
    r1 = net.add_node("r1");
    h1 = net.add_node("h1");
    net.add_link(h0, r0, 0, 1'000);
    net.add_link(r0, r1, kGbps, 5'000);
    net.add_link(r1, h1, kGbps, 2'000);
    route = net.shortest_route(h0, h1);
  }
};

}  // namespace

TEST_CASE("an uncontended packet exits after exactly t_min") {
  TwoRouters t;
  Simulation sim(t.net, SchedulerAssignment::uniform(SchedulerKind::parse("fifo")), 1);
  const Packet p = packet(0, t.route, 1500, 3'000);
  sim.inject(p);
  sim.run();
  CHECK(sim.exit_time(p.id) == 3'000 + t.net.t_min(p, t.h0, t.h1));
  CHECK(sim.exit_time(p.id) == 3'000 + 1'000 + 12'000 + 5'000 + 12'000 + 2'000);
  const auto hops = sim.hops(p.id);
  REQUIRE(hops.size() == 4);
  CHECK(hops[1].arrival == 4'000);
  CHECK(hops[1].start == 4'000);
  CHECK(hops[1].exit == 16'000);
}

TEST_CASE("a queued packet waits for the one ahead of it") {
  TwoRouters t;
  Simulation sim(t.net, SchedulerAssignment::uniform(SchedulerKind::parse("fifo")), 1);
  sim.inject(packet(0, t.route, 1500, 0));
  sim.inject(packet(1, t.route, 1500, 0));
  sim.run();
  CHECK(sim.exit_time(PacketId{1}) - sim.exit_time(PacketId{0}) == 12'000);
  CHECK(sim.hops(PacketId{1})[1].start == sim.hops(PacketId{0})[1].exit);
}

TEST_CASE("injection call order does not change the schedule") {
  TwoRouters t;
  std::vector<Packet> pkts;
  Rng rng(3);
  for (std::uint32_t i = 0; i < 40; ++i) {
    pkts.push_back(packet(i, t.route, rng.uniform_int(64, 1500), rng.uniform_int(0, 5) * 1000, i));
  }
  auto run = [&](std::vector<Packet> order) {
    Simulation sim(t.net, SchedulerAssignment::uniform(SchedulerKind::parse("random")), 9);
    for (auto& p : order) sim.inject(p);
    sim.run();
    std::vector<SimTime> exits;
    for (const auto& p : pkts) exits.push_back(sim.exit_time(p.id));
    return std::make_pair(exits, sim.kernel().trace_digest());
  };
  auto reversed = pkts;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(run(pkts) == run(reversed));
}

TEST_CASE("packets are conserved under finite buffers") {
  TwoRouters t;
  t.net.port(t.net.route(t.route).ports[1]).buffer_limit_bytes = 4'500;
  Simulation sim(t.net, SchedulerAssignment::uniform(SchedulerKind::parse("fifo")), 1);
  std::uint64_t exits = 0, drops = 0;
  sim.on_exit = [&](const Packet&, SimTime) { ++exits; };
  sim.on_drop = [&](const Packet&, NodeId, SimTime) { ++drops; };
  for (std::uint32_t i = 0; i < 20; ++i) sim.inject(packet(i, t.route, 1500, 0));
  sim.run();
  CHECK(sim.injected_count() == 20);
  CHECK(sim.exited_count() + sim.dropped_count() == 20);
  CHECK(exits == sim.exited_count());
  CHECK(drops == sim.dropped_count());
  // All twenty reach r0 in one instant, before the port picks anything to
  // send, so only the three that fit the 4500-byte queue survive.
  CHECK(sim.exited_count() == 3);
}

TEST_CASE("preemption suspends and resumes a transmission") {
  TwoRouters t;
  Simulation sim(t.net, SchedulerAssignment::uniform(SchedulerKind::parse("lstf_preemptive")), 1);
  std::vector<DequeueRecord> log;
  sim.on_dequeue = [&](const DequeueRecord& d) {
    if (d.node == t.r0) log.push_back(d);
  };
  Packet lazy = packet(0, t.route, 1500, 0);
  lazy.header.slack = 1'000'000;
  Packet urgent = packet(1, t.route, 500, 3'000, 1);
  urgent.header.slack = 0;
  sim.inject(lazy);
  sim.inject(urgent);
  sim.run();
  REQUIRE(log.size() == 3);
  CHECK(log[0].pkt == lazy.id);
  CHECK(log[0].at == 1'000);
  CHECK(log[1].pkt == urgent.id);
  CHECK(log[1].at == 4'000);
  CHECK(log[2].pkt == lazy.id);
  CHECK(log[2].resumed);
  CHECK(log[2].at == 8'000);       // urgent needs 4000 ns at 1G
  CHECK(log[2].served == 3'000);   // 3000 of 12000 ns done before the interruption
  CHECK(sim.hops(lazy.id)[1].exit == 17'000);
  CHECK(sim.hops(urgent.id)[1].exit == 8'000);
}

TEST_CASE("injecting into the past or twice is rejected") {
  TwoRouters t;
  Simulation sim(t.net, SchedulerAssignment::uniform(SchedulerKind::parse("fifo")), 1);
  sim.inject(packet(0, t.route, 100, 10'000));
  CHECK_THROWS_AS(sim.inject(packet(0, t.route, 100, 20'000)), ContractViolation);
  sim.run();
  CHECK_THROWS_AS(sim.inject(packet(1, t.route, 100, 0)), ConfigError);
  Packet bad = packet(2, RouteId{99}, 100, sim.now());
  CHECK_THROWS_AS(sim.inject(bad), ContractViolation);
}
