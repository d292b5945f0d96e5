#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "upsched/replay.hpp"
#include "upsched/transport.hpp"

namespace upsched {

// Seeded generator with platform-independent derived distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

struct SizeDist {
  enum class Kind { Fixed, BoundedPareto };
  Kind kind = Kind::BoundedPareto;
  double shape = 1.2;
  std::int64_t min_bytes = 1500;
  std::int64_t max_bytes = 15'000'000;
  std::int64_t fixed_bytes = 1500;

  double mean_bytes() const;
  // Mean after rounding each sample up to a multiple of `unit`.
  double mean_rounded_bytes(std::int64_t unit) const;
  std::int64_t sample(Rng& rng) const;
  static SizeDist fixed(std::int64_t bytes);
};

struct Topology {
  std::string name;
  Network net;
  std::vector<NodeId> hosts;
};

struct StarOfStarsParams {
  int core_nodes = 4;
  int edges_per_core = 3;
  int hosts_per_edge = 1;
  std::int64_t core_bw = 1'000'000'000;
  std::int64_t edge_bw = 1'000'000'000;
  std::int64_t host_bw = 10'000'000'000;
  SimTime core_prop = 2'000'000;
  SimTime edge_prop = 10'000;
  SimTime host_prop = 1'000;
};

// Core routers in a ring with a chord between core 0 and the core opposite
// it, each core serving several edge routers that each serve hosts.
Topology build_star_of_stars(const StarOfStarsParams& p);

// n hosts on each side of one shared link between two routers.
Topology build_dumbbell(int n, std::int64_t bottleneck_bw, std::int64_t access_bw,
                        SimTime bottleneck_prop, SimTime access_prop);

// k-ary fat tree: k pods of k/2 edge and k/2 aggregation switches,
// (k/2)^2 cores, k^3/4 hosts, all links at `link_bw`.
Topology build_fat_tree(int k, std::int64_t link_bw, SimTime prop);

// Routers R0..R(n-1) joined in a line by duplex links, with hosts on each.
Topology build_chain(int routers, int hosts_per_router, std::int64_t router_bw,
                     std::int64_t host_bw, SimTime router_prop, SimTime host_prop);

struct TrafficSpec {
  double target_utilization = 0.7;
  SizeDist sizes;
  SimTime duration = 20'000'000;  // flows start within [0, duration)
  std::int64_t mss_bytes = kDefaultMssBytes;
  TransportKind transport = TransportKind::OpenLoop;
  // Candidate (src, dst) pairs, drawn uniformly; empty means every ordered
  // pair of distinct hosts.
  std::vector<std::pair<NodeId, NodeId>> pairs;
};

struct TrafficPlan {
  std::vector<FlowSpec> flows;
  double flows_per_sec = 0;
  PortId bottleneck;        // port with the highest expected utilization
  double route_share = 0;   // fraction of host pairs whose route crosses it
};

// Poisson flow arrivals between uniformly chosen host pairs. Sampled sizes
// are rounded up to whole MSS-sized packets. The arrival rate is set so that
// the busiest port's expected load equals the target.
TrafficPlan gen_traffic(Topology& topo, const TrafficSpec& spec, std::uint64_t seed);

// Bits offered to `port` by flows starting in [0, window), divided by the
// port's capacity over that window.
double offered_utilization(Network& net, std::span<const FlowSpec> flows, PortId port,
                           SimTime window);

// A fully determined packet-level scenario.
struct Instance {
  Network net;
  std::vector<Injection> injections;
  SchedulerAssignment original;
  std::uint64_t seed = 0;
};

// Line topologies where every packet crosses at most `max_cp` non-instant
// ports, so no recorded schedule can have more congestion points. With
// max_cp == 1 all packets of an instance share one size. The recorded
// profile is checked and the instance rejected if it exceeds the bound.
struct BoundedCpInstance {
  Instance inst;
  ScheduleRecord record;
  std::size_t attempts = 0;
};
BoundedCpInstance gen_bounded_cp_instance(int max_cp, std::uint64_t seed);

// Line of up to `max_routers` routers with cross traffic entering at every
// router and mixed packet sizes; nonpreemptive originals, mostly Random.
Instance gen_multihop_instance(std::uint64_t seed, int max_routers = 8);

// Small hand-built scenarios whose original schedule is reproduced exactly by
// driving nonpreemptive omniscient scheduling with the listed times.
struct FixtureRow {
  std::string node;
  std::string packet;
  SimTime arrival;
  SimTime sched;
  friend bool operator==(const FixtureRow&, const FixtureRow&) = default;
};

struct Fixture {
  std::string name;
  Network net;
  std::vector<Injection> injections;        // headers carry the original times
  std::vector<std::string> packet_names;    // indexed by PacketId
  std::vector<std::string> contended;       // nodes with a non-instant output
  std::vector<FixtureRow> original;         // expected original schedule
  std::vector<FixtureRow> lstf_replay;      // expected LSTF replay, if stated
  SimTime unit = 1000;                      // one transmission time at 1 Gbps

  SchedulerAssignment original_schedulers() const;
  std::optional<PacketId> packet(std::string_view name) const;
};

// blackbox_case1, blackbox_case2, priority_cycle, lstf_three_cp.
Fixture build_fixture(std::string_view name);
std::vector<std::string> fixture_names();

// Rows (node, packet, arrival, first scheduling time) for every contended
// node in `rec`, ordered by node then scheduling time.
std::vector<FixtureRow> fixture_rows(const Fixture& fx, const ScheduleRecord& rec);

}  // namespace upsched
