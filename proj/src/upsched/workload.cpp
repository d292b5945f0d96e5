#include "upsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace upsched {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ContractViolation("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(eng_());
  return lo + static_cast<std::int64_t>(eng_() % span);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {
std::int64_t round_up(std::int64_t bytes, std::int64_t unit) { return (bytes + unit - 1) / unit * unit; }
}  // namespace

double SizeDist::mean_bytes() const {
  if (kind == Kind::Fixed) return static_cast<double>(fixed_bytes);
  const double a = shape;
  const double l = static_cast<double>(min_bytes);
  const double h = static_cast<double>(max_bytes);
  const double norm = 1.0 - std::pow(l / h, a);
  if (a == 1.0) return l * std::log(h / l) / norm;
  return std::pow(l, a) / norm * a / (a - 1.0) * (std::pow(l, 1.0 - a) - std::pow(h, 1.0 - a));
}

double SizeDist::mean_rounded_bytes(std::int64_t unit) const {
  if (unit <= 0) throw ConfigError("rounding unit must be positive");
  if (kind == Kind::Fixed) return static_cast<double>(round_up(fixed_bytes, unit));
  // E[ceil(X / unit) * unit] = unit * sum over k >= 0 of P(X > k * unit).
  const double a = shape;
  const double l = static_cast<double>(min_bytes);
  const double h = static_cast<double>(max_bytes);
  const double lo_h = std::pow(l / h, a);
  double sum = 0;
  for (std::int64_t k = 0; k * unit < max_bytes; ++k) {
    const double x = static_cast<double>(k * unit);
    sum += x < l ? 1.0 : (std::pow(l / x, a) - lo_h) / (1.0 - lo_h);
  }
  return sum * static_cast<double>(unit);
}

std::int64_t SizeDist::sample(Rng& rng) const {
  if (kind == Kind::Fixed) return fixed_bytes;
  if (min_bytes <= 0 || max_bytes < min_bytes || shape <= 0) {
    throw ConfigError("bounded Pareto needs 0 < min <= max and a positive shape");
  }
  const double l = static_cast<double>(min_bytes);
  const double h = static_cast<double>(max_bytes);
  const double u = rng.uniform01();
  const double tail = 1.0 - u * (1.0 - std::pow(l / h, shape));
  const double x = l / std::pow(tail, 1.0 / shape);
  return std::clamp<std::int64_t>(std::llround(x), min_bytes, max_bytes);
}

SizeDist SizeDist::fixed(std::int64_t bytes) {
  SizeDist d;
  d.kind = Kind::Fixed;
  d.fixed_bytes = bytes;
  return d;
}

Topology build_star_of_stars(const StarOfStarsParams& p) {
  if (p.core_nodes < 1 || p.edges_per_core < 1 || p.hosts_per_edge < 1) {
    throw ConfigError("star-of-stars needs at least one core, edge and host");
  }
  Topology t;
  t.name = "star_of_stars";
  std::vector<NodeId> cores;
  for (int c = 0; c < p.core_nodes; ++c) cores.push_back(t.net.add_node("core" + std::to_string(c)));
  if (p.core_nodes == 2) {
    t.net.add_duplex(cores[0], cores[1], p.core_bw, p.core_prop);
  } else if (p.core_nodes > 2) {
    for (int c = 0; c < p.core_nodes; ++c) {
      t.net.add_duplex(cores[c], cores[(c + 1) % p.core_nodes], p.core_bw, p.core_prop);
    }
    if (p.core_nodes >= 4) t.net.add_duplex(cores[0], cores[p.core_nodes / 2], p.core_bw, p.core_prop);
  }
  for (int c = 0; c < p.core_nodes; ++c) {
    for (int e = 0; e < p.edges_per_core; ++e) {
      const std::string tag = std::to_string(c) + "_" + std::to_string(e);
      const NodeId edge = t.net.add_node("edge" + tag);
      t.net.add_duplex(edge, cores[c], p.edge_bw, p.edge_prop);
      for (int h = 0; h < p.hosts_per_edge; ++h) {
        const NodeId host = t.net.add_node("host" + tag + "_" + std::to_string(h));
        t.net.add_duplex(host, edge, p.host_bw, p.host_prop);
        t.hosts.push_back(host);
      }
    }
  }
  return t;
}

Topology build_dumbbell(int n, std::int64_t bottleneck_bw, std::int64_t access_bw,
                        SimTime bottleneck_prop, SimTime access_prop) {
  if (n < 1) throw ConfigError("dumbbell needs at least one host per side");
  Topology t;
  t.name = "dumbbell";
  const NodeId left = t.net.add_node("left");
  const NodeId right = t.net.add_node("right");
  t.net.add_duplex(left, right, bottleneck_bw, bottleneck_prop);
  for (int i = 0; i < n; ++i) {
    const NodeId h = t.net.add_node("l" + std::to_string(i));
    t.net.add_duplex(h, left, access_bw, access_prop);
    t.hosts.push_back(h);
  }
  for (int i = 0; i < n; ++i) {
    const NodeId h = t.net.add_node("r" + std::to_string(i));
    t.net.add_duplex(h, right, access_bw, access_prop);
    t.hosts.push_back(h);
  }
  return t;
}

Topology build_fat_tree(int k, std::int64_t link_bw, SimTime prop) {
  if (k < 2 || k % 2 != 0) throw ConfigError("fat tree needs an even k >= 2");
  Topology t;
  t.name = "fat_tree";
  const int half = k / 2;
  std::vector<NodeId> cores;
  for (int c = 0; c < half * half; ++c) cores.push_back(t.net.add_node("core" + std::to_string(c)));
  for (int pod = 0; pod < k; ++pod) {
    std::vector<NodeId> aggs;
    for (int a = 0; a < half; ++a) {
      const NodeId agg = t.net.add_node("agg" + std::to_string(pod) + "_" + std::to_string(a));
      for (int c = 0; c < half; ++c) t.net.add_duplex(agg, cores[a * half + c], link_bw, prop);
      aggs.push_back(agg);
    }
    for (int e = 0; e < half; ++e) {
      const std::string tag = std::to_string(pod) + "_" + std::to_string(e);
      const NodeId edge = t.net.add_node("edge" + tag);
      for (NodeId agg : aggs) t.net.add_duplex(edge, agg, link_bw, prop);
      for (int h = 0; h < half; ++h) {
        const NodeId host = t.net.add_node("host" + tag + "_" + std::to_string(h));
        t.net.add_duplex(host, edge, link_bw, prop);
        t.hosts.push_back(host);
      }
    }
  }
  return t;
}

Topology build_chain(int routers, int hosts_per_router, std::int64_t router_bw,
                     std::int64_t host_bw, SimTime router_prop, SimTime host_prop) {
  if (routers < 1 || hosts_per_router < 1) throw ConfigError("chain needs routers and hosts");
  Topology t;
  t.name = "chain";
  std::vector<NodeId> rs;
  for (int r = 0; r < routers; ++r) rs.push_back(t.net.add_node("r" + std::to_string(r)));
  for (int r = 0; r + 1 < routers; ++r) t.net.add_duplex(rs[r], rs[r + 1], router_bw, router_prop);
  for (int r = 0; r < routers; ++r) {
    for (int h = 0; h < hosts_per_router; ++h) {
      const NodeId host = t.net.add_node("h" + std::to_string(r) + "_" + std::to_string(h));
      t.net.add_duplex(host, rs[r], host_bw, host_prop);
      t.hosts.push_back(host);
    }
  }
  return t;
}

TrafficPlan gen_traffic(Topology& topo, const TrafficSpec& spec, std::uint64_t seed) {
  if (!(spec.target_utilization > 0.0 && spec.target_utilization < 1.0)) {
    throw ConfigError("target utilization must lie in (0, 1)");
  }
  if (topo.hosts.size() < 2) throw ConfigError("traffic needs at least two hosts");
  if (spec.duration <= 0) throw ConfigError("traffic duration must be positive");
  Network& net = topo.net;
  std::vector<std::pair<NodeId, NodeId>> pairs = spec.pairs;
  if (pairs.empty()) {
    for (NodeId src : topo.hosts) {
      for (NodeId dst : topo.hosts) {
        if (src != dst) pairs.emplace_back(src, dst);
      }
    }
  }
  std::vector<double> uses(net.port_count(), 0.0);
  for (const auto& [src, dst] : pairs) {
    if (src == dst) throw ConfigError("traffic pair with identical endpoints");
    for (PortId p : net.route(net.shortest_route(src, dst)).ports) uses[p.index()] += 1;
  }
  const auto npairs = static_cast<double>(pairs.size());
  TrafficPlan plan;
  double worst = 0;
  for (std::size_t i = 0; i < uses.size(); ++i) {
    const Port& port = net.port(PortId{static_cast<std::uint32_t>(i)});
    if (port.instant() || uses[i] == 0) continue;
    const double factor = uses[i] / npairs / static_cast<double>(port.bandwidth_bps);
    if (factor > worst) {
      worst = factor;
      plan.bottleneck = PortId{static_cast<std::uint32_t>(i)};
      plan.route_share = uses[i] / npairs;
    }
  }
  if (worst == 0) throw ConfigError("no host route crosses a finite-rate port");
  if (spec.mss_bytes <= 0) throw ConfigError("traffic mss must be positive");
  const double mean_bits = spec.sizes.mean_rounded_bytes(spec.mss_bytes) * 8.0;
  plan.flows_per_sec = spec.target_utilization / (mean_bits * worst);

  Rng rng(seed);
  const double per_ns = plan.flows_per_sec / static_cast<double>(kNsPerSec);
  double t = 0;
  std::uint32_t next_id = 0;
  while (true) {
    t += rng.exponential(per_ns);
    const auto start = static_cast<SimTime>(std::llround(t));
    if (start >= spec.duration) break;
    const auto& [src, dst] = rng.pick(pairs);
    FlowSpec f;
    f.id = FlowId{next_id++};
    f.src = src;
    f.dst = dst;
    f.size_bytes = round_up(spec.sizes.sample(rng), spec.mss_bytes);
    f.start = start;
    f.transport = spec.transport;
    f.mss_bytes = spec.mss_bytes;
    plan.flows.push_back(f);
  }
  return plan;
}

double offered_utilization(Network& net, std::span<const FlowSpec> flows, PortId port,
                           SimTime window) {
  const Port& pt = net.port(port);
  if (pt.instant()) throw ContractViolation("offered_utilization: instant port");
  long double bits = 0;
  for (const auto& f : flows) {
    if (f.start >= window || f.size_bytes == kUnboundedFlow) continue;
    const Route& r = net.route(net.shortest_route(f.src, f.dst));
    if (std::find(r.ports.begin(), r.ports.end(), port) == r.ports.end()) continue;
    bits += static_cast<long double>(f.size_bytes) * 8;
  }
  const long double capacity =
      static_cast<long double>(pt.bandwidth_bps) * static_cast<long double>(window) / kNsPerSec;
  return static_cast<double>(bits / capacity);
}

namespace {

const std::vector<std::int64_t> kSmallSizes{500, 1000, 1500};

SchedulerKind random_original(Rng& rng, bool with_sjf) {
  std::vector<Discipline> menu{Discipline::Random, Discipline::Random, Discipline::Random,
                               Discipline::Fifo,   Discipline::Lifo,   Discipline::Fq};
  if (with_sjf) menu.push_back(Discipline::Sjf);
  return SchedulerKind{rng.pick(menu), false};
}

struct DraftPacket {
  SimTime at;
  std::size_t flow;
  std::int64_t bytes;
};

std::vector<Injection> finalize(std::vector<DraftPacket> drafts, const std::vector<RouteId>& routes,
                                const std::vector<std::int64_t>& flow_bytes) {
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const DraftPacket& a, const DraftPacket& b) { return a.at < b.at; });
  std::vector<Injection> out;
  out.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    Injection inj;
    inj.id = PacketId{static_cast<std::uint32_t>(i)};
    inj.flow = FlowId{static_cast<std::uint32_t>(drafts[i].flow)};
    inj.route = routes[drafts[i].flow];
    inj.size_bits = drafts[i].bytes * 8;
    inj.at = drafts[i].at;
    inj.flow_bytes = flow_bytes[drafts[i].flow];
    inj.remaining_flow_bytes = inj.flow_bytes;
    out.push_back(std::move(inj));
  }
  return out;
}

Instance draft_bounded_cp(int max_cp, Rng& rng) {
  Instance inst;
  Network& net = inst.net;
  const int m = static_cast<int>(rng.uniform_int(2, 5));
  std::vector<NodeId> routers;
  std::vector<std::vector<NodeId>> hosts(m);
  for (int i = 0; i < m; ++i) routers.push_back(net.add_node("r" + std::to_string(i)));
  const std::vector<std::int64_t> rates{1'000'000'000, 2'000'000'000, 5'000'000'000};
  for (int i = 0; i + 1 < m; ++i) {
    net.add_link(routers[i], routers[i + 1], rng.pick(rates), rng.uniform_int(0, 3000));
  }
  for (int i = 0; i < m; ++i) {
    const int nh = static_cast<int>(rng.uniform_int(1, 3));
    for (int k = 0; k < nh; ++k) {
      const NodeId h = net.add_node("h" + std::to_string(i) + "_" + std::to_string(k));
      net.add_link(h, routers[i], 0, rng.uniform_int(0, 2000));
      net.add_link(routers[i], h, 0, rng.uniform_int(0, 2000));
      hosts[i].push_back(h);
    }
  }
  const int nflows = static_cast<int>(rng.uniform_int(2, 6));
  std::vector<RouteId> routes;
  std::vector<std::int64_t> flow_bytes;
  for (int f = 0; f < nflows; ++f) {
    const int i = static_cast<int>(rng.uniform_int(0, m - 2));
    const int span = static_cast<int>(rng.uniform_int(1, std::min(max_cp, m - 1 - i)));
    const int j = i + span;
    std::vector<NodeId> path{rng.pick(hosts[i])};
    for (int r = i; r <= j; ++r) path.push_back(routers[r]);
    path.push_back(rng.pick(hosts[j]));
    routes.push_back(net.add_route(path));
    flow_bytes.push_back(rng.uniform_int(1, 200) * 1000);
  }
  const std::int64_t fixed = rng.pick(kSmallSizes);
  const int n = static_cast<int>(rng.uniform_int(20, 80));
  const double load = 0.3 + 0.7 * rng.uniform01();
  const auto horizon = static_cast<SimTime>(n * 8000 * load);
  std::vector<DraftPacket> drafts;
  for (int k = 0; k < n; ++k) {
    const auto f = static_cast<std::size_t>(rng.uniform_int(0, nflows - 1));
    drafts.push_back({rng.uniform_int(0, horizon), f, max_cp == 1 ? fixed : rng.pick(kSmallSizes)});
  }
  inst.injections = finalize(std::move(drafts), routes, flow_bytes);
  inst.original.fallback = {Discipline::Random, false};
  for (NodeId r : routers) inst.original.per_node[r.value] = random_original(rng, true);
  return inst;
}

}  // namespace

BoundedCpInstance gen_bounded_cp_instance(int max_cp, std::uint64_t seed) {
  if (max_cp != 1 && max_cp != 2) throw ConfigError("bounded instances support 1 or 2 congestion points");
  constexpr std::size_t kBudget = 64;
  for (std::size_t attempt = 0; attempt < kBudget; ++attempt) {
    Rng rng(mix_seed(seed, attempt));
    BoundedCpInstance out{draft_bounded_cp(max_cp, rng), {}, attempt + 1};
    out.inst.seed = mix_seed(seed, attempt + 1000);
    out.record = record(out.inst.net, out.inst.injections, out.inst.original, out.inst.seed);
    if (congestion_counts(out.inst.net, out.record).max_count() <= static_cast<std::size_t>(max_cp)) {
      return out;
    }
  }
  throw SimulationError("bounded instance generator exhausted its rejection budget");
}

Instance gen_multihop_instance(std::uint64_t seed, int max_routers) {
  if (max_routers < 3) throw ConfigError("multi-hop instances need at least three routers");
  Rng rng(seed);
  Instance inst;
  inst.seed = mix_seed(seed, 7);
  Network& net = inst.net;
  const int m = static_cast<int>(rng.uniform_int(3, max_routers));
  std::vector<NodeId> routers;
  std::vector<std::vector<NodeId>> hosts(m);
  for (int i = 0; i < m; ++i) routers.push_back(net.add_node("r" + std::to_string(i)));
  const std::vector<std::int64_t> rates{1'000'000'000, 1'000'000'000, 2'000'000'000,
                                        5'000'000'000};
  const std::vector<std::int64_t> access{0, 10'000'000'000};
  for (int i = 0; i + 1 < m; ++i) {
    net.add_link(routers[i], routers[i + 1], rng.pick(rates), rng.uniform_int(0, 5000));
  }
  for (int i = 0; i < m; ++i) {
    const int nh = static_cast<int>(rng.uniform_int(1, 2));
    for (int k = 0; k < nh; ++k) {
      const NodeId h = net.add_node("h" + std::to_string(i) + "_" + std::to_string(k));
      net.add_link(h, routers[i], rng.pick(access), rng.uniform_int(0, 1000));
      net.add_link(routers[i], h, rng.pick(access), rng.uniform_int(0, 1000));
      hosts[i].push_back(h);
    }
  }
  const int nflows = static_cast<int>(rng.uniform_int(3, 8));
  std::vector<RouteId> routes;
  std::vector<std::int64_t> flow_bytes;
  for (int f = 0; f < nflows; ++f) {
    int i = 0;
    int j = m - 1;
    if (f > 0 && rng.uniform01() >= 0.4) {
      i = static_cast<int>(rng.uniform_int(0, m - 2));
      j = static_cast<int>(rng.uniform_int(i + 1, m - 1));
    }
    std::vector<NodeId> path{rng.pick(hosts[i])};
    for (int r = i; r <= j; ++r) path.push_back(routers[r]);
    path.push_back(rng.pick(hosts[j]));
    routes.push_back(net.add_route(path));
    flow_bytes.push_back(rng.uniform_int(1, 200) * 1000);
  }
  const int n = static_cast<int>(rng.uniform_int(30, 120));
  const double load = 0.3 + 0.7 * rng.uniform01();
  const auto horizon = static_cast<SimTime>(n * 6000 * load);
  std::vector<DraftPacket> drafts;
  for (int k = 0; k < n; ++k) {
    const auto f = static_cast<std::size_t>(rng.uniform_int(0, nflows - 1));
    drafts.push_back({rng.uniform_int(0, horizon), f, rng.uniform_int(64, 1500)});
  }
  inst.injections = finalize(std::move(drafts), routes, flow_bytes);
  if (rng.uniform01() < 0.5) {
    inst.original = SchedulerAssignment::uniform({Discipline::Random, false});
  } else {
    inst.original.fallback = {Discipline::Random, false};
    for (int i = 0; i < m; ++i) inst.original.per_node[routers[i].value] = random_original(rng, true);
    for (const auto& hs : hosts) {
      for (NodeId h : hs) inst.original.per_node[h.value] = random_original(rng, true);
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Fixtures. One unit is 1000 ns, packets are 1000 bits, so a 1 Gbps port
// transmits a packet in one unit; white routers and hosts are instant.

namespace {

constexpr SimTime kUnit = 1000;
constexpr std::int64_t kFixtureBits = 1000;
constexpr std::int64_t kGbps = 1'000'000'000;

class FixtureBuilder {
 public:
  explicit FixtureBuilder(std::string name) { fx_.name = std::move(name); }

  NodeId node(const std::string& name) {
    if (auto id = fx_.net.find_node(name)) return *id;
    return fx_.net.add_node(name);
  }

  void link(const std::string& from, const std::string& to, std::int64_t bw, SimTime prop = 0) {
    fx_.net.add_link(node(from), node(to), bw, prop);
    if (bw != 0) fx_.contended.push_back(from);
  }

  // A packet entering at `at`, with its original first-bit scheduling time
  // at each contended node it crosses.
  void packet(const std::string& name, std::uint32_t flow, const std::vector<std::string>& path,
              SimTime at, const std::map<std::string, SimTime>& sched) {
    std::vector<NodeId> ids;
    for (const auto& n : path) ids.push_back(node(n));
    Injection inj;
    inj.id = PacketId{static_cast<std::uint32_t>(fx_.injections.size())};
    inj.flow = FlowId{flow};
    inj.route = fx_.net.add_route(ids);
    inj.size_bits = kFixtureBits;
    inj.at = at;
    for (const auto& n : path) {
      auto it = sched.find(n);
      inj.header.hop_times.push_back(it == sched.end() ? 0 : it->second);
    }
    fx_.injections.push_back(std::move(inj));
    fx_.packet_names.push_back(name);
  }

  void expect(const std::string& node, const std::string& pkt, double arrival, double sched,
              bool replay = false) {
    FixtureRow row{node, pkt, static_cast<SimTime>(std::llround(arrival * kUnit)),
                   static_cast<SimTime>(std::llround(sched * kUnit))};
    (replay ? fx_.lstf_replay : fx_.original).push_back(row);
  }

  Fixture done() {
    fx_.unit = kUnit;
    return std::move(fx_);
  }

 private:
  Fixture fx_;
};

SimTime u(double units) { return static_cast<SimTime>(std::llround(units * kUnit)); }

// Three contended nodes a0 -> a1 -> a2, each followed by a white router that
// fans out to the next contended node or to the egresses.
Fixture lstf_three_cp() {
  FixtureBuilder b("lstf_three_cp");
  for (const char* s : {"a0", "w0", "a1", "w1", "a2", "w2"}) b.node(s);
  b.link("sa", "a0", 0);
  b.link("sb", "a0", 0);
  b.link("a0", "w0", kGbps);
  b.link("w0", "a1", 0);
  b.link("w0", "db", 0);
  b.link("sc", "a1", 0);
  b.link("a1", "w1", kGbps);
  b.link("w1", "a2", 0);
  b.link("w1", "dc", 0);
  b.link("sd", "a2", 0);
  b.link("a2", "w2", kGbps);
  b.link("w2", "da", 0);
  b.link("w2", "dd", 0);
  const std::vector<std::string> pa{"sa", "a0", "w0", "a1", "w1", "a2", "w2", "da"};
  const std::vector<std::string> pb{"sb", "a0", "w0", "db"};
  const std::vector<std::string> pc{"sc", "a1", "w1", "dc"};
  const std::vector<std::string> pd{"sd", "a2", "w2", "dd"};
  b.packet("a", 0, pa, u(0), {{"a0", u(0)}, {"a1", u(1)}, {"a2", u(4)}});
  b.packet("b", 1, pb, u(0), {{"a0", u(1)}});
  b.packet("c1", 2, pc, u(2), {{"a1", u(2)}});
  b.packet("c2", 2, pc, u(3), {{"a1", u(3)}});
  b.packet("d1", 3, pd, u(2), {{"a2", u(2)}});
  b.packet("d2", 3, pd, u(3), {{"a2", u(3)}});
  b.expect("a0", "a", 0, 0);
  b.expect("a0", "b", 0, 1);
  b.expect("a1", "a", 1, 1);
  b.expect("a1", "c1", 2, 2);
  b.expect("a1", "c2", 3, 3);
  b.expect("a2", "d1", 2, 2);
  b.expect("a2", "d2", 3, 3);
  b.expect("a2", "a", 2, 4);
  b.expect("a0", "b", 0, 0, true);
  b.expect("a0", "a", 0, 1, true);
  b.expect("a1", "c1", 2, 2, true);
  b.expect("a1", "a", 2, 3, true);
  b.expect("a1", "c2", 3, 4, true);
  b.expect("a2", "d1", 2, 2, true);
  b.expect("a2", "d2", 3, 3, true);
  b.expect("a2", "a", 4, 4, true);
  return b.done();
}

Fixture blackbox_case(int which) {
  FixtureBuilder b(which == 1 ? "blackbox_case1" : "blackbox_case2");
  for (const char* s : {"a0", "w0", "a1", "w1", "a2", "w2", "a3", "w3", "a4", "w4"}) b.node(s);
  b.link("sa", "a0", 0);
  b.link("sx", "a0", 0);
  b.link("a0", "w0", kGbps);
  b.link("w0", "a1", 0);
  b.link("w0", "a3", 0);
  b.link("sb", "a1", 0);
  b.link("a1", "w1", kGbps);
  b.link("w1", "a2", 0);
  b.link("w1", "db", 0);
  b.link("sc", "a2", 0);
  b.link("a2", "w2", kGbps);
  b.link("w2", "da", 0);
  b.link("w2", "dc", 0);
  b.link("sy", "a3", 0);
  b.link("a3", "w3", kGbps);
  b.link("w3", "a4", 0);
  b.link("w3", "dy", 0);
  b.link("sz", "a4", 0);
  b.link("a4", "w4", kGbps);
  b.link("w4", "dx", 0);
  b.link("w4", "dz", 0);
  const std::vector<std::string> pa{"sa", "a0", "w0", "a1", "w1", "a2", "w2", "da"};
  const std::vector<std::string> px{"sx", "a0", "w0", "a3", "w3", "a4", "w4", "dx"};
  const std::vector<std::string> pb{"sb", "a1", "w1", "db"};
  const std::vector<std::string> pc{"sc", "a2", "w2", "dc"};
  const std::vector<std::string> py{"sy", "a3", "w3", "dy"};
  const std::vector<std::string> pz{"sz", "a4", "w4", "dz"};
  const bool one = which == 1;
  // Scheduling times from the two cases; arrivals follow from them.
  const double a_a0 = one ? 0 : 1, a_a1 = one ? 1 : 2, a_a2 = 4;
  const double x_a0 = one ? 1 : 0, x_a3 = one ? 2 : 1, x_a4 = 3;
  const double b_base = one ? 2 : 3;
  const double y1 = one ? 3 : 2, y2 = one ? 4 : 3;
  b.packet("a", 0, pa, u(0), {{"a0", u(a_a0)}, {"a1", u(a_a1)}, {"a2", u(a_a2)}});
  b.packet("x", 3, px, u(0), {{"a0", u(x_a0)}, {"a3", u(x_a3)}, {"a4", u(x_a4)}});
  b.packet("b1", 1, pb, u(2), {{"a1", u(b_base)}});
  b.packet("b2", 1, pb, u(3), {{"a1", u(b_base + 1)}});
  b.packet("b3", 1, pb, u(4), {{"a1", u(b_base + 2)}});
  b.packet("c1", 2, pc, u(2), {{"a2", u(2)}});
  b.packet("c2", 2, pc, u(3), {{"a2", u(3)}});
  b.packet("y1", 4, py, u(2), {{"a3", u(y1)}});
  b.packet("y2", 4, py, u(3), {{"a3", u(y2)}});
  b.packet("z", 5, pz, u(2), {{"a4", u(2)}});
  if (one) {
    b.expect("a0", "a", 0, 0);
    b.expect("a0", "x", 0, 1);
    b.expect("a1", "a", 1, 1);
    b.expect("a1", "b1", 2, 2);
    b.expect("a1", "b2", 3, 3);
    b.expect("a1", "b3", 4, 4);
    b.expect("a2", "c1", 2, 2);
    b.expect("a2", "c2", 3, 3);
    b.expect("a2", "a", 2, 4);
    b.expect("a3", "x", 2, 2);
    b.expect("a3", "y1", 2, 3);
    b.expect("a3", "y2", 3, 4);
    b.expect("a4", "z", 2, 2);
    b.expect("a4", "x", 3, 3);
  } else {
    b.expect("a0", "x", 0, 0);
    b.expect("a0", "a", 0, 1);
    b.expect("a1", "a", 2, 2);
    b.expect("a1", "b1", 2, 3);
    b.expect("a1", "b2", 3, 4);
    b.expect("a1", "b3", 4, 5);
    b.expect("a2", "c1", 2, 2);
    b.expect("a2", "c2", 3, 3);
    b.expect("a2", "a", 3, 4);
    b.expect("a3", "x", 1, 1);
    b.expect("a3", "y1", 2, 2);
    b.expect("a3", "y2", 3, 3);
    b.expect("a4", "z", 2, 2);
    b.expect("a4", "x", 2, 3);
  }
  return b.done();
}

// Contended nodes a1 (1 unit), a2 (0.5) and a3 (0.2); the w1 -> a3 link
// carries two units of propagation delay.
Fixture priority_cycle() {
  FixtureBuilder b("priority_cycle");
  for (const char* s : {"a1", "w1", "a2", "w2", "a3", "w3"}) b.node(s);
  b.link("sa", "a1", 0);
  b.link("sb", "a1", 0);
  b.link("a1", "w1", kGbps);
  b.link("w1", "a2", 0);
  b.link("w1", "a3", 0, u(2));
  b.link("sc", "a2", 0);
  b.link("a2", "w2", 2 * kGbps);
  b.link("w2", "a3", 0);
  b.link("w2", "db", 0);
  b.link("a3", "w3", 5 * kGbps);
  b.link("w3", "da", 0);
  b.link("w3", "dc", 0);
  const std::vector<std::string> pa{"sa", "a1", "w1", "a3", "w3", "da"};
  const std::vector<std::string> pb{"sb", "a1", "w1", "a2", "w2", "db"};
  const std::vector<std::string> pc{"sc", "a2", "w2", "a3", "w3", "dc"};
  b.packet("a", 0, pa, u(0), {{"a1", u(0)}, {"a3", u(3.2)}});
  b.packet("b", 1, pb, u(0), {{"a1", u(1)}, {"a2", u(2)}});
  b.packet("c", 2, pc, u(2), {{"a2", u(2.5)}, {"a3", u(3)}});
  b.expect("a1", "a", 0, 0);
  b.expect("a1", "b", 0, 1);
  b.expect("a2", "b", 2, 2);
  b.expect("a2", "c", 2, 2.5);
  b.expect("a3", "c", 3, 3);
  b.expect("a3", "a", 3, 3.2);
  return b.done();
}

}  // namespace

SchedulerAssignment Fixture::original_schedulers() const {
  return SchedulerAssignment::uniform({Discipline::Omniscient, false});
}

std::optional<PacketId> Fixture::packet(std::string_view name) const {
  for (std::size_t i = 0; i < packet_names.size(); ++i) {
    if (packet_names[i] == name) return PacketId{static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

std::vector<std::string> fixture_names() {
  return {"blackbox_case1", "blackbox_case2", "priority_cycle", "lstf_three_cp"};
}

Fixture build_fixture(std::string_view name) {
  if (name == "lstf_three_cp") return lstf_three_cp();
  if (name == "blackbox_case1") return blackbox_case(1);
  if (name == "blackbox_case2") return blackbox_case(2);
  if (name == "priority_cycle") return priority_cycle();
  throw ConfigError("unknown fixture '" + std::string(name) + "'");
}

std::vector<FixtureRow> fixture_rows(const Fixture& fx, const ScheduleRecord& rec) {
  std::vector<FixtureRow> rows;
  for (const auto& p : rec.packets) {
    for (const auto& h : p.hops) {
      const std::string& node = fx.net.node(h.node).name;
      if (std::find(fx.contended.begin(), fx.contended.end(), node) == fx.contended.end()) continue;
      rows.push_back({node, fx.packet_names.at(p.id.index()), h.arrival, h.sched});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const FixtureRow& a, const FixtureRow& b) {
    return std::tie(a.node, a.sched) < std::tie(b.node, b.sched);
  });
  return rows;
}

}  // namespace upsched
