#include "upsched/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

namespace upsched {

using ojson = nlohmann::ordered_json;

unsigned worker_threads() {
  if (const char* env = std::getenv("UPSCHED_THREADS")) {
    unsigned n = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, n);
    if (ec == std::errc() && ptr == end && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs fn(0..n-1) on up to worker_threads() threads. Results must be written
// by index so the outcome does not depend on the interleaving. The first
// failing index (lowest) has its exception rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t threads = std::min<std::size_t>(worker_threads(), n);
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

NodeId node_by_name(const Network& net, const std::string& name) {
  auto id = net.find_node(name);
  if (!id) throw ConfigError("traffic pair names unknown node '" + name + "'");
  return *id;
}

std::vector<std::pair<NodeId, NodeId>> resolve_pairs(const Topology& topo,
                                                    const TrafficConfig& t) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& [a, b] : t.pairs) {
    NodeId src = node_by_name(topo.net, a);
    NodeId dst = node_by_name(topo.net, b);
    if (src == dst) throw ConfigError("traffic pair '" + a + "' sends to itself");
    out.emplace_back(src, dst);
  }
  return out;
}

// Port carrying the most flows relative to its bandwidth.
PortId busiest_port(Network& net, std::span<const FlowSpec> flows) {
  std::map<std::uint32_t, std::size_t> uses;
  for (const auto& f : flows) {
    for (PortId p : net.route(net.shortest_route(f.src, f.dst)).ports) {
      if (!net.port(p).instant()) ++uses[p.value];
    }
  }
  PortId best;
  double best_load = -1;
  for (const auto& [p, n] : uses) {
    const double load = static_cast<double>(n) / static_cast<double>(net.port(PortId{p}).bandwidth_bps);
    if (load > best_load) {
      best_load = load;
      best = PortId{p};
    }
  }
  return best;
}

std::vector<FlowSpec> long_lived_flows(const Topology& topo, const TrafficConfig& t,
                                       std::uint64_t seed) {
  if (t.transport != TransportKind::Aimd) {
    throw ConfigError("long-lived traffic needs the aimd transport");
  }
  if (t.flows <= 0) throw ConfigError("long-lived traffic needs at least one flow");
  if (t.start_jitter < 0) throw ConfigError("start jitter must not be negative");
  auto pairs = resolve_pairs(topo, t);
  if (pairs.empty()) {
    const std::size_t half = topo.hosts.size() / 2;
    if (half == 0) throw ConfigError("topology has too few hosts for long-lived flows");
    for (std::size_t i = 0; i < half; ++i) pairs.emplace_back(topo.hosts[i], topo.hosts[half + i]);
  }
  Rng rng(seed);
  std::vector<FlowSpec> flows;
  for (int i = 0; i < t.flows; ++i) {
    FlowSpec f;
    f.id = FlowId{static_cast<std::uint32_t>(i)};
    f.src = pairs[static_cast<std::size_t>(i) % pairs.size()].first;
    f.dst = pairs[static_cast<std::size_t>(i) % pairs.size()].second;
    f.size_bytes = kUnboundedFlow;
    f.start = t.start_jitter > 0 ? rng.uniform_int(0, t.start_jitter - 1) : 0;
    f.transport = t.transport;
    f.init_window = t.init_window;
    f.mss_bytes = t.mss_bytes;
    flows.push_back(f);
  }
  return flows;
}

SimTime run_limit(const ScenarioConfig& cfg) { return cfg.horizon > 0 ? cfg.horizon : kTimeMax; }

std::string fraction_label(double f) {
  std::ostringstream os;
  os << "lstf@" << f;
  return os.str();
}

}  // namespace

std::int64_t bottleneck_bdp_bytes(Network& net, std::span<const FlowSpec> flows,
                                  PortId bottleneck) {
  if (!bottleneck.valid()) return 0;
  double rtt_sum = 0;
  std::size_t crossing = 0;
  for (const auto& f : flows) {
    const Route& r = net.route(net.shortest_route(f.src, f.dst));
    if (std::find(r.ports.begin(), r.ports.end(), bottleneck) == r.ports.end()) continue;
    SimTime forward = 0;
    for (PortId p : r.ports) forward += net.port(p).prop_delay;
    rtt_sum += static_cast<double>(forward + reverse_path_delay(net, f));
    ++crossing;
  }
  if (crossing == 0) return 0;
  const double bw = static_cast<double>(net.port(bottleneck).bandwidth_bps);
  return std::llround(rtt_sum / static_cast<double>(crossing) * bw / 8.0 /
                      static_cast<double>(kNsPerSec));
}

std::int64_t fair_share_bps(Network& net, std::span<const FlowSpec> flows) {
  std::map<std::uint32_t, std::int64_t> uses;
  for (const auto& f : flows) {
    for (PortId p : net.route(net.shortest_route(f.src, f.dst)).ports) {
      if (!net.port(p).instant()) ++uses[p.value];
    }
  }
  std::int64_t share = 0;
  for (const auto& [p, n] : uses) {
    const std::int64_t r = net.port(PortId{p}).bandwidth_bps / n;
    if (share == 0 || r < share) share = r;
  }
  return share;
}

Workload build_workload(const ScenarioConfig& cfg, double utilization) {
  Workload w{build_topology(cfg.topology), {}, PortId{}, 0, kUnboundedBuffer};
  const TrafficConfig& t = cfg.traffic;
  if (t.model == "poisson") {
    TrafficSpec spec;
    spec.target_utilization = utilization > 0 ? utilization : t.target_utilization;
    spec.sizes = t.sizes;
    spec.duration = t.duration;
    spec.mss_bytes = t.mss_bytes;
    spec.transport = t.transport;
    spec.pairs = resolve_pairs(w.topo, t);
    TrafficPlan plan = gen_traffic(w.topo, spec, cfg.seed);
    for (auto& f : plan.flows) f.init_window = t.init_window;
    w.flows = std::move(plan.flows);
    w.bottleneck = plan.bottleneck;
    w.offered_utilization = offered_utilization(w.topo.net, w.flows, w.bottleneck, t.duration);
  } else if (t.model == "long_lived") {
    w.flows = long_lived_flows(w.topo, t, cfg.seed);
    w.bottleneck = busiest_port(w.topo.net, w.flows);
  } else {
    throw ConfigError("unknown traffic model '" + t.model + "'");
  }

  switch (cfg.buffer.mode) {
    case BufferConfig::Mode::Unbounded:
      break;
    case BufferConfig::Mode::Bytes:
      if (cfg.buffer.bytes <= 0) throw ConfigError("buffer bytes must be positive");
      w.buffer_bytes = cfg.buffer.bytes;
      break;
    case BufferConfig::Mode::Bdp:
      if (cfg.buffer.bdp_multiple <= 0) throw ConfigError("bdp_multiple must be positive");
      w.buffer_bytes = std::max<std::int64_t>(
          1, std::llround(static_cast<double>(bottleneck_bdp_bytes(w.topo.net, w.flows, w.bottleneck)) *
                          cfg.buffer.bdp_multiple));
      break;
  }
  if (w.buffer_bytes != kUnboundedBuffer) w.topo.net.set_buffer_limit_all(w.buffer_bytes);
  return w;
}

ojson ReplayRow::to_json() const {
  ojson j;
  j["original"] = original;
  j["candidate"] = candidate;
  j["target_utilization"] = target_utilization;
  j["offered_utilization"] = offered_utilization;
  j["flows"] = flows;
  j["packets"] = packets;
  j["max_congestion_points"] = max_congestion_points;
  j["overdue"] = overdue;
  j["overdue_gt_threshold"] = overdue_gt_threshold;
  j["threshold_ns"] = threshold;
  j["frac_overdue"] = frac_overdue;
  j["frac_overdue_gt_threshold"] = frac_overdue_gt_threshold;
  if (std::isfinite(median_queueing_ratio)) {
    j["median_queueing_ratio"] = median_queueing_ratio;
  } else {
    j["median_queueing_ratio"] = "inf";
  }
  j["max_lateness_ns"] = max_lateness;
  return j;
}

const ReplayRow* ReplayStudy::find(std::string_view original, std::string_view candidate,
                                   double utilization) const {
  for (const auto& r : rows) {
    if (r.original == original && r.candidate == candidate &&
        (utilization <= 0 || std::abs(r.target_utilization - utilization) < 1e-9)) {
      return &r;
    }
  }
  return nullptr;
}

namespace {

struct ReplayUnit {
  const Workload* workload;
  const std::vector<Injection>* injections;
  double utilization;
  std::string original;
};

std::vector<ReplayRow> run_replay_unit(const ScenarioConfig& cfg, const ReplayUnit& unit,
                                       const std::filesystem::path* out_dir) {
  const Network& net = unit.workload->topo.net;
  const ScheduleRecord rec =
      record(net, *unit.injections, SchedulerAssignment::named(unit.original, net.node_count()), cfg.seed, run_limit(cfg));
  const std::size_t max_cp = congestion_counts(net, rec).max_count();
  if (out_dir && cfg.replay.write_schedule) {
    std::ofstream os(*out_dir / ("schedule_" + unit.original + ".tsv"));
    if (!os) throw ConfigError("cannot write schedule into " + out_dir->string());
    write_schedule_tsv(os, rec);
  }

  std::vector<ReplayRow> rows;
  for (const auto& tag : cfg.replay.candidates) {
    ReplayReport rep = replay(net, rec, ReplayCandidate::parse(tag), ReplayOptions{cfg.seed});
    rep.replayed = {};
    ReplayRow row;
    row.original = unit.original;
    row.candidate = tag;
    row.target_utilization = unit.utilization;
    row.offered_utilization = unit.workload->offered_utilization;
    row.flows = unit.workload->flows.size();
    row.packets = rep.packets.size();
    row.max_congestion_points = max_cp;
    row.overdue = rep.overdue;
    row.overdue_gt_threshold = rep.overdue_gt_threshold;
    row.threshold = rep.threshold;
    row.frac_overdue = rep.frac_overdue();
    row.frac_overdue_gt_threshold = rep.frac_overdue_gt_threshold();
    row.median_queueing_ratio = median_queueing_ratio(rep);
    for (const auto& p : rep.packets) row.max_lateness = std::max(row.max_lateness, p.lateness());
    if (out_dir && cfg.replay.per_packet_csv) {
      std::ofstream os(*out_dir / ("replay_" + unit.original + "_" + tag + ".csv"));
      if (!os) throw ConfigError("cannot write per-packet CSV into " + out_dir->string());
      write_report_csv(os, rep);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_replay_config(const ScenarioConfig& cfg) {
  if (cfg.traffic.model != "poisson" || cfg.traffic.transport != TransportKind::OpenLoop) {
    throw ConfigError("replay studies need Poisson open-loop traffic");
  }
  if (cfg.replay.originals.empty() || cfg.replay.candidates.empty()) {
    throw ConfigError("replay studies need at least one original and one candidate");
  }
}

ReplayStudy run_units(const ScenarioConfig& cfg, const std::vector<ReplayUnit>& units,
                      const std::filesystem::path* out_dir) {
  std::vector<std::vector<ReplayRow>> parts(units.size());
  parallel_for(units.size(), [&](std::size_t i) { parts[i] = run_replay_unit(cfg, units[i], out_dir); });
  ReplayStudy study{cfg.name, cfg.seed, {}};
  for (auto& part : parts) {
    for (auto& r : part) study.rows.push_back(std::move(r));
  }
  return study;
}

}  // namespace

ReplayStudy run_replay_study(const ScenarioConfig& cfg, const std::filesystem::path* out_dir) {
  check_replay_config(cfg);
  Workload w = build_workload(cfg);
  const std::vector<Injection> inj = expand_open_loop(w.topo.net, w.flows);
  std::vector<ReplayUnit> units;
  for (const auto& o : cfg.replay.originals) {
    units.push_back({&w, &inj, cfg.traffic.target_utilization, o});
  }
  return run_units(cfg, units, out_dir);
}

ReplayStudy run_sweep_study(const ScenarioConfig& cfg) {
  check_replay_config(cfg);
  if (cfg.sweep.utilizations.empty()) throw ConfigError("sweep needs at least one utilization");
  std::vector<Workload> workloads;
  std::vector<std::vector<Injection>> injections;
  workloads.reserve(cfg.sweep.utilizations.size());
  injections.reserve(cfg.sweep.utilizations.size());
  for (double u : cfg.sweep.utilizations) {
    if (!(u > 0)) throw ConfigError("sweep utilizations must be positive");
    workloads.push_back(build_workload(cfg, u));
    injections.push_back(expand_open_loop(workloads.back().topo.net, workloads.back().flows));
  }
  std::vector<ReplayUnit> units;
  for (std::size_t k = 0; k < workloads.size(); ++k) {
    for (const auto& o : cfg.replay.originals) {
      units.push_back({&workloads[k], &injections[k], cfg.sweep.utilizations[k], o});
    }
  }
  return run_units(cfg, units, nullptr);
}

const FctRow* ObjectiveStudy::find_fct(std::string_view scheduler) const {
  for (const auto& r : fct) {
    if (r.scheduler == scheduler) return &r;
  }
  return nullptr;
}

const DelayRow* ObjectiveStudy::find_delay(std::string_view scheduler) const {
  for (const auto& r : delay) {
    if (r.scheduler == scheduler) return &r;
  }
  return nullptr;
}

const FairnessRow* ObjectiveStudy::find_fairness(std::string_view label) const {
  for (const auto& r : fairness) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

namespace {

struct ClosedLoopRun {
  std::vector<FlowOutcome> outcomes;
  std::uint64_t drops = 0;
  std::uint64_t retransmits = 0;
  std::size_t finished = 0;
};

// One AIMD run. Routes and ack delays are precomputed so that concurrent
// runs only read the network.
struct ClosedLoopSetup {
  const Network* net;
  const std::vector<FlowSpec>* flows;
  std::vector<RouteId> routes;
  std::vector<SimTime> ack_delays;
};

ClosedLoopSetup closed_loop_setup(Workload& w) {
  if (w.flows.empty()) throw ConfigError("workload has no flows");
  for (const auto& f : w.flows) {
    if (f.transport != TransportKind::Aimd) {
      throw ConfigError("fct and fairness studies need the aimd transport");
    }
  }
  ClosedLoopSetup s{&w.topo.net, &w.flows, {}, {}};
  for (const auto& f : w.flows) {
    s.routes.push_back(w.topo.net.shortest_route(f.src, f.dst));
    s.ack_delays.push_back(reverse_path_delay(w.topo.net, f));
  }
  return s;
}

ClosedLoopRun run_closed_loop(const ClosedLoopSetup& s, SchedulerKind kind, SlackPolicy* policy,
                              std::uint64_t seed, SimTime until, ThroughputMeter* meter) {
  Simulation sim(*s.net, SchedulerAssignment::uniform(kind), seed);
  if (meter) {
    sim.on_exit = [meter](const Packet& p, SimTime at) { meter->add(p.flow.value, at, p.size_bits); };
  }
  std::vector<const AimdSource*> sources;
  for (std::size_t i = 0; i < s.flows->size(); ++i) {
    auto src = std::make_unique<AimdSource>((*s.flows)[i], s.routes[i], s.ack_delays[i], policy);
    sources.push_back(src.get());
    sim.add_source(std::move(src));
  }
  sim.run(until);
  ClosedLoopRun out;
  out.drops = sim.dropped_count();
  for (const auto* src : sources) {
    out.outcomes.push_back(src->outcome());
    out.retransmits += src->counters().retransmits;
    if (src->finished()) ++out.finished;
  }
  return out;
}

void run_fct(const ScenarioConfig& cfg, Workload& w, ObjectiveStudy& study) {
  const ClosedLoopSetup setup = closed_loop_setup(w);
  const auto& tags = cfg.objective.schedulers;
  study.fct.resize(tags.size());
  parallel_for(tags.size(), [&](std::size_t i) {
    const bool slack = tags[i] == "lstf";
    std::unique_ptr<SlackPolicy> policy;
    if (slack) policy = make_policy(cfg.objective.policy, cfg.objective.policy_param);
    ClosedLoopRun run = run_closed_loop(setup, SchedulerKind::parse(tags[i]), policy.get(),
                                        cfg.seed, run_limit(cfg), nullptr);
    FctRow& row = study.fct[i];
    row.scheduler = tags[i];
    row.flows = run.outcomes.size();
    row.finished = run.finished;
    row.drops = run.drops;
    row.retransmits = run.retransmits;
    row.mean_fct = mean_fct(run.outcomes);
    row.buckets = fct_buckets(run.outcomes, cfg.objective.bucket_edges);
  });
}

bool same_trace(const std::vector<DequeueRecord>& a, const std::vector<DequeueRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].pkt != b[i].pkt || a[i].port != b[i].port || a[i].at != b[i].at) return false;
  }
  return true;
}

void run_tail(const ScenarioConfig& cfg, Workload& w, ObjectiveStudy& study) {
  for (const auto& f : w.flows) {
    if (f.transport != TransportKind::OpenLoop) {
      throw ConfigError("tail studies need open-loop traffic");
    }
  }
  auto policy = make_policy(cfg.objective.policy, cfg.objective.policy_param);
  const std::vector<Injection> inj = expand_open_loop(w.topo.net, w.flows, policy.get());
  const Network& net = w.topo.net;
  const auto& tags = cfg.objective.schedulers;

  std::vector<std::vector<DequeueRecord>> traces(tags.size());
  study.delay.resize(tags.size());
  parallel_for(tags.size(), [&](std::size_t i) {
    Simulation sim(net, SchedulerAssignment::uniform(SchedulerKind::parse(tags[i])), cfg.seed);
    const bool keep = tags[i] == "lstf" || tags[i] == "fifo_plus";
    std::size_t dequeues = 0;
    sim.on_dequeue = [&, keep](const DequeueRecord& d) {
      ++dequeues;
      if (keep) traces[i].push_back(d);
    };
    for (const auto& x : inj) sim.inject(make_packet(x));
    sim.run(run_limit(cfg));

    std::vector<SimTime> all;
    std::map<std::size_t, std::vector<SimTime>> by_links;
    for (const auto& x : inj) {
      if (sim.dropped(x.id)) continue;
      const SimTime out = sim.exit_time(x.id);
      if (out < 0) continue;
      const SimTime d = out - x.at;
      all.push_back(d);
      const std::size_t nodes = net.route(x.route).nodes.size();
      by_links[nodes >= 3 ? nodes - 3 : 0].push_back(d);
    }
    DelayRow& row = study.delay[i];
    row.scheduler = tags[i];
    row.all = delay_percentiles(all);
    for (auto& [k, v] : by_links) row.by_links[k] = delay_percentiles(v);
    row.dequeues = dequeues;
  });

  std::optional<std::size_t> lstf, fifo_plus;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == "lstf") lstf = i;
    if (tags[i] == "fifo_plus") fifo_plus = i;
  }
  if (lstf && fifo_plus) study.lstf_trace_equals_fifo_plus = same_trace(traces[*lstf], traces[*fifo_plus]);
}

void run_fairness(const ScenarioConfig& cfg, Workload& w, ObjectiveStudy& study) {
  if (cfg.horizon <= 0) throw ConfigError("fairness studies need a positive horizon");
  if (cfg.objective.window <= 0) throw ConfigError("fairness window must be positive");
  const ClosedLoopSetup setup = closed_loop_setup(w);
  study.fair_share_bps = fair_share_bps(w.topo.net, w.flows);

  struct Job {
    std::string label;
    std::string scheduler;
    std::int64_t r_est;
  };
  std::vector<Job> jobs;
  for (const auto& tag : cfg.objective.schedulers) {
    if (tag == "lstf") {
      for (double f : cfg.objective.r_est_fractions) {
        const auto r = std::llround(static_cast<double>(study.fair_share_bps) * f);
        if (r <= 0) throw ConfigError("r_est fraction yields a non-positive rate");
        jobs.push_back({fraction_label(f), "lstf", r});
      }
    } else {
      jobs.push_back({tag, tag, 0});
    }
  }

  study.fairness.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Job& job = jobs[i];
    std::unique_ptr<FairPolicy> policy;
    if (job.r_est > 0) policy = std::make_unique<FairPolicy>(job.r_est);
    ThroughputMeter meter(w.flows.size(), cfg.objective.window, 0);
    ClosedLoopRun run = run_closed_loop(setup, SchedulerKind::parse(job.scheduler), policy.get(),
                                        cfg.seed, cfg.horizon, &meter);
    FairnessRow& row = study.fairness[i];
    row.label = job.label;
    row.scheduler = job.scheduler;
    row.r_est_bps = job.r_est;
    row.drops = run.drops;
    row.series = meter.jain_series(cfg.horizon);
    row.time_to_95 = time_to_fairness(row.series, 0.95);
    row.time_to_99 = time_to_fairness(row.series, 0.99);
    if (!row.series.empty()) row.final_index = row.series.back().index;
  });
}

}  // namespace

ObjectiveStudy run_objective_study(const ScenarioConfig& cfg) {
  if (cfg.objective.schedulers.empty()) throw ConfigError("objective study lists no schedulers");
  Workload w = build_workload(cfg);
  ObjectiveStudy study;
  study.scenario = cfg.name;
  study.metric = cfg.objective.metric;
  study.seed = cfg.seed;
  study.buffer_bytes = w.buffer_bytes;
  if (cfg.objective.metric == "fct") {
    run_fct(cfg, w, study);
  } else if (cfg.objective.metric == "tail") {
    run_tail(cfg, w, study);
  } else if (cfg.objective.metric == "fairness") {
    run_fairness(cfg, w, study);
  } else {
    throw ConfigError("unknown objective metric '" + cfg.objective.metric + "'");
  }
  return study;
}

std::optional<bool> FixtureStudy::lstf_matches() const {
  if (expected_lstf.empty()) return std::nullopt;
  return expected_lstf == actual_lstf;
}

const FixtureCandidateResult* FixtureStudy::find(std::string_view candidate) const {
  for (const auto& c : candidates) {
    if (c.candidate == candidate) return &c;
  }
  return nullptr;
}

namespace {
constexpr std::size_t kMaxOrderingPackets = 5;

std::vector<std::string> overdue_names(const Fixture& fx, const ReplayReport& rep) {
  std::vector<std::string> out;
  for (const auto& o : rep.packets) {
    if (o.overdue()) out.push_back(fx.packet_names.at(o.id.index()));
  }
  return out;
}
}  // namespace

FixtureStudy run_fixture_study(std::string_view name) {
  const Fixture fx = build_fixture(name);
  const ScheduleRecord rec = record(fx.net, fx.injections, fx.original_schedulers(), 1);
  FixtureStudy s;
  s.name = fx.name;
  s.unit = fx.unit;
  s.expected_original = fx.original;
  s.actual_original = fixture_rows(fx, rec);
  s.expected_lstf = fx.lstf_replay;
  for (const auto& p : rec.packets) {
    s.io.push_back({fx.packet_names.at(p.id.index()), {p.ingress, p.output}});
  }

  for (const char* tag :
       {"lstf", "lstf_preemptive", "edf", "priority_o", "omniscient", "omniscient_np"}) {
    const ReplayReport rep = replay(fx.net, rec, ReplayCandidate::parse(tag));
    if (std::string_view(tag) == "lstf") s.actual_lstf = fixture_rows(fx, rep.replayed);
    s.candidates.push_back({tag, overdue_names(fx, rep)});
  }

  const std::size_t n = rec.packets.size();
  if (n <= kMaxOrderingPackets) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const ReplayCandidate plain = ReplayCandidate::parse("priority");
    do {
      std::vector<std::int64_t> prio(n);
      FixtureOrderingResult r;
      for (std::size_t rank = 0; rank < n; ++rank) {
        prio[order[rank]] = static_cast<std::int64_t>(rank);
        r.order.push_back(fx.packet_names.at(rec.packets[order[rank]].id.index()));
      }
      ReplayOptions opt;
      opt.priorities = &prio;
      r.overdue = overdue_names(fx, replay(fx.net, rec, plain, opt));
      s.orderings.push_back(std::move(r));
    } while (std::next_permutation(order.begin(), order.end()));
  }
  return s;
}

namespace {

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }
ojson opt_json(const std::optional<SimTime>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson delay_json(const DelayStats& d) {
  ojson j;
  j["count"] = d.count;
  j["mean_ns"] = d.mean;
  j["p99_ns"] = d.p99;
  return j;
}

ojson rows_json(const std::vector<FixtureRow>& rows) {
  ojson a = ojson::array();
  for (const auto& r : rows) {
    a.push_back({{"node", r.node}, {"packet", r.packet}, {"arrival_ns", r.arrival}, {"sched_ns", r.sched}});
  }
  return a;
}

std::string fmt_fixed(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::string fmt_ms(std::optional<double> ns) { return ns ? fmt_fixed(*ns / 1e6, 4) : "-"; }

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

}  // namespace

std::string replay_summary_jsonl(const ReplayStudy& study) {
  std::string out;
  for (const auto& r : study.rows) {
    ojson j;
    j["kind"] = "replay";
    j["scenario"] = study.scenario;
    j["seed"] = study.seed;
    const ojson row = r.to_json();
    for (const auto& [k, v] : row.items()) j[k] = v;
    out += j.dump() + "\n";
  }
  return out;
}

std::string objective_summary_jsonl(const ObjectiveStudy& study) {
  std::string out;
  auto head = [&](const char* kind) {
    ojson j;
    j["kind"] = kind;
    j["scenario"] = study.scenario;
    j["seed"] = study.seed;
    return j;
  };
  for (const auto& r : study.fct) {
    ojson j = head("fct");
    j["scheduler"] = r.scheduler;
    j["buffer_bytes"] = study.buffer_bytes;
    j["flows"] = r.flows;
    j["finished"] = r.finished;
    j["drops"] = r.drops;
    j["retransmits"] = r.retransmits;
    j["mean_fct_ns"] = opt_json(r.mean_fct);
    ojson b = ojson::array();
    for (const auto& x : r.buckets) {
      b.push_back({{"lo_bytes", x.lo_bytes}, {"hi_bytes", x.hi_bytes}, {"flows", x.flows},
                   {"mean_fct_ns", opt_json(x.mean_fct)}});
    }
    j["buckets"] = b;
    out += j.dump() + "\n";
  }
  for (const auto& r : study.delay) {
    ojson j = head("tail");
    j["scheduler"] = r.scheduler;
    j["all"] = delay_json(r.all);
    ojson by = ojson::object();
    for (const auto& [k, v] : r.by_links) by[std::to_string(k)] = delay_json(v);
    j["by_router_links"] = by;
    out += j.dump() + "\n";
  }
  if (study.lstf_trace_equals_fifo_plus) {
    ojson j = head("trace_equivalence");
    j["a"] = "lstf";
    j["b"] = "fifo_plus";
    j["identical"] = *study.lstf_trace_equals_fifo_plus;
    out += j.dump() + "\n";
  }
  for (const auto& r : study.fairness) {
    ojson j = head("fairness");
    j["label"] = r.label;
    j["scheduler"] = r.scheduler;
    j["fair_share_bps"] = study.fair_share_bps;
    j["r_est_bps"] = r.r_est_bps;
    j["time_to_095_ns"] = opt_json(r.time_to_95);
    j["time_to_099_ns"] = opt_json(r.time_to_99);
    j["final_index"] = opt_json(r.final_index);
    j["drops"] = r.drops;
    out += j.dump() + "\n";
  }
  return out;
}

std::string fixture_summary_jsonl(const FixtureStudy& s) {
  ojson j;
  j["kind"] = "fixture";
  j["fixture"] = s.name;
  j["unit_ns"] = s.unit;
  j["original_matches"] = s.original_matches();
  auto lm = s.lstf_matches();
  j["lstf_matches"] = lm ? ojson(*lm) : ojson(nullptr);
  j["original"] = rows_json(s.actual_original);
  ojson c = ojson::object();
  for (const auto& x : s.candidates) c[x.candidate] = x.overdue;
  j["overdue"] = c;
  if (!s.orderings.empty()) {
    ojson o = ojson::array();
    for (const auto& x : s.orderings) o.push_back({{"order", x.order}, {"overdue", x.overdue}});
    j["static_priority_orderings"] = o;
  }
  return j.dump() + "\n";
}

std::string format_replay_table(const ReplayStudy& study) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "util" << std::setw(14) << "original" << std::setw(17)
     << "candidate" << std::right << std::setw(10) << "packets" << std::setw(11) << "overdue"
     << std::setw(13) << "overdue>T" << std::setw(10) << "med.q" << std::setw(6) << "cp" << "\n";
  for (const auto& r : study.rows) {
    os << std::left << std::setw(8) << fmt_fixed(r.target_utilization, 2) << std::setw(14)
       << r.original << std::setw(17) << r.candidate << std::right << std::setw(10) << r.packets
       << std::setw(10) << fmt_fixed(100 * r.frac_overdue, 3) << "%" << std::setw(12)
       << fmt_fixed(100 * r.frac_overdue_gt_threshold, 3) << "%" << std::setw(10)
       << (std::isfinite(r.median_queueing_ratio) ? fmt_fixed(r.median_queueing_ratio, 3) : "inf")
       << std::setw(6) << r.max_congestion_points << "\n";
  }
  return os.str();
}

std::string format_objective_table(const ObjectiveStudy& study) {
  std::ostringstream os;
  if (!study.fct.empty()) {
    os << "buffer: "
       << (study.buffer_bytes == kUnboundedBuffer ? std::string("unbounded")
                                                  : std::to_string(study.buffer_bytes) + " bytes")
       << "\n";
    os << std::left << std::setw(10) << "scheduler" << std::right << std::setw(14) << "mean fct ms"
       << std::setw(10) << "drops" << std::setw(10) << "unfinished";
    for (const auto& b : study.fct.front().buckets) {
      os << std::setw(16) << ("[" + std::to_string(b.lo_bytes) + ",)");
    }
    os << "\n";
    for (const auto& r : study.fct) {
      os << std::left << std::setw(10) << r.scheduler << std::right << std::setw(14)
         << fmt_ms(r.mean_fct) << std::setw(10) << r.drops << std::setw(10)
         << (r.flows - r.finished);
      for (const auto& b : r.buckets) os << std::setw(16) << fmt_ms(b.mean_fct);
      os << "\n";
    }
  }
  if (!study.delay.empty()) {
    os << std::left << std::setw(12) << "scheduler" << std::right << std::setw(12) << "packets"
       << std::setw(14) << "mean ms" << std::setw(14) << "p99 ms" << "\n";
    for (const auto& r : study.delay) {
      os << std::left << std::setw(12) << r.scheduler << std::right << std::setw(12)
         << r.all.count << std::setw(14) << fmt_ms(r.all.mean) << std::setw(14)
         << fmt_ms(static_cast<double>(r.all.p99)) << "\n";
      for (const auto& [k, v] : r.by_links) {
        os << std::left << std::setw(12) << ("  " + std::to_string(k) + " links") << std::right
           << std::setw(12) << v.count << std::setw(14) << fmt_ms(v.mean) << std::setw(14)
           << fmt_ms(static_cast<double>(v.p99)) << "\n";
      }
    }
    if (study.lstf_trace_equals_fifo_plus) {
      os << "lstf and fifo_plus dequeue traces identical: "
         << (*study.lstf_trace_equals_fifo_plus ? "yes" : "no") << "\n";
    }
  }
  if (!study.fairness.empty()) {
    os << "fair share: " << study.fair_share_bps << " bps\n";
    os << std::left << std::setw(14) << "run" << std::right << std::setw(14) << "r_est bps"
       << std::setw(12) << "t95 ms" << std::setw(12) << "t99 ms" << std::setw(10) << "final"
       << "\n";
    auto t = [](const std::optional<SimTime>& v) {
      return v ? fmt_ms(static_cast<double>(*v)) : std::string("never");
    };
    for (const auto& r : study.fairness) {
      os << std::left << std::setw(14) << r.label << std::right << std::setw(14) << r.r_est_bps
         << std::setw(12) << t(r.time_to_95) << std::setw(12) << t(r.time_to_99) << std::setw(10)
         << (r.final_index ? fmt_fixed(*r.final_index, 4) : "-") << "\n";
    }
  }
  return os.str();
}

std::string format_fixture_report(const FixtureStudy& s) {
  std::ostringstream os;
  auto units = [&](SimTime t) { return fmt_fixed(static_cast<double>(t) / s.unit, 2); };
  auto table = [&](const char* title, const std::vector<FixtureRow>& want,
                   const std::vector<FixtureRow>& got) {
    os << title << "\n";
    os << "  " << std::left << std::setw(6) << "node" << std::setw(8) << "packet" << std::setw(18)
       << "expected (i, s)" << std::setw(18) << "actual (i, s)" << "\n";
    const std::size_t n = std::max(want.size(), got.size());
    for (std::size_t k = 0; k < n; ++k) {
      const FixtureRow* w = k < want.size() ? &want[k] : nullptr;
      const FixtureRow* g = k < got.size() ? &got[k] : nullptr;
      const FixtureRow& any = w ? *w : *g;
      os << "  " << std::left << std::setw(6) << any.node << std::setw(8) << any.packet
         << std::setw(18)
         << (w ? "(" + units(w->arrival) + ", " + units(w->sched) + ")" : std::string("-"))
         << std::setw(18)
         << (g ? "(" + units(g->arrival) + ", " + units(g->sched) + ")" : std::string("-"))
         << ((w && g && *w == *g) ? "" : "  MISMATCH") << "\n";
    }
  };
  os << "fixture " << s.name << " (times in units of " << s.unit << " ns)\n";
  table("original schedule", s.expected_original, s.actual_original);
  os << "original matches: " << (s.original_matches() ? "yes" : "no") << "\n";
  if (auto m = s.lstf_matches()) {
    table("lstf replay", s.expected_lstf, s.actual_lstf);
    os << "lstf replay matches: " << (*m ? "yes" : "no") << "\n";
  }
  os << "packets (i, o):";
  for (const auto& [name, io] : s.io) {
    os << " " << name << "(" << units(io.first) << ", " << units(io.second) << ")";
  }
  os << "\n";
  for (const auto& c : s.candidates) {
    os << "  " << std::left << std::setw(17) << c.candidate << "overdue: "
       << (c.overdue.empty() ? std::string("none") : join(c.overdue, " ")) << "\n";
  }
  if (!s.orderings.empty()) {
    os << "static priority orderings (highest first):\n";
    for (const auto& o : s.orderings) {
      os << "  " << std::left << std::setw(14) << join(o.order, ">") << "overdue: "
         << (o.overdue.empty() ? std::string("none") : join(o.overdue, " ")) << "\n";
    }
  }
  return os.str();
}

std::vector<std::pair<std::string, std::string>> objective_csvs(const ObjectiveStudy& study) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!study.fct.empty()) {
    std::ostringstream os;
    os << "scheduler,lo_bytes,hi_bytes,flows,mean_fct_ns\n";
    for (const auto& r : study.fct) {
      for (const auto& b : r.buckets) {
        os << r.scheduler << ',' << b.lo_bytes << ',' << b.hi_bytes << ',' << b.flows << ','
           << (b.mean_fct ? fmt_fixed(*b.mean_fct, 1) : "") << '\n';
      }
    }
    out.emplace_back("fct_buckets.csv", os.str());
  }
  if (!study.delay.empty()) {
    std::ostringstream os;
    os << "scheduler,router_links,packets,mean_ns,p99_ns\n";
    for (const auto& r : study.delay) {
      os << r.scheduler << ",all," << r.all.count << ',' << fmt_fixed(r.all.mean, 1) << ','
         << r.all.p99 << '\n';
      for (const auto& [k, v] : r.by_links) {
        os << r.scheduler << ',' << k << ',' << v.count << ',' << fmt_fixed(v.mean, 1) << ','
           << v.p99 << '\n';
      }
    }
    out.emplace_back("delay.csv", os.str());
  }
  if (!study.fairness.empty()) {
    std::ostringstream os;
    os << "run,window_start_ns,jain_index\n";
    for (const auto& r : study.fairness) {
      for (const auto& p : r.series) {
        os << r.label << ',' << p.window_start << ',' << (p.index ? fmt_fixed(*p.index, 6) : "")
           << '\n';
      }
    }
    out.emplace_back("jain.csv", os.str());
  }
  return out;
}

}  // namespace upsched
