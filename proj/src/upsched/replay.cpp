#include "upsched/replay.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace upsched {

Packet make_packet(const Injection& inj) {
  Packet p;
  p.id = inj.id;
  p.flow = inj.flow;
  p.size_bits = inj.size_bits;
  p.ingress = inj.at;
  p.route = inj.route;
  p.header = inj.header;
  p.flow_bytes = inj.flow_bytes;
  p.remaining_flow_bytes = inj.remaining_flow_bytes;
  return p;
}

const PacketRecord* ScheduleRecord::find(PacketId id) const {
  auto it = std::lower_bound(packets.begin(), packets.end(), id,
                             [](const PacketRecord& r, PacketId v) { return r.id < v; });
  return it != packets.end() && it->id == id ? &*it : nullptr;
}

std::size_t CongestionProfile::max_count() const {
  std::size_t m = 0;
  for (const auto& v : points) m = std::max(m, v.size());
  return m;
}

ScheduleRecord record_from(const Simulation& sim) {
  ScheduleRecord rec;
  const Network& net = sim.network();
  for (std::size_t i = 0; i < sim.packet_slots(); ++i) {
    const PacketId id{static_cast<std::uint32_t>(i)};
    if (!sim.has_packet(id)) continue;
    if (sim.dropped(id)) {
      throw SimulationError("packet " + std::to_string(i) + " was dropped while recording");
    }
    if (sim.exit_time(id) < 0) {
      throw SimulationError("packet " + std::to_string(i) + " never left the network");
    }
    const Packet& p = sim.packet(id);
    const Route& r = net.route(p.route);
    PacketRecord pr;
    pr.id = id;
    pr.flow = p.flow;
    pr.route = p.route;
    pr.size_bits = p.size_bits;
    pr.ingress = p.ingress;
    pr.output = sim.exit_time(id);
    const auto hops = sim.hops(id);
    pr.hops.reserve(hops.size());
    for (std::size_t k = 0; k < hops.size(); ++k) {
      pr.hops.push_back(HopRecord{r.nodes[k], hops[k].arrival, hops[k].start, hops[k].exit});
    }
    rec.packets.push_back(std::move(pr));
  }
  return rec;
}

ScheduleRecord record(const Network& net, std::span<const Injection> injections,
                      const SchedulerAssignment& schedulers, std::uint64_t seed, SimTime until) {
  Simulation sim(net, schedulers, seed);
  for (const auto& inj : injections) sim.inject(make_packet(inj));
  sim.run(until);
  return record_from(sim);
}

SimTime hop_wait(const Network& net, const PacketRecord& p, std::size_t hop) {
  const HopRecord& h = p.hops.at(hop);
  return h.exit - h.arrival - net.hop_transmission(p.size_bits, p.route, hop);
}

CongestionProfile congestion_counts(const Network& net, const ScheduleRecord& rec) {
  CongestionProfile prof;
  prof.points.reserve(rec.packets.size());
  for (const auto& p : rec.packets) {
    std::vector<NodeId> pts;
    for (std::size_t k = 0; k < p.hops.size(); ++k) {
      if (hop_wait(net, p, k) > 0) pts.push_back(p.hops[k].node);
    }
    prof.points.push_back(std::move(pts));
  }
  return prof;
}

namespace {

SimTime full_t_min(const Network& net, const PacketRecord& p) {
  return net.hop_t_min(p.size_bits, p.route, 0, p.hops.size() - 1);
}

// Hop index of the node whose decision determines a single-queue packet.
std::size_t deciding_hop(const Network& net, const PacketRecord& p, const CongestionProfile& prof,
                         std::size_t idx) {
  const Route& r = net.route(p.route);
  if (!prof.points[idx].empty()) return net.hop_of(r, prof.points[idx].front());
  std::size_t best = p.hops.size() - 1;
  std::int64_t best_bw = std::numeric_limits<std::int64_t>::max();
  for (std::size_t k = 0; k < r.hops(); ++k) {
    const Port& port = net.port(r.ports[k]);
    if (port.instant()) continue;
    if (port.bandwidth_bps <= best_bw) {
      best_bw = port.bandwidth_bps;
      best = k;
    }
  }
  return best;
}

}  // namespace

std::vector<SimTime> init_lstf_headers(const Network& net, const ScheduleRecord& rec) {
  std::vector<SimTime> out;
  out.reserve(rec.packets.size());
  for (const auto& p : rec.packets) {
    const SimTime slack = p.output - p.ingress - full_t_min(net, p);
    if (slack < 0) {
      throw SimulationError("negative slack for packet " + std::to_string(p.id.value) +
                            ": record does not match the topology");
    }
    out.push_back(slack);
  }
  return out;
}

std::vector<std::int64_t> init_priority_headers(const Network& net, const ScheduleRecord& rec,
                                                PriorityMode mode,
                                                const CongestionProfile* profile) {
  std::vector<std::int64_t> out;
  out.reserve(rec.packets.size());
  if (mode == PriorityMode::OutputTime) {
    for (const auto& p : rec.packets) out.push_back(p.output);
    return out;
  }
  CongestionProfile local;
  if (!profile) {
    local = congestion_counts(net, rec);
    profile = &local;
  }
  if (profile->max_count() > 1) {
    throw ContractViolation("single congestion point priorities need at most one queue per packet");
  }
  for (std::size_t i = 0; i < rec.packets.size(); ++i) {
    const auto& p = rec.packets[i];
    const std::size_t k = deciding_hop(net, p, *profile, i);
    const SimTime down = net.hop_t_min(p.size_bits, p.route, k, p.hops.size() - 1);
    out.push_back(p.output - down + net.hop_transmission(p.size_bits, p.route, k));
  }
  return out;
}

std::vector<std::vector<SimTime>> init_omniscient_headers(const ScheduleRecord& rec) {
  std::vector<std::vector<SimTime>> out;
  out.reserve(rec.packets.size());
  for (const auto& p : rec.packets) {
    std::vector<SimTime> v;
    v.reserve(p.hops.size());
    for (const auto& h : p.hops) v.push_back(h.sched);
    out.push_back(std::move(v));
  }
  return out;
}

ReplayCandidate ReplayCandidate::parse(std::string_view tag) {
  using H = Header;
  ReplayCandidate c;
  c.tag = std::string(tag);
  if (tag == "lstf") {
    c.kind = {Discipline::Lstf, false};
    c.header = H::Slack;
  } else if (tag == "lstf_preemptive") {
    c.kind = {Discipline::Lstf, true};
    c.header = H::Slack;
  } else if (tag == "priority_o") {
    c.kind = {Discipline::Priority, false};
    c.header = H::OutputPriority;
  } else if (tag == "priority_cp") {
    c.kind = {Discipline::Priority, false};
    c.header = H::SingleCpPriority;
  } else if (tag == "omniscient") {
    c.kind = {Discipline::Omniscient, true};
    c.header = H::HopTimes;
  } else if (tag == "omniscient_np") {
    c.kind = {Discipline::Omniscient, false};
    c.header = H::HopTimes;
  } else if (tag == "edf") {
    c.kind = {Discipline::Edf, false};
    c.header = H::TargetExit;
  } else if (tag == "edf_preemptive") {
    c.kind = {Discipline::Edf, true};
    c.header = H::TargetExit;
  } else {
    c.kind = SchedulerKind::parse(tag);
    c.header = H::None;
  }
  return c;
}

double PacketOutcome::queueing_ratio() const {
  if (original_queueing == 0) {
    return replay_queueing == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(replay_queueing) / static_cast<double>(original_queueing);
}

double ReplayReport::frac_overdue() const {
  return packets.empty() ? 0.0 : static_cast<double>(overdue) / packets.size();
}

double ReplayReport::frac_overdue_gt_threshold() const {
  return packets.empty() ? 0.0 : static_cast<double>(overdue_gt_threshold) / packets.size();
}

SimTime bottleneck_threshold(const Network& net, const ScheduleRecord& rec) {
  std::int64_t mtu = 0;
  std::int64_t min_bw = std::numeric_limits<std::int64_t>::max();
  std::vector<std::uint8_t> seen(net.route_count(), 0);
  for (const auto& p : rec.packets) {
    mtu = std::max(mtu, p.size_bits);
    if (seen[p.route.index()]) continue;
    seen[p.route.index()] = 1;
    for (PortId pid : net.route(p.route).ports) {
      const Port& port = net.port(pid);
      if (!port.instant()) min_bw = std::min(min_bw, port.bandwidth_bps);
    }
  }
  if (mtu == 0 || min_bw == std::numeric_limits<std::int64_t>::max()) return 0;
  return transmission_ticks(mtu, min_bw);
}

std::vector<Injection> injections_of(const ScheduleRecord& rec) {
  std::vector<Injection> out;
  out.reserve(rec.packets.size());
  for (const auto& p : rec.packets) {
    Injection inj;
    inj.id = p.id;
    inj.flow = p.flow;
    inj.route = p.route;
    inj.size_bits = p.size_bits;
    inj.at = p.ingress;
    out.push_back(std::move(inj));
  }
  return out;
}

ReplayReport replay(const Network& net, const ScheduleRecord& rec,
                    const ReplayCandidate& candidate, const ReplayOptions& options) {
  using H = ReplayCandidate::Header;
  std::vector<Injection> inj = injections_of(rec);

  std::vector<SimTime> slacks;
  std::vector<std::int64_t> prios;
  std::vector<std::vector<SimTime>> hop_times;
  switch (candidate.header) {
    case H::Slack:
      slacks = init_lstf_headers(net, rec);
      break;
    case H::OutputPriority:
      prios = init_priority_headers(net, rec, PriorityMode::OutputTime);
      break;
    case H::SingleCpPriority:
      prios = init_priority_headers(net, rec, PriorityMode::SingleCongestionPoint);
      break;
    case H::HopTimes:
      hop_times = init_omniscient_headers(rec);
      break;
    case H::TargetExit:
    case H::None:
      break;
  }
  if (options.priorities) {
    if (options.priorities->size() != rec.packets.size()) {
      throw ContractViolation("replay: priority override has the wrong length");
    }
    prios = *options.priorities;
  }
  for (std::size_t i = 0; i < inj.size(); ++i) {
    SchedHeader& h = inj[i].header;
    if (!slacks.empty()) h.slack = slacks[i];
    if (!prios.empty()) h.priority = prios[i];
    if (!hop_times.empty()) h.hop_times = std::move(hop_times[i]);
    h.target_exit = rec.packets[i].output;
  }

  Simulation sim(net, SchedulerAssignment::uniform(candidate.kind), options.seed);
  if (options.dequeue_trace) {
    auto* trace = options.dequeue_trace;
    sim.on_dequeue = [trace](const DequeueRecord& d) { trace->push_back(d); };
  }
  for (const auto& i : inj) sim.inject(make_packet(i));
  sim.run();

  ReplayReport rep;
  rep.candidate = candidate.tag;
  rep.replayed = record_from(sim);
  rep.threshold = bottleneck_threshold(net, rec);
  rep.packets.reserve(rec.packets.size());
  for (std::size_t i = 0; i < rec.packets.size(); ++i) {
    const PacketRecord& orig = rec.packets[i];
    const PacketRecord& now = rep.replayed.packets.at(i);
    const SimTime tmin = full_t_min(net, orig);
    PacketOutcome o;
    o.id = orig.id;
    o.flow = orig.flow;
    o.ingress = orig.ingress;
    o.original_output = orig.output;
    o.replay_output = now.output;
    o.original_queueing = orig.output - orig.ingress - tmin;
    o.replay_queueing = now.output - now.ingress - tmin;
    if (o.overdue()) ++rep.overdue;
    if (o.lateness() > rep.threshold) ++rep.overdue_gt_threshold;
    rep.packets.push_back(o);
  }
  return rep;
}

std::vector<RatioPoint> queueing_ratio_cdf(const ReplayReport& rep) {
  std::vector<double> r;
  r.reserve(rep.packets.size());
  for (const auto& p : rep.packets) r.push_back(p.queueing_ratio());
  std::sort(r.begin(), r.end());
  std::vector<RatioPoint> out;
  const double n = static_cast<double>(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i + 1 < r.size() && r[i + 1] == r[i]) continue;
    out.push_back({r[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

double median_queueing_ratio(const ReplayReport& rep) {
  std::vector<double> r;
  r.reserve(rep.packets.size());
  for (const auto& p : rep.packets) r.push_back(p.queueing_ratio());
  if (r.empty()) return 1.0;
  std::sort(r.begin(), r.end());
  const std::size_t n = r.size();
  if (n % 2 == 1) return r[n / 2];
  const double lo = r[n / 2 - 1];
  const double hi = r[n / 2];
  if (std::isinf(lo) || std::isinf(hi)) return hi;
  return (lo + hi) / 2.0;
}

std::vector<HistogramBin> lateness_histogram(const ReplayReport& rep, SimTime width,
                                             std::size_t bins) {
  if (width <= 0 || bins == 0) throw ContractViolation("lateness_histogram: empty binning");
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = 1 + static_cast<SimTime>(b) * width;
    out[b].hi = out[b].lo + width;
    out[b].count = 0;
  }
  out.back().hi = kTimeMax;
  for (const auto& p : rep.packets) {
    if (!p.overdue()) continue;
    const auto b = std::min<std::size_t>(static_cast<std::size_t>((p.lateness() - 1) / width),
                                         bins - 1);
    ++out[b].count;
  }
  return out;
}

void write_schedule_tsv(std::ostream& os, const ScheduleRecord& rec) {
  os << "#packets\n";
  os << "pkt_id\tflow_id\troute\tsize_bits\tingress\toutput\thops\n";
  for (const auto& p : rec.packets) {
    os << p.id.value << '\t' << p.flow.value << '\t' << p.route.value << '\t' << p.size_bits
       << '\t' << p.ingress << '\t' << p.output << '\t' << p.hops.size() << '\n';
  }
  os << "#hops\n";
  os << "pkt_id\tflow_id\thop\tnode\tarrival\tsched_time\texit\n";
  for (const auto& p : rec.packets) {
    for (std::size_t k = 0; k < p.hops.size(); ++k) {
      const auto& h = p.hops[k];
      os << p.id.value << '\t' << p.flow.value << '\t' << k << '\t' << h.node.value << '\t'
         << h.arrival << '\t' << h.sched << '\t' << h.exit << '\n';
    }
  }
}

ScheduleRecord read_schedule_tsv(std::istream& is) {
  ScheduleRecord rec;
  std::string line;
  enum { None, Packets, Hops } section = None;
  bool header_pending = false;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError("schedule line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line == "#packets") {
      section = Packets;
      header_pending = true;
      continue;
    }
    if (line == "#hops") {
      section = Hops;
      header_pending = true;
      continue;
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::istringstream ls(line);
    if (section == Packets) {
      PacketRecord p;
      std::size_t nhops = 0;
      if (!(ls >> p.id.value >> p.flow.value >> p.route.value >> p.size_bits >> p.ingress >>
            p.output >> nhops)) {
        fail("malformed packet row");
      }
      if (!rec.packets.empty() && !(rec.packets.back().id < p.id)) fail("packet ids not increasing");
      p.hops.resize(nhops);
      rec.packets.push_back(std::move(p));
    } else if (section == Hops) {
      std::uint32_t id = 0;
      std::uint32_t flow = 0;
      std::size_t k = 0;
      HopRecord h;
      if (!(ls >> id >> flow >> k >> h.node.value >> h.arrival >> h.sched >> h.exit)) {
        fail("malformed hop row");
      }
      auto* p = const_cast<PacketRecord*>(rec.find(PacketId{id}));
      if (!p || k >= p->hops.size()) fail("hop row for unknown packet or hop");
      p->hops[k] = h;
    } else {
      fail("row outside a section");
    }
  }
  return rec;
}

namespace {
std::string ratio_text(double r) {
  if (std::isinf(r)) return "inf";
  std::ostringstream os;
  os.precision(6);
  os << r;
  return os.str();
}
}  // namespace

void write_report_csv(std::ostream& os, const ReplayReport& rep) {
  os << "pkt_id,flow_id,ingress,original_output,replay_output,lateness,overdue,"
        "original_queueing,replay_queueing,queueing_ratio\n";
  for (const auto& p : rep.packets) {
    os << p.id.value << ',' << p.flow.value << ',' << p.ingress << ',' << p.original_output << ','
       << p.replay_output << ',' << p.lateness() << ',' << (p.overdue() ? 1 : 0) << ','
       << p.original_queueing << ',' << p.replay_queueing << ',' << ratio_text(p.queueing_ratio())
       << '\n';
  }
}

std::string report_summary_json(const ReplayReport& rep) {
  nlohmann::ordered_json j;
  j["candidate"] = rep.candidate;
  j["packets"] = rep.packets.size();
  j["overdue"] = rep.overdue;
  j["overdue_gt_T"] = rep.overdue_gt_threshold;
  j["frac_overdue"] = rep.frac_overdue();
  j["frac_overdue_gt_T"] = rep.frac_overdue_gt_threshold();
  j["T_ns"] = rep.threshold;
  const double med = median_queueing_ratio(rep);
  if (std::isinf(med)) {
    j["median_queueing_ratio"] = "inf";
  } else {
    j["median_queueing_ratio"] = med;
  }
  return j.dump();
}

}  // namespace upsched
