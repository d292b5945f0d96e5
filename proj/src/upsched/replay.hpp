#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upsched/simulation.hpp"

namespace upsched {

// One packet handed to the network at its ingress. The header is applied as
// given, which lets fixtures drive an original run with per-hop priorities.
struct Injection {
  PacketId id;
  FlowId flow;
  RouteId route;
  std::int64_t size_bits = 0;
  SimTime at = 0;
  std::int64_t flow_bytes = 0;
  std::int64_t remaining_flow_bytes = 0;
  SchedHeader header;
};

Packet make_packet(const Injection& inj);

struct HopRecord {
  NodeId node;
  SimTime arrival = -1;
  SimTime sched = -1;  // first bit scheduled at this node
  SimTime exit = -1;   // last bit left this node
};

struct PacketRecord {
  PacketId id;
  FlowId flow;
  RouteId route;
  std::int64_t size_bits = 0;
  SimTime ingress = 0;
  SimTime output = 0;  // last bit leaves the network
  std::vector<HopRecord> hops;
};

// The outcome of one run: per-packet ingress, output and per-hop times.
// Packets are stored in increasing PacketId order.
struct ScheduleRecord {
  std::vector<PacketRecord> packets;

  const PacketRecord* find(PacketId id) const;
};

// Nodes at which each packet queued (waited > 0) in a recorded schedule.
struct CongestionProfile {
  std::vector<std::vector<NodeId>> points;  // parallel to ScheduleRecord::packets

  std::size_t count(std::size_t i) const { return points.at(i).size(); }
  std::size_t max_count() const;
};

// Runs `injections` under `schedulers` and records the schedule.
// Throws SimulationError if any packet is dropped or has not exited by `until`.
ScheduleRecord record(const Network& net, std::span<const Injection> injections,
                      const SchedulerAssignment& schedulers, std::uint64_t seed,
                      SimTime until = kTimeMax);

ScheduleRecord record_from(const Simulation& sim);

// Queueing time at one hop: time in the node minus its own transmission.
SimTime hop_wait(const Network& net, const PacketRecord& p, std::size_t hop);
CongestionProfile congestion_counts(const Network& net, const ScheduleRecord& rec);

// o(p) - i(p) - t_min(p, src, dest). Throws SimulationError on negative slack.
std::vector<SimTime> init_lstf_headers(const Network& net, const ScheduleRecord& rec);

enum class PriorityMode { OutputTime, SingleCongestionPoint };

// OutputTime: priority = o(p). SingleCongestionPoint: the packet's local
// deadline at its only congestion point, o(p) - t_min(p, cp, dest) + T(p, cp).
// Packets that never queued use the slowest port on their path (the most
// downstream one when several tie). Throws ContractViolation if any packet
// has two or more congestion points.
std::vector<std::int64_t> init_priority_headers(const Network& net, const ScheduleRecord& rec,
                                                PriorityMode mode,
                                                const CongestionProfile* profile = nullptr);

std::vector<std::vector<SimTime>> init_omniscient_headers(const ScheduleRecord& rec);

// A replay candidate: which discipline runs at every node and how headers
// are filled in at the ingress.
struct ReplayCandidate {
  enum class Header { None, Slack, OutputPriority, SingleCpPriority, HopTimes, TargetExit };

  std::string tag;
  SchedulerKind kind;
  Header header = Header::None;

  // lstf, lstf_preemptive, priority_o, priority_cp, omniscient (preemptive),
  // omniscient_np, edf, or any plain scheduler tag.
  static ReplayCandidate parse(std::string_view tag);
};

struct PacketOutcome {
  PacketId id;
  FlowId flow;
  SimTime ingress = 0;
  SimTime original_output = 0;
  SimTime replay_output = 0;
  SimTime original_queueing = 0;
  SimTime replay_queueing = 0;

  SimTime lateness() const { return replay_output - original_output; }
  bool overdue() const { return replay_output > original_output; }
  // Replay queueing over original queueing; 0/0 counts as 1, x/0 as +inf.
  double queueing_ratio() const;
};

struct ReplayReport {
  std::string candidate;
  std::vector<PacketOutcome> packets;
  SimTime threshold = 0;  // one MTU on the slowest traversed port
  std::size_t overdue = 0;
  std::size_t overdue_gt_threshold = 0;
  ScheduleRecord replayed;  // per-hop times of the replay itself

  double frac_overdue() const;
  double frac_overdue_gt_threshold() const;
};

struct ReplayOptions {
  std::uint64_t seed = 1;
  std::vector<DequeueRecord>* dequeue_trace = nullptr;
  // Overrides for header values, e.g. a hand-picked priority per packet.
  const std::vector<std::int64_t>* priorities = nullptr;
};

// Threshold used for "materially late": the largest packet's transmission
// time on the slowest non-instant port any recorded packet crosses.
SimTime bottleneck_threshold(const Network& net, const ScheduleRecord& rec);

ReplayReport replay(const Network& net, const ScheduleRecord& rec,
                    const ReplayCandidate& candidate, const ReplayOptions& options = {});

// Same injections as the record, with header fields left at their defaults.
std::vector<Injection> injections_of(const ScheduleRecord& rec);

struct RatioPoint {
  double ratio;
  double cumulative;
};
// Empirical CDF over distinct ratio values, +inf included as the last point.
std::vector<RatioPoint> queueing_ratio_cdf(const ReplayReport& rep);
double median_queueing_ratio(const ReplayReport& rep);

struct HistogramBin {
  SimTime lo;  // inclusive
  SimTime hi;  // exclusive
  std::size_t count;
};
// Lateness of overdue packets in bins of `width` ticks starting at 1.
std::vector<HistogramBin> lateness_histogram(const ReplayReport& rep, SimTime width,
                                             std::size_t bins);

void write_schedule_tsv(std::ostream& os, const ScheduleRecord& rec);
ScheduleRecord read_schedule_tsv(std::istream& is);
void write_report_csv(std::ostream& os, const ReplayReport& rep);
std::string report_summary_json(const ReplayReport& rep);

}  // namespace upsched
