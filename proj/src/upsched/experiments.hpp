#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "upsched/scenario.hpp"

namespace upsched {

// Parallelism for study drivers: UPSCHED_THREADS when set to a positive
// integer, otherwise the hardware concurrency (at least 1).
unsigned worker_threads();

struct Workload {
  Topology topo;
  std::vector<FlowSpec> flows;
  PortId bottleneck;               // busiest port by expected load
  double offered_utilization = 0;  // realized on `bottleneck` (Poisson only)
  std::int64_t buffer_bytes = kUnboundedBuffer;
};

// Topology, flows and buffer sizing for `cfg`. A positive `utilization`
// replaces the configured Poisson target. Buffers are applied to every port.
Workload build_workload(const ScenarioConfig& cfg, double utilization = 0);

// Bandwidth-delay product of `bottleneck`: its rate times the mean
// round-trip propagation delay of the flows that cross it, in bytes.
std::int64_t bottleneck_bdp_bytes(Network& net, std::span<const FlowSpec> flows,
                                  PortId bottleneck);

struct ReplayRow {
  std::string original;
  std::string candidate;
  double target_utilization = 0;
  double offered_utilization = 0;
  std::size_t flows = 0;
  std::size_t packets = 0;
  std::size_t max_congestion_points = 0;
  std::size_t overdue = 0;
  std::size_t overdue_gt_threshold = 0;
  SimTime threshold = 0;
  double frac_overdue = 0;
  double frac_overdue_gt_threshold = 0;
  double median_queueing_ratio = 0;
  SimTime max_lateness = 0;

  nlohmann::ordered_json to_json() const;
};

struct ReplayStudy {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<ReplayRow> rows;  // ordered by (utilization, original, candidate) as configured

  const ReplayRow* find(std::string_view original, std::string_view candidate,
                        double utilization = 0) const;
};

// Records each configured original once and replays it with every
// candidate. With `out_dir`, optional per-packet CSVs and schedules go there.
ReplayStudy run_replay_study(const ScenarioConfig& cfg,
                             const std::filesystem::path* out_dir = nullptr);

// The replay study repeated for every utilization in cfg.sweep.
ReplayStudy run_sweep_study(const ScenarioConfig& cfg);

struct FctRow {
  std::string scheduler;
  std::size_t flows = 0;
  std::size_t finished = 0;
  std::uint64_t drops = 0;
  std::uint64_t retransmits = 0;
  std::optional<double> mean_fct;
  std::vector<FctBucket> buckets;
};

struct DelayRow {
  std::string scheduler;
  DelayStats all;
  // Keyed by router-to-router links crossed (route nodes minus three).
  std::map<std::size_t, DelayStats> by_links;
  std::size_t dequeues = 0;
};

struct FairnessRow {
  std::string label;
  std::string scheduler;
  std::int64_t r_est_bps = 0;  // 0 for runs without a slack policy
  std::optional<SimTime> time_to_95;
  std::optional<SimTime> time_to_99;
  std::optional<double> final_index;
  std::uint64_t drops = 0;
  std::vector<JainPoint> series;
};

struct ObjectiveStudy {
  std::string scenario;
  std::string metric;
  std::uint64_t seed = 0;
  std::int64_t buffer_bytes = kUnboundedBuffer;
  std::vector<FctRow> fct;
  std::vector<DelayRow> delay;
  // Set for tail runs that include both lstf and fifo_plus.
  std::optional<bool> lstf_trace_equals_fifo_plus;
  std::int64_t fair_share_bps = 0;
  std::vector<FairnessRow> fairness;

  const FctRow* find_fct(std::string_view scheduler) const;
  const DelayRow* find_delay(std::string_view scheduler) const;
  const FairnessRow* find_fairness(std::string_view label) const;
};

ObjectiveStudy run_objective_study(const ScenarioConfig& cfg);

// Largest per-flow rate that every port can grant its long-lived flows
// equally: the minimum over finite ports of bandwidth / flows crossing it.
std::int64_t fair_share_bps(Network& net, std::span<const FlowSpec> flows);

struct FixtureCandidateResult {
  std::string candidate;
  std::vector<std::string> overdue;  // packet names
};

struct FixtureOrderingResult {
  std::vector<std::string> order;  // highest priority first
  std::vector<std::string> overdue;
};

struct FixtureStudy {
  std::string name;
  std::vector<FixtureRow> expected_original;
  std::vector<FixtureRow> actual_original;
  std::vector<FixtureRow> expected_lstf;  // empty when not stated
  std::vector<FixtureRow> actual_lstf;
  std::vector<std::pair<std::string, std::pair<SimTime, SimTime>>> io;  // name -> (i, o)
  std::vector<FixtureCandidateResult> candidates;
  std::vector<FixtureOrderingResult> orderings;  // fixtures with few packets only
  SimTime unit = 1;

  bool original_matches() const { return expected_original == actual_original; }
  std::optional<bool> lstf_matches() const;
  const FixtureCandidateResult* find(std::string_view candidate) const;
};

FixtureStudy run_fixture_study(std::string_view name);

// Machine-readable summaries, one JSON object per line.
std::string replay_summary_jsonl(const ReplayStudy& study);
std::string objective_summary_jsonl(const ObjectiveStudy& study);
std::string fixture_summary_jsonl(const FixtureStudy& study);

// Human-readable tables.
std::string format_replay_table(const ReplayStudy& study);
std::string format_objective_table(const ObjectiveStudy& study);
std::string format_fixture_report(const FixtureStudy& study);

// CSV detail tables for the objective study: FCT buckets, delay classes or
// the Jain series, depending on the metric. Returns (file name, contents).
std::vector<std::pair<std::string, std::string>> objective_csvs(const ObjectiveStudy& study);

}  // namespace upsched
