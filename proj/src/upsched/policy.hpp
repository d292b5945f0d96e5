#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upsched/network.hpp"

namespace upsched {

inline constexpr std::int64_t kReferencePacketBytes = 1500;

// fs(p) * D with the flow size measured in 1500-byte units. Saturates at
// kTimeMax; `saturated` (if given) reports whether that happened.
SimTime slack_fct(std::int64_t flow_bytes, SimTime d, bool* saturated = nullptr);

inline SimTime slack_uniform(SimTime c) { return c; }

// Assigns header slack to packets as they enter the network.
class SlackPolicy {
 public:
  virtual ~SlackPolicy() = default;
  virtual SimTime slack_for(const Packet& p) = 0;
  virtual std::string name() const = 0;
};

class FctPolicy final : public SlackPolicy {
 public:
  explicit FctPolicy(SimTime d) : d_(d) {
    if (d <= 0) throw ConfigError("FCT policy needs a positive D");
  }
  SimTime slack_for(const Packet& p) override;
  std::string name() const override { return "fct"; }
  std::uint64_t saturations() const { return saturations_; }

 private:
  SimTime d_;
  std::uint64_t saturations_ = 0;
};

class UniformPolicy final : public SlackPolicy {
 public:
  explicit UniformPolicy(SimTime c) : c_(c) {}
  SimTime slack_for(const Packet&) override { return c_; }
  std::string name() const override { return "uniform"; }

 private:
  SimTime c_;
};

// Rate-based slack: each packet of a flow sending faster than r_est is
// pushed back by size/r_est relative to its predecessor.
class FairPolicy final : public SlackPolicy {
 public:
  explicit FairPolicy(std::int64_t r_est_bps);

  // Per-flow estimate, for weighted sharing.
  void set_flow_rate(FlowId flow, std::int64_t r_est_bps);

  // Slack for the next packet of `flow` entering at `ingress`. Arrivals of
  // one flow must be non-decreasing in time.
  SimTime next(FlowId flow, SimTime ingress, std::int64_t size_bits);

  SimTime slack_for(const Packet& p) override { return next(p.flow, p.ingress, p.size_bits); }
  std::string name() const override { return "fair"; }

 private:
  struct FlowState {
    SimTime last_slack = 0;
    SimTime last_arrival = 0;
    bool seen = false;
  };
  std::int64_t r_est_;
  std::map<std::uint32_t, std::int64_t> rate_override_;
  std::map<std::uint32_t, FlowState> state_;
};

// Builds a policy from its name: "fct", "uniform" or "fair". `param` is D,
// C (ticks) or r_est (bits per second) respectively.
std::unique_ptr<SlackPolicy> make_policy(std::string_view name, std::int64_t param);

// (sum x)^2 / (n * sum x^2); nullopt when every rate is zero.
std::optional<double> jain_index(std::span<const double> rates);

struct JainPoint {
  SimTime window_start;
  std::optional<double> index;
};

// Accumulates delivered bits per flow in fixed windows.
class ThroughputMeter {
 public:
  ThroughputMeter(std::size_t flows, SimTime window, SimTime start = 0);
  void add(std::size_t flow, SimTime at, std::int64_t bits);
  // One point per window from `start` up to (not including) `end`.
  std::vector<JainPoint> jain_series(SimTime end) const;
  // Mean rate (bits/s) of each flow over [from, to).
  std::vector<double> mean_rates(SimTime from, SimTime to) const;

 private:
  std::size_t flows_;
  SimTime window_;
  SimTime start_;
  std::vector<std::vector<std::int64_t>> bits_;  // [window][flow]
};

// First window start from which every later window has index >= threshold.
std::optional<SimTime> time_to_fairness(std::span<const JainPoint> series, double threshold);

struct FlowOutcome {
  FlowId flow;
  std::int64_t size_bytes = 0;
  SimTime start = 0;
  SimTime fct = -1;  // -1 when the flow did not finish
};

struct FctBucket {
  std::int64_t lo_bytes;  // inclusive
  std::int64_t hi_bytes;  // exclusive, max for the last bucket
  std::size_t flows;
  std::optional<double> mean_fct;
};

// Buckets are [edges[i], edges[i+1]); values below edges[0] fall in the first
// and values at or above edges.back() in an open-ended last bucket.
std::vector<FctBucket> fct_buckets(std::span<const FlowOutcome> flows,
                                   std::span<const std::int64_t> edges);
std::optional<double> mean_fct(std::span<const FlowOutcome> flows);

struct DelayStats {
  double mean = 0;
  SimTime p99 = 0;
  std::size_t count = 0;
};
// Nearest-rank 99th percentile.
DelayStats delay_percentiles(std::span<const SimTime> delays);

}  // namespace upsched
