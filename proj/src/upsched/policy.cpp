#include "upsched/policy.hpp"

#include <algorithm>
#include <cmath>

namespace upsched {

SimTime slack_fct(std::int64_t flow_bytes, SimTime d, bool* saturated) {
  if (d <= 0) throw ContractViolation("slack_fct: D must be positive");
  if (flow_bytes < 0) throw ContractViolation("slack_fct: negative flow size");
  const __int128 v = static_cast<__int128>(flow_bytes) * d / kReferencePacketBytes;
  const bool over = v > static_cast<__int128>(kTimeMax);
  if (saturated) *saturated = over;
  return over ? kTimeMax : static_cast<SimTime>(v);
}

SimTime FctPolicy::slack_for(const Packet& p) {
  bool sat = false;
  const SimTime s = slack_fct(p.flow_bytes, d_, &sat);
  if (sat) ++saturations_;
  return s;
}

FairPolicy::FairPolicy(std::int64_t r_est_bps) : r_est_(r_est_bps) {
  if (r_est_bps <= 0) throw ConfigError("fair policy needs a positive rate estimate");
}

void FairPolicy::set_flow_rate(FlowId flow, std::int64_t r_est_bps) {
  if (r_est_bps <= 0) throw ConfigError("fair policy needs a positive rate estimate");
  rate_override_[flow.value] = r_est_bps;
}

SimTime FairPolicy::next(FlowId flow, SimTime ingress, std::int64_t size_bits) {
  FlowState& st = state_[flow.value];
  if (!st.seen) {
    st.seen = true;
    st.last_slack = 0;
    st.last_arrival = ingress;
    return 0;
  }
  if (ingress < st.last_arrival) {
    throw ContractViolation("fair policy: arrivals of flow " + std::to_string(flow.value) +
                            " are not time-ordered");
  }
  auto it = rate_override_.find(flow.value);
  const std::int64_t rate = it == rate_override_.end() ? r_est_ : it->second;
  const SimTime spacing = transmission_ticks(size_bits, rate);
  const SimTime gap = ingress - st.last_arrival;
  st.last_slack = std::max<SimTime>(0, st.last_slack + spacing - gap);
  st.last_arrival = ingress;
  return st.last_slack;
}

std::unique_ptr<SlackPolicy> make_policy(std::string_view name, std::int64_t param) {
  if (name == "fct") return std::make_unique<FctPolicy>(param);
  if (name == "uniform") return std::make_unique<UniformPolicy>(param);
  if (name == "fair") return std::make_unique<FairPolicy>(param);
  throw ConfigError("unknown slack policy '" + std::string(name) + "'");
}

std::optional<double> jain_index(std::span<const double> rates) {
  if (rates.empty()) throw ContractViolation("jain_index: no rates");
  double sum = 0;
  double sq = 0;
  for (double x : rates) {
    if (x < 0) throw ContractViolation("jain_index: negative rate");
    sum += x;
    sq += x * x;
  }
  if (sq == 0) return std::nullopt;
  return sum * sum / (static_cast<double>(rates.size()) * sq);
}

ThroughputMeter::ThroughputMeter(std::size_t flows, SimTime window, SimTime start)
    : flows_(flows), window_(window), start_(start) {
  if (window <= 0) throw ConfigError("throughput window must be positive");
}

void ThroughputMeter::add(std::size_t flow, SimTime at, std::int64_t bits) {
  if (flow >= flows_) throw ContractViolation("throughput meter: unknown flow");
  if (at < start_) return;
  const auto w = static_cast<std::size_t>((at - start_) / window_);
  if (w >= bits_.size()) bits_.resize(w + 1, std::vector<std::int64_t>(flows_, 0));
  bits_[w][flow] += bits;
}

std::vector<JainPoint> ThroughputMeter::jain_series(SimTime end) const {
  std::vector<JainPoint> out;
  std::vector<double> rates(flows_);
  for (SimTime t = start_; t + window_ <= end; t += window_) {
    const auto w = static_cast<std::size_t>((t - start_) / window_);
    for (std::size_t f = 0; f < flows_; ++f) {
      rates[f] = w < bits_.size() ? static_cast<double>(bits_[w][f]) : 0.0;
    }
    out.push_back({t, jain_index(rates)});
  }
  return out;
}

std::vector<double> ThroughputMeter::mean_rates(SimTime from, SimTime to) const {
  std::vector<double> out(flows_, 0.0);
  if (to <= from) return out;
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    const SimTime t = start_ + static_cast<SimTime>(w) * window_;
    if (t < from || t + window_ > to) continue;
    for (std::size_t f = 0; f < flows_; ++f) out[f] += static_cast<double>(bits_[w][f]);
  }
  const double secs = static_cast<double>(to - from) / kNsPerSec;
  for (double& x : out) x /= secs;
  return out;
}

std::optional<SimTime> time_to_fairness(std::span<const JainPoint> series, double threshold) {
  std::optional<SimTime> since;
  for (const auto& pt : series) {
    if (pt.index && *pt.index >= threshold) {
      if (!since) since = pt.window_start;
    } else {
      since.reset();
    }
  }
  return since;
}

std::vector<FctBucket> fct_buckets(std::span<const FlowOutcome> flows,
                                   std::span<const std::int64_t> edges) {
  if (edges.empty()) throw ContractViolation("fct_buckets: no edges");
  if (!std::is_sorted(edges.begin(), edges.end())) {
    throw ContractViolation("fct_buckets: edges must be sorted");
  }
  std::vector<FctBucket> out;
  const std::int64_t top = std::numeric_limits<std::int64_t>::max();
  out.push_back({0, edges.size() > 1 ? edges[1] : top, 0, std::nullopt});
  for (std::size_t i = 1; i < edges.size(); ++i) {
    out.push_back({edges[i], i + 1 < edges.size() ? edges[i + 1] : top, 0, std::nullopt});
  }
  std::vector<double> sums(out.size(), 0.0);
  for (const auto& f : flows) {
    if (f.fct < 0) continue;
    std::size_t b = 0;
    while (b + 1 < out.size() && f.size_bytes >= out[b + 1].lo_bytes) ++b;
    ++out[b].flows;
    sums[b] += static_cast<double>(f.fct);
  }
  for (std::size_t b = 0; b < out.size(); ++b) {
    if (out[b].flows > 0) out[b].mean_fct = sums[b] / static_cast<double>(out[b].flows);
  }
  return out;
}

std::optional<double> mean_fct(std::span<const FlowOutcome> flows) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& f : flows) {
    if (f.fct < 0) continue;
    sum += static_cast<double>(f.fct);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

DelayStats delay_percentiles(std::span<const SimTime> delays) {
  DelayStats st;
  st.count = delays.size();
  if (delays.empty()) return st;
  std::vector<SimTime> v(delays.begin(), delays.end());
  std::sort(v.begin(), v.end());
  long double sum = 0;
  for (SimTime d : v) sum += d;
  st.mean = static_cast<double>(sum / v.size());
  const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(v.size())));
  st.p99 = v[std::max<std::size_t>(rank, 1) - 1];
  return st;
}

}  // namespace upsched
