#include "upsched/scheduler.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <set>
#include <unordered_map>

namespace upsched {

namespace {

struct TagInfo {
  std::string_view tag;
  Discipline discipline;
  bool preemptive;
};

constexpr TagInfo kTags[] = {
    {"fifo", Discipline::Fifo, false},
    {"lifo", Discipline::Lifo, false},
    {"random", Discipline::Random, false},
    {"sjf", Discipline::Sjf, false},
    {"srpt", Discipline::Srpt, false},
    {"fq", Discipline::Fq, false},
    {"priority", Discipline::Priority, false},
    {"priority_preemptive", Discipline::Priority, true},
    {"omniscient", Discipline::Omniscient, false},
    {"omniscient_preemptive", Discipline::Omniscient, true},
    {"lstf", Discipline::Lstf, false},
    {"lstf_preemptive", Discipline::Lstf, true},
    {"edf", Discipline::Edf, false},
    {"edf_preemptive", Discipline::Edf, true},
    {"fifo_plus", Discipline::FifoPlus, false},
};

bool keyed(Discipline d) {
  switch (d) {
    case Discipline::Random:
    case Discipline::Srpt:
    case Discipline::Fq:
      return false;
    default:
      return true;
  }
}

struct ByKey {
  bool operator()(const QueueEntry& x, const QueueEntry& y) const {
    if (x.key != y.key) return x.key < y.key;
    return x.order < y.order;
  }
};

// Disciplines that reduce to "smallest (key, arrival order) first".
class KeyedScheduler final : public Scheduler {
 public:
  explicit KeyedScheduler(SchedulerKind kind) : kind_(kind) {}

  void enqueue(QueueEntry e, const Packet& p, SimTime /*now*/) override {
    e.key = key_for(p, e);
    queue_.insert(e);
  }

  std::optional<QueueEntry> dequeue(SimTime) override {
    if (queue_.empty()) return std::nullopt;
    auto node = queue_.extract(queue_.begin());
    return node.value();
  }

  void requeue(const QueueEntry& e) override { queue_.insert(e); }
  std::size_t size() const override { return queue_.size(); }

  bool preempts(const QueueEntry& inflight) const override {
    return kind_.preemptive && !queue_.empty() && ByKey{}(*queue_.begin(), inflight);
  }

  std::optional<QueueEntry> evict_for(const QueueEntry& arrival) override {
    if (kind_.discipline != Discipline::Lstf || queue_.empty()) return std::nullopt;
    // Highest remaining slack loses; remaining slack is the last-bit
    // deadline minus the packet's own transmission time. Ties keep the
    // queued packet.
    auto slack_of = [](const QueueEntry& e) { return e.key - e.tx_time; };
    auto victim = queue_.begin();
    for (auto it = queue_.begin(); it != queue_.end(); ++it) {
      if (slack_of(*it) > slack_of(*victim) ||
          (slack_of(*it) == slack_of(*victim) && it->order > victim->order)) {
        victim = it;
      }
    }
    if (slack_of(arrival) >= slack_of(*victim)) return std::nullopt;
    auto node = queue_.extract(victim);
    return node.value();
  }

  std::int64_t key_for(const Packet& p, const QueueEntry& e) const override {
    switch (kind_.discipline) {
      case Discipline::Fifo:
        return 0;
      case Discipline::Lifo:
        return -static_cast<std::int64_t>(e.order);
      case Discipline::Sjf:
        return p.flow_bytes;
      case Discipline::Priority:
        return p.header.priority;
      case Discipline::Omniscient:
        if (p.hop >= p.header.hop_times.size()) {
          throw ContractViolation("omniscient header shorter than the path");
        }
        return p.header.hop_times[p.hop];
      case Discipline::Lstf:
        // Deadline of the last bit at this node: remaining header slack
        // plus now plus T(p, node). Orders exactly like instantaneous
        // remaining slack since all slacks decay at the same rate.
        return p.header.slack + e.enqueued + e.tx_time;
      case Discipline::Edf:
        return p.header.target_exit - e.downstream + e.tx_time;
      case Discipline::FifoPlus:
        // Local arrival less prior queueing, counted to the last bit like
        // the LSTF key so that a uniform header slack shifts every key alike.
        return e.enqueued - p.header.accumulated_wait + e.tx_time;
      default:
        throw ContractViolation("discipline is not key based");
    }
  }

 private:
  SchedulerKind kind_;
  std::set<QueueEntry, ByKey> queue_;
};

class RandomScheduler final : public Scheduler {
 public:
  explicit RandomScheduler(std::uint64_t seed) : rng_(seed) {}

  void enqueue(QueueEntry e, const Packet&, SimTime) override { queue_.push_back(e); }

  std::optional<QueueEntry> dequeue(SimTime) override {
    if (queue_.empty()) return std::nullopt;
    // mt19937_64 output is specified bit-for-bit; distributions are not, so
    // the index is drawn by plain reduction to keep traces portable.
    const std::size_t idx = static_cast<std::size_t>(rng_() % queue_.size());
    QueueEntry out = queue_[idx];
    queue_[idx] = queue_.back();
    queue_.pop_back();
    return out;
  }

  void requeue(const QueueEntry& e) override { queue_.push_back(e); }
  std::size_t size() const override { return queue_.size(); }

 private:
  std::mt19937_64 rng_;
  std::vector<QueueEntry> queue_;
};

// Priority by remaining flow size, serving the earliest queued packet of the
// flow that owns the highest-priority packet so flows are never reordered.
class SrptScheduler final : public Scheduler {
 public:
  void enqueue(QueueEntry e, const Packet& p, SimTime) override {
    e.key = p.remaining_flow_bytes;
    by_key_.insert(e);
    by_flow_[e.flow.value].emplace(e.order, e);
  }

  std::optional<QueueEntry> dequeue(SimTime) override {
    if (by_key_.empty()) return std::nullopt;
    const FlowId flow = by_key_.begin()->flow;
    auto& fifo = by_flow_[flow.value];
    QueueEntry out = fifo.begin()->second;
    fifo.erase(fifo.begin());
    if (fifo.empty()) by_flow_.erase(flow.value);
    by_key_.erase(out);
    return out;
  }

  void requeue(const QueueEntry& e) override {
    by_key_.insert(e);
    by_flow_[e.flow.value].emplace(e.order, e);
  }

  std::size_t size() const override { return by_key_.size(); }

  std::int64_t key_for(const Packet& p, const QueueEntry&) const override {
    return p.remaining_flow_bytes;
  }

 private:
  std::set<QueueEntry, ByKey> by_key_;
  std::unordered_map<std::uint32_t, std::map<std::uint64_t, QueueEntry>> by_flow_;
};

// Weighted fair queueing with equal weights: finish tags against a GPS
// virtual clock that advances at rate C / (number of GPS-backlogged flows).
class FqScheduler final : public Scheduler {
 public:
  explicit FqScheduler(std::int64_t bandwidth_bps) : bits_per_ns_(bandwidth_bps / 1e9) {}

  void enqueue(QueueEntry e, const Packet&, SimTime now) override {
    advance(now);
    double start = virtual_time_;
    if (auto it = last_finish_.find(e.flow.value); it != last_finish_.end()) {
      start = std::max(start, it->second);
    }
    const double finish = start + static_cast<double>(e.size_bits);
    last_finish_[e.flow.value] = finish;
    gps_departures_.push({finish, e.flow.value});
    entries_.emplace(Tag{finish, e.order}, e);
  }

  std::optional<QueueEntry> dequeue(SimTime now) override {
    advance(now);
    if (entries_.empty()) return std::nullopt;
    auto node = entries_.extract(entries_.begin());
    return node.mapped();
  }

  void requeue(const QueueEntry&) override {
    throw ContractViolation("FQ does not support preemption");
  }

  std::size_t size() const override { return entries_.size(); }

 private:
  struct Tag {
    double finish;
    std::uint64_t order;
    bool operator<(const Tag& o) const {
      if (finish != o.finish) return finish < o.finish;
      return order < o.order;
    }
  };
  using Departure = std::pair<double, std::uint32_t>;

  void advance(SimTime now) {
    const double t = static_cast<double>(now);
    while (!last_finish_.empty() && bits_per_ns_ > 0) {
      // Drop stale heap entries for flows whose tag has moved on.
      while (!gps_departures_.empty()) {
        auto [f, flow] = gps_departures_.top();
        auto it = last_finish_.find(flow);
        if (it != last_finish_.end() && it->second == f) break;
        gps_departures_.pop();
      }
      const double slope = bits_per_ns_ / static_cast<double>(last_finish_.size());
      const double next_finish = gps_departures_.top().first;
      const double departs_at = gps_clock_ + (next_finish - virtual_time_) / slope;
      if (departs_at > t) {
        virtual_time_ += slope * (t - gps_clock_);
        break;
      }
      virtual_time_ = next_finish;
      gps_clock_ = departs_at;
      while (!gps_departures_.empty() && gps_departures_.top().first <= next_finish) {
        auto [f, flow] = gps_departures_.top();
        gps_departures_.pop();
        auto it = last_finish_.find(flow);
        if (it != last_finish_.end() && it->second == f) last_finish_.erase(it);
      }
    }
    gps_clock_ = t;
  }

  double bits_per_ns_;
  double virtual_time_ = 0;
  double gps_clock_ = 0;
  std::unordered_map<std::uint32_t, double> last_finish_;
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> gps_departures_;
  std::map<Tag, QueueEntry> entries_;
};

}  // namespace

std::string SchedulerKind::tag() const {
  for (const auto& t : kTags) {
    if (t.discipline == discipline && t.preemptive == preemptive) return std::string(t.tag);
  }
  throw ContractViolation("scheduler kind has no tag");
}

SchedulerKind SchedulerKind::parse(std::string_view tag) {
  for (const auto& t : kTags) {
    if (t.tag == tag) return SchedulerKind{t.discipline, t.preemptive};
  }
  throw ConfigError("unknown scheduler '" + std::string(tag) + "'");
}

SchedulerKind SchedulerAssignment::at(NodeId node) const {
  auto it = per_node.find(node.value);
  return it == per_node.end() ? fallback : it->second;
}

SchedulerAssignment SchedulerAssignment::named(std::string_view tag, std::size_t node_count) {
  if (tag != "fq_fifo_plus") return uniform(SchedulerKind::parse(tag));
  SchedulerAssignment a = uniform({Discipline::Fq, false});
  for (std::uint32_t n = 1; n < node_count; n += 2) a.per_node[n] = {Discipline::FifoPlus, false};
  return a;
}

bool Scheduler::preempts(const QueueEntry&) const { return false; }

std::optional<QueueEntry> Scheduler::evict_for(const QueueEntry&) { return std::nullopt; }

std::int64_t Scheduler::key_for(const Packet&, const QueueEntry& e) const { return e.key; }

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, std::int64_t bandwidth_bps,
                                          std::uint64_t rng_seed) {
  if (kind.preemptive && !keyed(kind.discipline)) {
    throw ConfigError("preemption is only supported for key-based disciplines");
  }
  switch (kind.discipline) {
    case Discipline::Random:
      return std::make_unique<RandomScheduler>(rng_seed);
    case Discipline::Srpt:
      return std::make_unique<SrptScheduler>();
    case Discipline::Fq:
      return std::make_unique<FqScheduler>(bandwidth_bps);
    default:
      return std::make_unique<KeyedScheduler>(kind);
  }
}

std::uint64_t port_rng_seed(std::uint64_t scenario_seed, NodeId node, std::size_t port_ordinal) {
  // splitmix64 over the combined inputs
  std::uint64_t z = scenario_seed + 0x9e3779b97f4a7c15ULL * (node.value + 1) +
                    0xbf58476d1ce4e5b9ULL * (port_ordinal + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace upsched
