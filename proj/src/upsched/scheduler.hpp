#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "upsched/network.hpp"

namespace upsched {

enum class Discipline {
  Fifo,
  Lifo,
  Random,
  Sjf,
  Srpt,
  Fq,
  Priority,
  Omniscient,
  Lstf,
  Edf,
  FifoPlus,
};

struct SchedulerKind {
  Discipline discipline = Discipline::Fifo;
  bool preemptive = false;

  std::string tag() const;
  // Accepts the tags produced by tag(), e.g. "lstf", "lstf_preemptive".
  static SchedulerKind parse(std::string_view tag);
  friend bool operator==(const SchedulerKind&, const SchedulerKind&) = default;
};

// Per-node scheduler choice; nodes without an entry use `fallback`.
struct SchedulerAssignment {
  SchedulerKind fallback;
  std::map<std::uint32_t, SchedulerKind> per_node;

  SchedulerKind at(NodeId node) const;
  static SchedulerAssignment uniform(SchedulerKind kind) { return {kind, {}}; }
  // Any scheduler tag applied everywhere, or "fq_fifo_plus": FQ on even
  // node ids and FIFO+ on odd ones, for nodes 0..node_count-1.
  static SchedulerAssignment named(std::string_view tag, std::size_t node_count);
};

// A packet waiting at (or being transmitted by) an output port.
struct QueueEntry {
  PacketId pkt;
  FlowId flow;
  SimTime enqueued = 0;
  std::uint64_t order = 0;  // arrival order at this port, the FCFS tie-break
  std::int64_t key = 0;     // discipline sort key, fixed while queued
  SimTime tx_time = 0;      // T(p, node)
  SimTime residual = 0;     // transmission ticks still owed
  SimTime downstream = 0;   // t_min(p, node, dest(p))
  std::int64_t size_bits = 0;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;

  virtual void enqueue(QueueEntry e, const Packet& p, SimTime now) = 0;
  virtual std::optional<QueueEntry> dequeue(SimTime now) = 0;
  // Returns a preempted transmission to the queue with its key and order.
  virtual void requeue(const QueueEntry& e) = 0;
  virtual std::size_t size() const = 0;
  bool empty() const { return size() == 0; }

  // True when the best queued packet must interrupt `inflight`.
  virtual bool preempts(const QueueEntry& inflight) const;

  // Called when `arrival` does not fit in the buffer. Returns a queued
  // packet to discard (already removed), or nullopt to drop the arrival.
  virtual std::optional<QueueEntry> evict_for(const QueueEntry& arrival);

  // The key the discipline would assign to `p` arriving now.
  virtual std::int64_t key_for(const Packet& p, const QueueEntry& e) const;
};

std::unique_ptr<Scheduler> make_scheduler(SchedulerKind kind, std::int64_t bandwidth_bps,
                                          std::uint64_t rng_seed);

// Seed for the Random discipline at one port: stable under changes to other
// nodes of the topology.
std::uint64_t port_rng_seed(std::uint64_t scenario_seed, NodeId node, std::size_t port_ordinal);

}  // namespace upsched
