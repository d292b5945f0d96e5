#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "upsched/kernel.hpp"
#include "upsched/network.hpp"
#include "upsched/scheduler.hpp"

namespace upsched {

class Simulation;

// Per-hop timestamps of one packet. `start` is when the first bit was
// scheduled; `exit` is when the last bit left the node's output port.
struct HopTimes {
  SimTime arrival = -1;
  SimTime start = -1;
  SimTime exit = -1;
};

// Emitted every time a port begins (or resumes) transmitting a packet.
struct DequeueRecord {
  PortId port;
  NodeId node;
  PacketId pkt;
  std::size_t hop = 0;
  SimTime at = 0;
  SimTime enqueued = 0;
  SimTime tx_time = 0;
  SimTime served = 0;           // ticks already transmitted before this start
  SimTime remaining_slack = 0;  // header slack minus the wait so far
  bool resumed = false;
};

// An actor that injects packets and reacts to deliveries, acks and losses.
class TrafficSource {
 public:
  virtual ~TrafficSource() = default;
  virtual void start(Simulation& sim) = 0;
  virtual void on_wake(Simulation&, std::uint32_t /*tag*/) {}
  virtual void on_delivered(Simulation&, const Packet&) {}
  virtual void on_ack(Simulation&, std::uint32_t /*seq*/) {}
  virtual void on_loss(Simulation&, std::uint32_t /*seq*/) {}

  // Position of this source in its simulation, valid once added.
  std::uint32_t index() const { return index_; }

 private:
  friend class Simulation;
  std::uint32_t index_ = std::numeric_limits<std::uint32_t>::max();
};

class Simulation {
 public:
  Simulation(const Network& net, SchedulerAssignment schedulers, std::uint64_t seed);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;
  ~Simulation();

  const Network& network() const { return net_; }
  SimTime now() const { return kernel_.now(); }
  Kernel& kernel() { return kernel_; }

  // Queues `p` to appear at src(p) at p.ingress. p.id must be unused and
  // p.ingress must not lie in the past. Packets sharing an ingress time are
  // admitted in PacketId order regardless of call order.
  void inject(Packet p);
  PacketId allocate_packet_id();

  std::uint32_t add_source(std::unique_ptr<TrafficSource> source);
  TrafficSource& source(std::uint32_t idx) { return *sources_.at(idx); }
  void wake_source(std::uint32_t source, SimTime at, std::uint32_t tag = 0);
  void deliver_ack(std::uint32_t source, std::uint32_t seq, SimTime at);

  KernelStats run(SimTime until = kTimeMax);

  bool has_packet(PacketId id) const;
  const Packet& packet(PacketId id) const { return packets_.at(id.index()); }
  std::span<const HopTimes> hops(PacketId id) const;
  SimTime exit_time(PacketId id) const { return exits_.at(id.index()); }
  bool dropped(PacketId id) const { return dropped_.at(id.index()) != 0; }
  std::size_t packet_slots() const { return packets_.size(); }

  std::uint64_t injected_count() const { return injected_; }
  std::uint64_t exited_count() const { return exited_; }
  std::uint64_t dropped_count() const { return drops_; }

  std::function<void(const DequeueRecord&)> on_dequeue;
  std::function<void(const Packet&, SimTime)> on_exit;
  std::function<void(const Packet&, NodeId, SimTime)> on_drop;

 private:
  struct PortState {
    std::unique_ptr<Scheduler> sched;
    std::optional<QueueEntry> busy;
    SimTime finish_at = 0;
    EventHandle tx_event = 0;
    bool service_pending = false;
    std::uint64_t next_order = 0;
    std::int64_t queued_bytes = 0;
  };

  void dispatch(const Event& ev);
  void admit(Packet&& p);
  void flush_injections();
  void arrive(PacketId id);
  void request_service(PortId port);
  void service(PortId port);
  void start_next(PortId port);
  void complete(PortId port);
  void forward(Packet& p, PortId port);
  void drop(PacketId id, NodeId at);
  HopTimes& hop_times(PacketId id, std::size_t hop);
  static std::int64_t bytes_of(const QueueEntry& e) { return (e.size_bits + 7) / 8; }

  const Network& net_;
  Kernel kernel_;
  std::vector<PortState> ports_;
  std::vector<std::unique_ptr<TrafficSource>> sources_;
  bool started_ = false;

  std::map<std::pair<SimTime, std::uint32_t>, Packet> pending_;
  std::unordered_set<std::uint32_t> pending_ids_;
  SimTime inject_scheduled_for_ = -1;

  std::vector<Packet> packets_;
  std::vector<std::uint8_t> present_;
  std::vector<std::uint8_t> dropped_;
  std::vector<SimTime> exits_;
  std::vector<std::uint32_t> hop_offset_;
  std::vector<HopTimes> hop_log_;
  std::uint32_t next_packet_id_ = 0;

  std::uint64_t injected_ = 0;
  std::uint64_t exited_ = 0;
  std::uint64_t drops_ = 0;
};

}  // namespace upsched
