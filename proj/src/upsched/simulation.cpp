#include "upsched/simulation.hpp"

#include <string>

namespace upsched {

Simulation::Simulation(const Network& net, SchedulerAssignment schedulers, std::uint64_t seed)
    : net_(net) {
  ports_.resize(net.port_count());
  std::vector<std::size_t> ordinal(net.node_count(), 0);
  for (std::size_t i = 0; i < net.port_count(); ++i) {
    const Port& port = net.port(PortId{static_cast<std::uint32_t>(i)});
    const SchedulerKind kind = schedulers.at(port.node);
    const std::uint64_t port_seed = port_rng_seed(seed, port.node, ordinal[port.node.index()]++);
    ports_[i].sched = make_scheduler(kind, port.bandwidth_bps, port_seed);
  }
}

Simulation::~Simulation() = default;

PacketId Simulation::allocate_packet_id() {
  while ((next_packet_id_ < present_.size() && present_[next_packet_id_]) ||
         pending_ids_.count(next_packet_id_)) {
    ++next_packet_id_;
  }
  return PacketId{next_packet_id_++};
}

void Simulation::inject(Packet p) {
  if (!p.id.valid()) throw ContractViolation("inject: packet id not set");
  if (p.size_bits <= 0) throw ContractViolation("inject: packet size must be positive");
  if (!p.route.valid() || p.route.index() >= net_.route_count()) {
    throw ContractViolation("inject: unknown route");
  }
  if (p.ingress < kernel_.now()) throw ConfigError("inject: ingress time in the past");
  if (has_packet(p.id) || !pending_ids_.insert(p.id.value).second) {
    throw ContractViolation("inject: duplicate packet id");
  }
  const auto key = std::make_pair(p.ingress, p.id.value);
  pending_.emplace(key, std::move(p));
  if (started_) flush_injections();
}

bool Simulation::has_packet(PacketId id) const {
  return id.index() < present_.size() && present_[id.index()] != 0;
}

std::uint32_t Simulation::add_source(std::unique_ptr<TrafficSource> source) {
  const auto idx = static_cast<std::uint32_t>(sources_.size());
  source->index_ = idx;
  sources_.push_back(std::move(source));
  if (started_) sources_.back()->start(*this);
  return idx;
}

void Simulation::wake_source(std::uint32_t source, SimTime at, std::uint32_t tag) {
  kernel_.schedule(at, EventKind::SourceWake, source, tag);
}

void Simulation::deliver_ack(std::uint32_t source, std::uint32_t seq, SimTime at) {
  kernel_.schedule(at, EventKind::AckDelivery, source, seq);
}

void Simulation::flush_injections() {
  if (pending_.empty()) return;
  const SimTime first = pending_.begin()->first.first;
  if (inject_scheduled_for_ >= 0 && inject_scheduled_for_ <= first &&
      inject_scheduled_for_ >= kernel_.now()) {
    return;
  }
  kernel_.schedule(first, EventKind::Inject);
  inject_scheduled_for_ = first;
}

KernelStats Simulation::run(SimTime until) {
  if (!started_) {
    started_ = true;
    for (auto& s : sources_) s->start(*this);
    flush_injections();
  }
  auto handler = [this](const Event& ev) { dispatch(ev); };
  return until == kTimeMax ? kernel_.run(handler) : kernel_.run_until(until, handler);
}

void Simulation::dispatch(const Event& ev) {
  switch (ev.kind) {
    case EventKind::Inject: {
      inject_scheduled_for_ = -1;
      while (!pending_.empty() && pending_.begin()->first.first <= kernel_.now()) {
        auto node = pending_.extract(pending_.begin());
        pending_ids_.erase(node.key().second);
        admit(std::move(node.mapped()));
      }
      flush_injections();
      break;
    }
    case EventKind::Arrival:
      arrive(PacketId{ev.a});
      break;
    case EventKind::TxComplete:
      complete(PortId{ev.a});
      break;
    case EventKind::PortService:
      service(PortId{ev.a});
      break;
    case EventKind::SourceWake:
      sources_.at(ev.a)->on_wake(*this, ev.b);
      break;
    case EventKind::AckDelivery:
      sources_.at(ev.a)->on_ack(*this, ev.b);
      break;
    case EventKind::LossSignal:
      sources_.at(ev.a)->on_loss(*this, ev.b);
      break;
  }
}

void Simulation::admit(Packet&& p) {
  const std::size_t idx = p.id.index();
  if (idx >= packets_.size()) {
    const std::size_t n = idx + 1;
    packets_.resize(n);
    present_.resize(n, 0);
    dropped_.resize(n, 0);
    exits_.resize(n, -1);
    hop_offset_.resize(n, 0);
  }
  const Route& r = net_.route(p.route);
  p.hop = 0;
  present_[idx] = 1;
  hop_offset_[idx] = static_cast<std::uint32_t>(hop_log_.size());
  hop_log_.resize(hop_log_.size() + r.hops());
  packets_[idx] = std::move(p);
  ++injected_;
  arrive(PacketId{static_cast<std::uint32_t>(idx)});
}

HopTimes& Simulation::hop_times(PacketId id, std::size_t hop) {
  return hop_log_[hop_offset_[id.index()] + hop];
}

std::span<const HopTimes> Simulation::hops(PacketId id) const {
  const Packet& p = packet(id);
  const std::size_t n = net_.route(p.route).hops();
  return {hop_log_.data() + hop_offset_.at(id.index()), n};
}

void Simulation::arrive(PacketId id) {
  Packet& p = packets_[id.index()];
  const Route& r = net_.route(p.route);
  const SimTime now = kernel_.now();
  const PortId pid = r.ports[p.hop];
  const Port& port = net_.port(pid);
  HopTimes& ht = hop_times(id, p.hop);
  ht.arrival = now;

  if (port.instant()) {
    ht.start = now;
    ht.exit = now;
    if (on_dequeue) {
      on_dequeue(DequeueRecord{pid, port.node, id, p.hop, now, now, 0, 0, p.header.slack, false});
    }
    forward(p, pid);
    return;
  }

  PortState& ps = ports_[pid.index()];
  QueueEntry e;
  e.pkt = id;
  e.flow = p.flow;
  e.enqueued = now;
  e.order = ps.next_order++;
  e.tx_time = transmission_ticks(p.size_bits, port.bandwidth_bps);
  e.residual = e.tx_time;
  e.downstream = net_.hop_t_min(p.size_bits, p.route, p.hop, r.hops() - 1);
  e.size_bits = p.size_bits;
  e.key = ps.sched->key_for(p, e);

  if (port.buffer_limit_bytes != kUnboundedBuffer) {
    while (ps.queued_bytes + bytes_of(e) > port.buffer_limit_bytes) {
      auto victim = ps.sched->evict_for(e);
      if (!victim) {
        drop(id, port.node);
        return;
      }
      ps.queued_bytes -= bytes_of(*victim);
      drop(victim->pkt, port.node);
    }
  }
  ps.sched->enqueue(e, p, now);
  ps.queued_bytes += bytes_of(e);
  request_service(pid);
}

void Simulation::request_service(PortId pid) {
  PortState& ps = ports_[pid.index()];
  if (ps.service_pending) return;
  ps.service_pending = true;
  kernel_.schedule(kernel_.now(), EventKind::PortService, pid.value, 0, EventPhase::Decide);
}

void Simulation::service(PortId pid) {
  PortState& ps = ports_[pid.index()];
  ps.service_pending = false;
  if (ps.busy) {
    if (!ps.sched->preempts(*ps.busy)) return;
    kernel_.cancel(ps.tx_event);
    QueueEntry suspended = *ps.busy;
    suspended.residual = ps.finish_at - kernel_.now();
    ps.busy.reset();
    ps.sched->requeue(suspended);
    ps.queued_bytes += bytes_of(suspended);
  }
  start_next(pid);
}

void Simulation::start_next(PortId pid) {
  PortState& ps = ports_[pid.index()];
  auto e = ps.sched->dequeue(kernel_.now());
  if (!e) return;
  ps.queued_bytes -= bytes_of(*e);
  const SimTime now = kernel_.now();
  Packet& p = packets_[e->pkt.index()];
  HopTimes& ht = hop_times(e->pkt, p.hop);
  const bool resumed = ht.start >= 0;
  if (!resumed) ht.start = now;
  if (on_dequeue) {
    const SimTime served = e->tx_time - e->residual;
    on_dequeue(DequeueRecord{pid, net_.port(pid).node, e->pkt, p.hop, now, e->enqueued,
                             e->tx_time, served, p.header.slack - (now - e->enqueued - served),
                             resumed});
  }
  ps.finish_at = now + e->residual;
  ps.busy = *e;
  ps.tx_event = kernel_.schedule(ps.finish_at, EventKind::TxComplete, pid.value);
}

void Simulation::complete(PortId pid) {
  PortState& ps = ports_[pid.index()];
  const QueueEntry e = *ps.busy;
  ps.busy.reset();
  const SimTime now = kernel_.now();
  Packet& p = packets_[e.pkt.index()];
  // Time spent not being served at this node.
  const SimTime wait = now - e.enqueued - e.tx_time;
  p.header.slack -= wait;
  p.header.accumulated_wait += wait;
  hop_times(e.pkt, p.hop).exit = now;
  forward(p, pid);
  request_service(pid);
}

void Simulation::forward(Packet& p, PortId pid) {
  const Port& port = net_.port(pid);
  const SimTime now = kernel_.now();
  if (port.egress()) {
    exits_[p.id.index()] = now;
    ++exited_;
    if (on_exit) on_exit(p, now);
    if (p.source < sources_.size()) sources_[p.source]->on_delivered(*this, p);
    return;
  }
  ++p.hop;
  kernel_.schedule(now + port.prop_delay, EventKind::Arrival, p.id.value);
}

void Simulation::drop(PacketId id, NodeId at) {
  Packet& p = packets_[id.index()];
  dropped_[id.index()] = 1;
  ++drops_;
  if (on_drop) on_drop(p, at, kernel_.now());
  if (p.source < sources_.size()) {
    kernel_.schedule(kernel_.now(), EventKind::LossSignal, p.source, p.seq);
  }
}

}  // namespace upsched
