#include "upsched/transport.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace upsched {

namespace {
// Stands in for the size of a flow that never ends, for SJF/SRPT keys.
constexpr std::int64_t kLongLivedBytes = std::int64_t{1} << 50;
}  // namespace

std::int64_t flow_packet_count(const FlowSpec& f) {
  if (f.mss_bytes <= 0) throw ConfigError("flow mss must be positive");
  if (f.size_bytes == kUnboundedFlow) return -1;
  if (f.size_bytes <= 0) throw ConfigError("flow size must be positive");
  return (f.size_bytes + f.mss_bytes - 1) / f.mss_bytes;
}

std::int64_t packet_bytes(const FlowSpec& f, std::uint32_t seq) {
  if (f.size_bytes == kUnboundedFlow) return f.mss_bytes;
  const std::int64_t sent = static_cast<std::int64_t>(seq) * f.mss_bytes;
  return std::min(f.mss_bytes, f.size_bytes - sent);
}

SimTime open_loop_send_time(const FlowSpec& f, std::int64_t rate_bps, std::uint32_t seq) {
  if (rate_bps == 0) return f.start;
  const __int128 bits = static_cast<__int128>(seq) * f.mss_bytes * 8;
  return f.start + static_cast<SimTime>((bits * kNsPerSec + rate_bps - 1) / rate_bps);
}

std::vector<Injection> expand_open_loop(Network& net, std::span<const FlowSpec> flows,
                                        SlackPolicy* policy) {
  struct Pending {
    SimTime at;
    std::uint32_t flow;
    std::uint32_t seq;
    Injection inj;
  };
  std::vector<Pending> all;
  for (const auto& f : flows) {
    if (f.transport != TransportKind::OpenLoop) continue;
    const std::int64_t n = flow_packet_count(f);
    if (n < 0) throw ConfigError("open-loop flows must be finite");
    const RouteId r = net.shortest_route(f.src, f.dst);
    const std::int64_t rate =
        f.rate_bps > 0 ? f.rate_bps : net.port(net.route(r).ports.front()).bandwidth_bps;
    for (std::int64_t k = 0; k < n; ++k) {
      const auto seq = static_cast<std::uint32_t>(k);
      Injection inj;
      inj.flow = f.id;
      inj.route = r;
      inj.size_bits = packet_bytes(f, seq) * 8;
      inj.at = open_loop_send_time(f, rate, seq);
      inj.flow_bytes = f.size_bytes;
      inj.remaining_flow_bytes = f.size_bytes - k * f.mss_bytes;
      all.push_back({inj.at, f.id.value, seq, std::move(inj)});
    }
  }
  std::sort(all.begin(), all.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.at, a.flow, a.seq) < std::tie(b.at, b.flow, b.seq);
  });
  std::vector<Injection> out;
  out.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    Injection inj = std::move(all[i].inj);
    inj.id = PacketId{static_cast<std::uint32_t>(i)};
    if (policy) inj.header.slack = policy->slack_for(make_packet(inj));
    out.push_back(std::move(inj));
  }
  return out;
}

SimTime reverse_path_delay(Network& net, const FlowSpec& f) {
  const Route& r = net.route(net.shortest_route(f.dst, f.src));
  SimTime total = 0;
  for (PortId p : r.ports) total += net.port(p).prop_delay;
  return total;
}

AimdSource::AimdSource(FlowSpec flow, RouteId route, SimTime ack_delay, SlackPolicy* policy)
    : flow_(flow),
      route_(route),
      ack_delay_(ack_delay),
      policy_(policy),
      total_packets_(flow_packet_count(flow)),
      cwnd_(std::max(1.0, flow.init_window)) {}

void AimdSource::start(Simulation& sim) { sim.wake_source(index(), flow_.start); }

bool AimdSource::has_new_data() const {
  return total_packets_ < 0 || static_cast<std::int64_t>(next_seq_) < total_packets_;
}

void AimdSource::on_wake(Simulation& sim, std::uint32_t /*tag*/) {
  started_ = true;
  wake_pending_ = false;
  pump(sim);
}

void AimdSource::pump(Simulation& sim) {
  if (!started_ || finished()) return;
  const auto window = static_cast<std::size_t>(std::max(1.0, std::floor(cwnd_)));
  while (in_flight_.size() < window) {
    if (!retransmit_.empty()) {
      const auto seq = retransmit_.front();
      retransmit_.pop_front();
      send(sim, seq, true);
    } else if (has_new_data()) {
      send(sim, next_seq_++, false);
    } else {
      break;
    }
  }
}

void AimdSource::send(Simulation& sim, std::uint32_t seq, bool retransmit) {
  Packet p;
  p.id = sim.allocate_packet_id();
  p.flow = flow_.id;
  p.size_bits = packet_bytes(flow_, seq) * 8;
  p.ingress = sim.now();
  p.route = route_;
  p.seq = seq;
  p.source = index();
  if (flow_.size_bytes == kUnboundedFlow) {
    p.flow_bytes = kLongLivedBytes;
    p.remaining_flow_bytes = kLongLivedBytes;
  } else {
    p.flow_bytes = flow_.size_bytes;
    p.remaining_flow_bytes = flow_.size_bytes - static_cast<std::int64_t>(seq) * flow_.mss_bytes;
  }
  if (policy_) p.header.slack = policy_->slack_for(p);
  in_flight_.insert(seq);
  ++counters_.sent;
  if (retransmit) ++counters_.retransmits;
  sim.inject(std::move(p));
}

void AimdSource::on_delivered(Simulation& sim, const Packet& p) {
  sim.deliver_ack(index(), p.seq, sim.now() + ack_delay_);
}

void AimdSource::on_ack(Simulation& sim, std::uint32_t seq) {
  if (in_flight_.erase(seq) == 0) return;
  ++counters_.acked;
  cwnd_ += 1.0 / cwnd_;
  if (total_packets_ >= 0 && static_cast<std::int64_t>(counters_.acked) == total_packets_) {
    finish_ = sim.now();
    return;
  }
  pump(sim);
}

void AimdSource::on_loss(Simulation& sim, std::uint32_t seq) {
  if (in_flight_.erase(seq) == 0) return;
  ++counters_.losses;
  retransmit_.push_back(seq);
  if (seq >= recover_seq_) {
    cwnd_ = std::max(1.0, cwnd_ / 2.0);
    recover_seq_ = next_seq_;
  }
  // Resending from inside the loss signal could hit the same full queue in
  // the same instant; wait for the next ack, or one ack delay if none is due.
  if (in_flight_.empty() && !wake_pending_) {
    wake_pending_ = true;
    sim.wake_source(index(), sim.now() + std::max<SimTime>(ack_delay_, 1));
  }
}

FlowOutcome AimdSource::outcome() const {
  return FlowOutcome{flow_.id, flow_.size_bytes, flow_.start, completion_time()};
}

}  // namespace upsched
