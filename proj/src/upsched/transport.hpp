#pragma once

#include <deque>
#include <set>
#include <span>
#include <vector>

#include "upsched/policy.hpp"
#include "upsched/replay.hpp"
#include "upsched/simulation.hpp"

namespace upsched {

inline constexpr std::int64_t kUnboundedFlow = -1;
inline constexpr std::int64_t kDefaultMssBytes = 1500;

enum class TransportKind { OpenLoop, Aimd };

struct FlowSpec {
  FlowId id;
  NodeId src;
  NodeId dst;
  std::int64_t size_bytes = 0;  // kUnboundedFlow for long-lived flows
  SimTime start = 0;
  TransportKind transport = TransportKind::OpenLoop;
  std::int64_t rate_bps = 0;  // open loop; 0 paces at the first port's rate
  double init_window = 1.0;   // AIMD, in packets
  std::int64_t mss_bytes = kDefaultMssBytes;
};

// Number of packets a finite flow is cut into, and the size of packet `seq`.
std::int64_t flow_packet_count(const FlowSpec& f);
std::int64_t packet_bytes(const FlowSpec& f, std::uint32_t seq);

// Send time of packet `seq` of an open-loop flow paced at `rate_bps`.
SimTime open_loop_send_time(const FlowSpec& f, std::int64_t rate_bps, std::uint32_t seq);

// Turns finite open-loop flows into packet injections. Packet ids follow
// (send time, flow id, sequence). When `policy` is set it stamps header
// slack in that order.
std::vector<Injection> expand_open_loop(Network& net, std::span<const FlowSpec> flows,
                                        SlackPolicy* policy = nullptr);

// Sum of propagation delays along the shortest path dst -> src.
SimTime reverse_path_delay(Network& net, const FlowSpec& f);

struct AimdCounters {
  std::uint64_t sent = 0;
  std::uint64_t retransmits = 0;
  std::uint64_t losses = 0;
  std::uint64_t acked = 0;
};

// Window-based sender: +1/cwnd per ack, halves at most once per window on a
// loss signal, retransmits lost sequence numbers before new data. Acks are
// delivered after the reverse-path propagation delay.
class AimdSource final : public TrafficSource {
 public:
  AimdSource(FlowSpec flow, RouteId route, SimTime ack_delay, SlackPolicy* policy);

  void start(Simulation& sim) override;
  void on_wake(Simulation& sim, std::uint32_t tag) override;
  void on_delivered(Simulation& sim, const Packet& p) override;
  void on_ack(Simulation& sim, std::uint32_t seq) override;
  void on_loss(Simulation& sim, std::uint32_t seq) override;

  const FlowSpec& flow() const { return flow_; }
  double cwnd() const { return cwnd_; }
  std::size_t in_flight() const { return in_flight_.size(); }
  bool finished() const { return finish_ >= 0; }
  SimTime completion_time() const { return finish_ < 0 ? -1 : finish_ - flow_.start; }
  const AimdCounters& counters() const { return counters_; }
  FlowOutcome outcome() const;

 private:
  void pump(Simulation& sim);
  void send(Simulation& sim, std::uint32_t seq, bool retransmit);
  bool has_new_data() const;

  FlowSpec flow_;
  RouteId route_;
  SimTime ack_delay_;
  SlackPolicy* policy_;
  std::int64_t total_packets_;

  double cwnd_;
  std::uint32_t next_seq_ = 0;
  std::uint32_t recover_seq_ = 0;
  std::set<std::uint32_t> in_flight_;
  std::deque<std::uint32_t> retransmit_;
  bool started_ = false;
  bool wake_pending_ = false;
  SimTime finish_ = -1;
  AimdCounters counters_;
};

}  // namespace upsched
