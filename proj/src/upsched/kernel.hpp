#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "upsched/types.hpp"

namespace upsched {

enum class EventKind : std::uint8_t {
  Inject,
  Arrival,
  TxComplete,
  PortService,
  SourceWake,
  AckDelivery,
  LossSignal,
};

// Events at the same instant run in two passes: every Deliver event (packet
// movement, injections, acks) before any Decide event (a port choosing what
// to transmit next). A scheduler therefore sees every packet that arrives at
// time t before it makes its decision at t.
enum class EventPhase : std::uint8_t { Deliver = 0, Decide = 1 };

struct Event {
  SimTime fire_at = 0;
  EventPhase phase = EventPhase::Deliver;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Inject;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

using EventHandle = std::uint64_t;

struct KernelStats {
  std::uint64_t fired = 0;
  std::uint64_t cancelled = 0;
  SimTime final_time = 0;
  friend bool operator==(const KernelStats&, const KernelStats&) = default;
};

class Kernel {
 public:
  SimTime now() const { return now_; }
  bool idle() const { return live_ == 0; }
  std::size_t pending() const { return live_; }

  // Throws ConfigError when `at` lies in the past.
  EventHandle schedule(SimTime at, EventKind kind, std::uint32_t a = 0, std::uint32_t b = 0,
                       EventPhase phase = EventPhase::Deliver);

  // True iff the event was still pending; a cancelled event never fires.
  bool cancel(EventHandle h);

  // Fires every pending event with fire_at <= t_end in (fire_at, phase, seq)
  // order, then leaves the clock at t_end.
  template <class Handler>
  KernelStats run_until(SimTime t_end, Handler&& handler) {
    drain(t_end, handler);
    if (t_end != kTimeMax && t_end > now_) now_ = t_end;
    stats_.final_time = now_;
    return stats_;
  }

  // Fires events until none remain; the clock stays at the last event.
  template <class Handler>
  KernelStats run(Handler&& handler) {
    drain(kTimeMax, handler);
    stats_.final_time = now_;
    return stats_;
  }

  const KernelStats& stats() const { return stats_; }

  // FNV-1a over every fired event; equal digests mean equal traces.
  std::uint64_t trace_digest() const { return digest_; }

  void set_trace_sink(std::vector<Event>* sink) { sink_ = sink; }

 private:
  enum class State : std::uint8_t { Pending, Fired, Cancelled };

  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.fire_at != y.fire_at) return x.fire_at > y.fire_at;
      if (x.phase != y.phase) return x.phase > y.phase;
      return x.seq > y.seq;
    }
  };

  template <class Handler>
  void drain(SimTime t_end, Handler& handler) {
    while (!heap_.empty() && heap_.top().fire_at <= t_end) {
      Event ev = heap_.top();
      heap_.pop();
      if (state_[ev.seq] == State::Cancelled) continue;
      state_[ev.seq] = State::Fired;
      --live_;
      now_ = ev.fire_at;
      ++stats_.fired;
      mix(ev);
      if (sink_) sink_->push_back(ev);
      handler(ev);
    }
  }

  void mix(const Event& ev);

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::vector<State> state_;
  std::size_t live_ = 0;
  SimTime now_ = 0;
  KernelStats stats_;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::vector<Event>* sink_ = nullptr;
};

}  // namespace upsched
