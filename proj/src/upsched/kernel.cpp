#include "upsched/kernel.hpp"

#include <string>

namespace upsched {

EventHandle Kernel::schedule(SimTime at, EventKind kind, std::uint32_t a, std::uint32_t b,
                             EventPhase phase) {
  if (at < now_) {
    throw ConfigError("event scheduled in the past: at=" + std::to_string(at) +
                      " now=" + std::to_string(now_));
  }
  const std::uint64_t seq = state_.size();
  state_.push_back(State::Pending);
  heap_.push(Event{at, phase, seq, kind, a, b});
  ++live_;
  return seq;
}

bool Kernel::cancel(EventHandle h) {
  if (h >= state_.size() || state_[h] != State::Pending) return false;
  state_[h] = State::Cancelled;
  --live_;
  ++stats_.cancelled;
  return true;
}

void Kernel::mix(const Event& ev) {
  auto feed = [this](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      digest_ ^= (v >> (8 * i)) & 0xffU;
      digest_ *= 0x100000001b3ULL;
    }
  };
  feed(static_cast<std::uint64_t>(ev.fire_at));
  feed(ev.seq);
  feed((static_cast<std::uint64_t>(ev.kind) << 8) | static_cast<std::uint64_t>(ev.phase));
  feed((static_cast<std::uint64_t>(ev.a) << 32) | ev.b);
}

}  // namespace upsched
