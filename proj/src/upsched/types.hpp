#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace upsched {

// Simulation time in integer nanoseconds. Signed so that slack and lateness
// can be expressed in the same unit.
using SimTime = std::int64_t;

inline constexpr SimTime kTimeMax = std::numeric_limits<SimTime>::max();
inline constexpr SimTime kNsPerSec = 1'000'000'000;

template <class Tag>
struct Id {
  static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t value = kInvalid;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}
  constexpr bool valid() const { return value != kInvalid; }
  constexpr std::size_t index() const { return value; }
  friend constexpr auto operator<=>(Id, Id) = default;
};

using NodeId = Id<struct NodeTag>;
using LinkId = Id<struct LinkTag>;
using PortId = Id<struct PortTag>;
using RouteId = Id<struct RouteTag>;
using FlowId = Id<struct FlowTag>;
using PacketId = Id<struct PacketTag>;

// Bad scenario input: unknown names, impossible parameters, malformed files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The simulation reached a state that invalidates the requested result,
// e.g. a drop while recording a schedule.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ticks needed to serialize `bits` on a link of `bps`, rounded up so that a
// positive size never takes zero time. bps == 0 marks an instantaneous port.
SimTime transmission_ticks(std::int64_t bits, std::int64_t bps);

}  // namespace upsched

template <class Tag>
struct std::hash<upsched::Id<Tag>> {
  std::size_t operator()(upsched::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
