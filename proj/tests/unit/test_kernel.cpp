#include <vector>

#include "doctest.h"
#include "upsched/kernel.hpp"
#include "upsched/workload.hpp"

using namespace upsched;

TEST_CASE("events at one instant fire in insertion order within a phase") {
  Kernel k;
  std::vector<std::uint32_t> fired;
  for (std::uint32_t i = 0; i < 5; ++i) k.schedule(100, EventKind::Arrival, i);
  k.run([&](const Event& ev) { fired.push_back(ev.a); });
  CHECK(fired == std::vector<std::uint32_t>{0, 1, 2, 3, 4});
  CHECK(k.now() == 100);
}

TEST_CASE("deliver events precede decide events at the same time") {
  Kernel k;
  std::vector<std::uint32_t> fired;
  k.schedule(10, EventKind::PortService, 1, 0, EventPhase::Decide);
  k.schedule(10, EventKind::Arrival, 2);
  k.schedule(5, EventKind::PortService, 3, 0, EventPhase::Decide);
  k.run([&](const Event& ev) { fired.push_back(ev.a); });
  CHECK(fired == std::vector<std::uint32_t>{3, 2, 1});
}

TEST_CASE("handlers may schedule follow-ups that respect causality") {
  Kernel k;
  std::vector<SimTime> times;
  k.schedule(0, EventKind::SourceWake, 0);
  k.run([&](const Event& ev) {
    times.push_back(k.now());
    if (ev.a < 4) k.schedule(k.now() + 7, EventKind::SourceWake, ev.a + 1);
    if (ev.a == 1) k.schedule(k.now(), EventKind::Arrival, 100);  // same instant, later
  });
  CHECK(times == std::vector<SimTime>{0, 7, 7, 14, 21, 28});
  CHECK(k.stats().fired == 6);
}

TEST_CASE("scheduling in the past is rejected") {
  Kernel k;
  k.schedule(50, EventKind::Arrival);
  k.run([](const Event&) {});
  CHECK_THROWS_AS(k.schedule(49, EventKind::Arrival), ConfigError);
  CHECK_NOTHROW(k.schedule(50, EventKind::Arrival));
}

TEST_CASE("cancel reports whether the event was pending") {
  Kernel k;
  const EventHandle a = k.schedule(10, EventKind::TxComplete, 1);
  const EventHandle b = k.schedule(20, EventKind::TxComplete, 2);
  CHECK(k.cancel(a));
  CHECK_FALSE(k.cancel(a));
  CHECK_FALSE(k.cancel(12345));
  std::vector<std::uint32_t> fired;
  k.run([&](const Event& ev) { fired.push_back(ev.a); });
  CHECK(fired == std::vector<std::uint32_t>{2});
  CHECK_FALSE(k.cancel(b));
  CHECK(k.stats().cancelled == 1);
  CHECK(k.idle());
}

TEST_CASE("run_until stops at the bound and advances the clock") {
  Kernel k;
  k.schedule(10, EventKind::Arrival, 1);
  k.schedule(30, EventKind::Arrival, 2);
  int n = 0;
  k.run_until(20, [&](const Event&) { ++n; });
  CHECK(n == 1);
  CHECK(k.now() == 20);
  CHECK(k.pending() == 1);
}

namespace {

std::uint64_t random_workload_digest(std::uint64_t seed, KernelStats* stats) {
  Kernel k;
  Rng rng(seed);
  for (int i = 0; i < 1000; ++i) {
    k.schedule(rng.uniform_int(0, 1000), EventKind::Arrival, static_cast<std::uint32_t>(i));
  }
  // Every fired event schedules one follow-up until 1e5 events exist in
  // total; some get a decoy that is cancelled right away.
  std::uint64_t scheduled = 1000;
  k.run([&](const Event& ev) {
    if (scheduled >= 100'000) return;
    const auto phase = rng.uniform_int(0, 1) ? EventPhase::Decide : EventPhase::Deliver;
    k.schedule(k.now() + rng.uniform_int(0, 50), EventKind::PortService, ev.a, ev.b + 1, phase);
    ++scheduled;
    if (scheduled < 100'000 && rng.uniform_int(0, 9) == 0) {
      k.cancel(k.schedule(k.now() + 1, EventKind::LossSignal, ev.a));
      ++scheduled;
    }
  });
  *stats = k.stats();
  return k.trace_digest();
}

}  // namespace

TEST_CASE("identical inputs give identical traces over 1e5 events") {
  KernelStats s1, s2, s3;
  const auto d1 = random_workload_digest(7, &s1);
  const auto d2 = random_workload_digest(7, &s2);
  const auto d3 = random_workload_digest(8, &s3);
  CHECK(d1 == d2);
  CHECK(s1 == s2);
  CHECK(s1.fired + s1.cancelled == 100'000);
  CHECK(d1 != d3);
}
