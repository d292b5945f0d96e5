#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "upsched/policy.hpp"
#include "upsched/workload.hpp"

using namespace upsched;

TEST_CASE("fct slack scales with flow size in 1500-byte units") {
  CHECK(slack_fct(1500, 1'000'000) == 1'000'000);
  CHECK(slack_fct(15'000, 1'000'000) == 10'000'000);
  CHECK(slack_fct(750, 1'000'000) == 500'000);
  bool sat = false;
  CHECK(slack_fct(std::numeric_limits<std::int64_t>::max() / 2, kNsPerSec, &sat) == kTimeMax);
  CHECK(sat);
  CHECK_THROWS_AS(slack_fct(1500, 0), ContractViolation);
  CHECK_THROWS_AS(FctPolicy(0), ConfigError);
}

TEST_CASE("uniform policy stamps a constant") {
  UniformPolicy pol(777);
  Packet p;
  CHECK(pol.slack_for(p) == 777);
  CHECK(slack_uniform(42) == 42);
}

TEST_CASE("fair slack grows linearly for a flow sending at twice the estimate") {
  const std::int64_t r_est = 1'000'000'000;
  const std::int64_t bits = 12'000;  // 12 us at r_est
  FairPolicy pol(r_est);
  SimTime t = 5'000;
  for (int k = 0; k < 50; ++k) {
    CHECK(pol.next(FlowId{0}, t, bits) == k * 6'000);
    t += 6'000;  // arrivals at 2 * r_est
  }
}

TEST_CASE("fair slack stays zero for flows at or under the estimate") {
  FairPolicy pol(1'000'000'000);
  for (int k = 0; k < 20; ++k) CHECK(pol.next(FlowId{3}, k * 12'000, 12'000) == 0);
  for (int k = 0; k < 20; ++k) CHECK(pol.next(FlowId{4}, k * 30'000, 12'000) == 0);
}

TEST_CASE("fair slack decays during idle gaps and flows are independent") {
  FairPolicy pol(1'000'000'000);
  CHECK(pol.next(FlowId{0}, 0, 12'000) == 0);
  CHECK(pol.next(FlowId{0}, 0, 12'000) == 12'000);
  CHECK(pol.next(FlowId{0}, 0, 12'000) == 24'000);
  CHECK(pol.next(FlowId{1}, 0, 12'000) == 0);
  CHECK(pol.next(FlowId{0}, 30'000, 12'000) == 6'000);
  CHECK(pol.next(FlowId{0}, 1'000'000, 12'000) == 0);
  CHECK_THROWS_AS(pol.next(FlowId{0}, 10, 12'000), ContractViolation);
  pol.set_flow_rate(FlowId{2}, 500'000'000);
  pol.next(FlowId{2}, 0, 12'000);
  CHECK(pol.next(FlowId{2}, 0, 12'000) == 24'000);
}

TEST_CASE("make_policy builds each policy by name") {
  CHECK(make_policy("fct", 10)->name() == "fct");
  CHECK(make_policy("uniform", 10)->name() == "uniform");
  CHECK(make_policy("fair", 10)->name() == "fair");
  CHECK_THROWS_AS(make_policy("edf", 10), ConfigError);
}

TEST_CASE("jain index edge cases and scale invariance") {
  const std::vector<double> equal{5, 5, 5, 5};
  CHECK(*jain_index(equal) == doctest::Approx(1.0));
  const std::vector<double> one{0, 0, 7, 0};
  CHECK(*jain_index(one) == doctest::Approx(0.25));
  const std::vector<double> zeros{0, 0};
  CHECK_FALSE(jain_index(zeros).has_value());
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x, y;
    const double c = 1 + rng.uniform01() * 1000;
    for (int i = 0; i < 6; ++i) {
      x.push_back(rng.uniform01());
      y.push_back(x.back() * c);
    }
    CHECK(*jain_index(x) == doctest::Approx(*jain_index(y)));
    CHECK(*jain_index(x) <= 1.0 + 1e-12);
    CHECK(*jain_index(x) >= 1.0 / 6 - 1e-12);
  }
}

TEST_CASE("throughput meter windows feed the jain series") {
  ThroughputMeter m(2, 1'000);
  m.add(0, 100, 500);
  m.add(1, 900, 500);   // window 0: equal
  m.add(0, 1'500, 800);  // window 1: only flow 0
  m.add(0, 2'100, 400);
  m.add(1, 2'200, 400);  // window 2: equal again
  const auto s = m.jain_series(4'000);
  REQUIRE(s.size() == 4);
  CHECK(*s[0].index == doctest::Approx(1.0));
  CHECK(*s[1].index == doctest::Approx(0.5));
  CHECK(*s[2].index == doctest::Approx(1.0));
  CHECK_FALSE(s[3].index.has_value());
  const auto rates = m.mean_rates(0, 1'000);
  CHECK(rates[0] == doctest::Approx(500.0 / 1e-6));
}

TEST_CASE("time to fairness needs every later window above the bar") {
  std::vector<JainPoint> s{{0, 0.5}, {10, 0.99}, {20, 0.7}, {30, 0.96}, {40, 0.97}};
  CHECK(*time_to_fairness(s, 0.95) == 30);
  CHECK_FALSE(time_to_fairness(s, 0.98).has_value());
  s.push_back({50, std::nullopt});
  CHECK_FALSE(time_to_fairness(s, 0.95).has_value());
}

TEST_CASE("fct buckets and the overall mean") {
  std::vector<FlowOutcome> flows;
  auto add = [&](std::int64_t size, SimTime fct) {
    FlowOutcome f;
    f.flow = FlowId{static_cast<std::uint32_t>(flows.size())};
    f.size_bytes = size;
    f.fct = fct;
    flows.push_back(f);
  };
  add(1'500, 100);
  add(3'000, 300);
  add(20'000, 1'000);
  add(200'000, -1);  // unfinished
  const std::vector<std::int64_t> edges{0, 15'000, 150'000};
  const auto b = fct_buckets(flows, edges);
  REQUIRE(b.size() == 3);
  CHECK(b[0].flows == 2);
  CHECK(*b[0].mean_fct == doctest::Approx(200));
  CHECK(b[1].flows == 1);
  CHECK(b[2].flows == 0);  // unfinished flows are not averaged
  CHECK_FALSE(b[2].mean_fct.has_value());
  CHECK(*mean_fct(flows) == doctest::Approx(1'400.0 / 3));
}

TEST_CASE("p99 uses the nearest rank") {
  std::vector<SimTime> d;
  for (SimTime i = 1; i <= 200; ++i) d.push_back(i);
  const auto s = delay_percentiles(d);
  CHECK(s.count == 200);
  CHECK(s.p99 == 198);
  CHECK(s.mean == doctest::Approx(100.5));
  const std::vector<SimTime> single{42};
  CHECK(delay_percentiles(single).p99 == 42);
}
