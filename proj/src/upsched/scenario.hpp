#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "upsched/workload.hpp"

namespace upsched {

inline constexpr int kScenarioSchemaVersion = 1;

struct DumbbellParams {
  int hosts_per_side = 8;
  std::int64_t bottleneck_bw = 1'000'000'000;
  std::int64_t access_bw = 10'000'000'000;
  SimTime bottleneck_prop = 100'000;
  SimTime access_prop = 1'000;
};

struct ChainParams {
  int routers = 6;
  int hosts_per_router = 1;
  std::int64_t router_bw = 1'000'000'000;
  std::int64_t host_bw = 10'000'000'000;
  SimTime router_prop = 10'000;
  SimTime host_prop = 1'000;
};

struct FatTreeParams {
  int k = 4;
  std::int64_t link_bw = 10'000'000'000;
  SimTime prop = 1'000;
};

struct TopologyConfig {
  std::string kind = "star_of_stars";  // star_of_stars, dumbbell, chain, fat_tree
  StarOfStarsParams star;
  DumbbellParams dumbbell;
  ChainParams chain;
  FatTreeParams fat_tree;
};

Topology build_topology(const TopologyConfig& cfg);

struct TrafficConfig {
  std::string model = "poisson";  // poisson or long_lived
  double target_utilization = 0.7;
  SizeDist sizes;
  SimTime duration = 20'000'000;
  std::int64_t mss_bytes = kDefaultMssBytes;
  TransportKind transport = TransportKind::OpenLoop;
  double init_window = 1.0;
  // Host name pairs. Poisson draws among them; long-lived flow i uses pair
  // i modulo the list. Empty: all host pairs (Poisson) or the first half of
  // the hosts sending to the second half (long-lived).
  std::vector<std::pair<std::string, std::string>> pairs;
  int flows = 12;
  SimTime start_jitter = 5'000'000;
};

struct BufferConfig {
  enum class Mode { Unbounded, Bytes, Bdp };
  Mode mode = Mode::Unbounded;
  std::int64_t bytes = 0;
  double bdp_multiple = 1.0;
};

struct ReplayConfig {
  std::vector<std::string> originals{"random"};
  std::vector<std::string> candidates{"lstf", "priority_o", "omniscient"};
  bool per_packet_csv = false;
  bool write_schedule = false;
};

struct ObjectiveConfig {
  std::string metric = "fct";  // fct, tail or fairness
  // "lstf" runs with the slack policy below; every other entry is a plain
  // scheduler tag. For fairness, "lstf" expands to one run per fraction.
  std::vector<std::string> schedulers{"fifo", "sjf", "srpt", "lstf"};
  std::string policy = "fct";
  SimTime policy_param = kNsPerSec;
  std::vector<double> r_est_fractions{1.0, 0.1, 0.01};
  SimTime window = 1'000'000;
  std::vector<std::int64_t> bucket_edges{0, 15'000, 150'000, 1'500'000};
};

struct SweepConfig {
  std::vector<double> utilizations{0.1, 0.3, 0.5, 0.7, 0.9};
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "scenario";
  std::uint64_t seed = 1;
  SimTime horizon = 0;  // simulated-time cap for every run; 0 means none
  TopologyConfig topology;
  TrafficConfig traffic;
  BufferConfig buffer;
  ReplayConfig replay;
  ObjectiveConfig objective;
  SweepConfig sweep;
};

nlohmann::ordered_json scenario_to_json(const ScenarioConfig& cfg);
// Unknown keys and missing schema_version are rejected with ConfigError.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

}  // namespace upsched
