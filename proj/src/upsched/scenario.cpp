#include "upsched/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace upsched {

using nlohmann::json;
using nlohmann::ordered_json;

Topology build_topology(const TopologyConfig& cfg) {
  if (cfg.kind == "star_of_stars") return build_star_of_stars(cfg.star);
  if (cfg.kind == "dumbbell") {
    const auto& d = cfg.dumbbell;
    return build_dumbbell(d.hosts_per_side, d.bottleneck_bw, d.access_bw, d.bottleneck_prop,
                          d.access_prop);
  }
  if (cfg.kind == "chain") {
    const auto& c = cfg.chain;
    return build_chain(c.routers, c.hosts_per_router, c.router_bw, c.host_bw, c.router_prop,
                       c.host_prop);
  }
  if (cfg.kind == "fat_tree") {
    return build_fat_tree(cfg.fat_tree.k, cfg.fat_tree.link_bw, cfg.fat_tree.prop);
  }
  throw ConfigError("unknown topology kind '" + cfg.kind + "'");
}

namespace {

// Walks one JSON object, remembering which keys were read so that leftovers
// (typos, stale fields) can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    seen_.insert(key);
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

ordered_json sizes_to_json(const SizeDist& d) {
  ordered_json j;
  if (d.kind == SizeDist::Kind::Fixed) {
    j["kind"] = "fixed";
    j["bytes"] = d.fixed_bytes;
  } else {
    j["kind"] = "bounded_pareto";
    j["shape"] = d.shape;
    j["min_bytes"] = d.min_bytes;
    j["max_bytes"] = d.max_bytes;
  }
  return j;
}

SizeDist sizes_from_json(const json& j) {
  ObjectReader r(j, "traffic.sizes");
  std::string kind = "bounded_pareto";
  r.get("kind", kind);
  SizeDist d;
  if (kind == "fixed") {
    d.kind = SizeDist::Kind::Fixed;
    r.get("bytes", d.fixed_bytes);
    if (d.fixed_bytes <= 0) throw ConfigError("traffic.sizes.bytes must be positive");
  } else if (kind == "bounded_pareto") {
    r.get("shape", d.shape);
    r.get("min_bytes", d.min_bytes);
    r.get("max_bytes", d.max_bytes);
    if (d.min_bytes <= 0 || d.max_bytes < d.min_bytes || !(d.shape > 0)) {
      throw ConfigError("traffic.sizes: need 0 < min_bytes <= max_bytes and shape > 0");
    }
  } else {
    throw ConfigError("traffic.sizes.kind must be 'fixed' or 'bounded_pareto'");
  }
  r.finish();
  return d;
}

const char* transport_name(TransportKind t) {
  return t == TransportKind::Aimd ? "aimd" : "open_loop";
}

TransportKind transport_from(const std::string& s) {
  if (s == "aimd") return TransportKind::Aimd;
  if (s == "open_loop") return TransportKind::OpenLoop;
  throw ConfigError("traffic.transport must be 'open_loop' or 'aimd'");
}

const char* buffer_mode_name(BufferConfig::Mode m) {
  switch (m) {
    case BufferConfig::Mode::Bytes:
      return "bytes";
    case BufferConfig::Mode::Bdp:
      return "bdp";
    case BufferConfig::Mode::Unbounded:
      break;
  }
  return "unbounded";
}

ordered_json topology_to_json(const TopologyConfig& t) {
  ordered_json j;
  j["kind"] = t.kind;
  if (t.kind == "star_of_stars") {
    const auto& s = t.star;
    j["core_nodes"] = s.core_nodes;
    j["edges_per_core"] = s.edges_per_core;
    j["hosts_per_edge"] = s.hosts_per_edge;
    j["core_bw"] = s.core_bw;
    j["edge_bw"] = s.edge_bw;
    j["host_bw"] = s.host_bw;
    j["core_prop_ns"] = s.core_prop;
    j["edge_prop_ns"] = s.edge_prop;
    j["host_prop_ns"] = s.host_prop;
  } else if (t.kind == "dumbbell") {
    const auto& d = t.dumbbell;
    j["hosts_per_side"] = d.hosts_per_side;
    j["bottleneck_bw"] = d.bottleneck_bw;
    j["access_bw"] = d.access_bw;
    j["bottleneck_prop_ns"] = d.bottleneck_prop;
    j["access_prop_ns"] = d.access_prop;
  } else if (t.kind == "chain") {
    const auto& c = t.chain;
    j["routers"] = c.routers;
    j["hosts_per_router"] = c.hosts_per_router;
    j["router_bw"] = c.router_bw;
    j["host_bw"] = c.host_bw;
    j["router_prop_ns"] = c.router_prop;
    j["host_prop_ns"] = c.host_prop;
  } else if (t.kind == "fat_tree") {
    j["k"] = t.fat_tree.k;
    j["link_bw"] = t.fat_tree.link_bw;
    j["prop_ns"] = t.fat_tree.prop;
  }
  return j;
}

TopologyConfig topology_from_json(const json& j) {
  ObjectReader r(j, "topology");
  TopologyConfig t;
  r.get("kind", t.kind);
  if (t.kind == "star_of_stars") {
    auto& s = t.star;
    r.get("core_nodes", s.core_nodes);
    r.get("edges_per_core", s.edges_per_core);
    r.get("hosts_per_edge", s.hosts_per_edge);
    r.get("core_bw", s.core_bw);
    r.get("edge_bw", s.edge_bw);
    r.get("host_bw", s.host_bw);
    r.get("core_prop_ns", s.core_prop);
    r.get("edge_prop_ns", s.edge_prop);
    r.get("host_prop_ns", s.host_prop);
  } else if (t.kind == "dumbbell") {
    auto& d = t.dumbbell;
    r.get("hosts_per_side", d.hosts_per_side);
    r.get("bottleneck_bw", d.bottleneck_bw);
    r.get("access_bw", d.access_bw);
    r.get("bottleneck_prop_ns", d.bottleneck_prop);
    r.get("access_prop_ns", d.access_prop);
  } else if (t.kind == "chain") {
    auto& c = t.chain;
    r.get("routers", c.routers);
    r.get("hosts_per_router", c.hosts_per_router);
    r.get("router_bw", c.router_bw);
    r.get("host_bw", c.host_bw);
    r.get("router_prop_ns", c.router_prop);
    r.get("host_prop_ns", c.host_prop);
  } else if (t.kind == "fat_tree") {
    r.get("k", t.fat_tree.k);
    r.get("link_bw", t.fat_tree.link_bw);
    r.get("prop_ns", t.fat_tree.prop);
  } else {
    throw ConfigError("unknown topology kind '" + t.kind + "'");
  }
  r.finish();
  return t;
}

ordered_json traffic_to_json(const TrafficConfig& t) {
  ordered_json j;
  j["model"] = t.model;
  j["target_utilization"] = t.target_utilization;
  j["sizes"] = sizes_to_json(t.sizes);
  j["duration_ns"] = t.duration;
  j["flows"] = t.flows;
  j["start_jitter_ns"] = t.start_jitter;
  j["mss_bytes"] = t.mss_bytes;
  j["transport"] = transport_name(t.transport);
  j["init_window"] = t.init_window;
  ordered_json pairs = ordered_json::array();
  for (const auto& [s, d] : t.pairs) pairs.push_back({s, d});
  j["pairs"] = pairs;
  return j;
}

TrafficConfig traffic_from_json(const json& j) {
  ObjectReader r(j, "traffic");
  TrafficConfig t;
  r.get("model", t.model);
  r.get("target_utilization", t.target_utilization);
  if (const json* s = r.child("sizes")) t.sizes = sizes_from_json(*s);
  r.get("duration_ns", t.duration);
  r.get("flows", t.flows);
  r.get("start_jitter_ns", t.start_jitter);
  if (t.model != "poisson" && t.model != "long_lived") {
    throw ConfigError("traffic.model must be 'poisson' or 'long_lived'");
  }
  if (!(t.target_utilization > 0 && t.target_utilization < 1)) {
    throw ConfigError("traffic.target_utilization must lie in (0, 1)");
  }
  if (t.duration <= 0) throw ConfigError("traffic.duration_ns must be positive");
  if (t.flows < 1) throw ConfigError("traffic.flows must be at least 1");
  if (t.start_jitter < 0) throw ConfigError("traffic.start_jitter_ns must not be negative");
  r.get("mss_bytes", t.mss_bytes);
  if (t.mss_bytes <= 0) throw ConfigError("traffic.mss_bytes must be positive");
  std::string transport = transport_name(t.transport);
  r.get("transport", transport);
  t.transport = transport_from(transport);
  r.get("init_window", t.init_window);
  if (!(t.init_window >= 1)) throw ConfigError("traffic.init_window must be at least 1");
  std::vector<std::vector<std::string>> pairs;
  r.get("pairs", pairs);
  for (const auto& p : pairs) {
    if (p.size() != 2) throw ConfigError("traffic.pairs entries must be [src, dst]");
    t.pairs.emplace_back(p[0], p[1]);
  }
  r.finish();
  return t;
}

ordered_json buffer_to_json(const BufferConfig& b) {
  ordered_json j;
  j["mode"] = buffer_mode_name(b.mode);
  j["bytes"] = b.bytes;
  j["bdp_multiple"] = b.bdp_multiple;
  return j;
}

BufferConfig buffer_from_json(const json& j) {
  ObjectReader r(j, "buffer");
  BufferConfig b;
  std::string mode = "unbounded";
  r.get("mode", mode);
  r.get("bytes", b.bytes);
  r.get("bdp_multiple", b.bdp_multiple);
  if (mode == "unbounded") {
    b.mode = BufferConfig::Mode::Unbounded;
  } else if (mode == "bytes") {
    b.mode = BufferConfig::Mode::Bytes;
    if (b.bytes <= 0) throw ConfigError("buffer.bytes must be positive");
  } else if (mode == "bdp") {
    b.mode = BufferConfig::Mode::Bdp;
    if (!(b.bdp_multiple > 0)) throw ConfigError("buffer.bdp_multiple must be positive");
  } else {
    throw ConfigError("buffer.mode must be 'unbounded', 'bytes' or 'bdp'");
  }
  r.finish();
  return b;
}

ordered_json replay_to_json(const ReplayConfig& c) {
  ordered_json j;
  j["originals"] = c.originals;
  j["candidates"] = c.candidates;
  j["per_packet_csv"] = c.per_packet_csv;
  j["write_schedule"] = c.write_schedule;
  return j;
}

ReplayConfig replay_from_json(const json& j) {
  ObjectReader r(j, "replay");
  ReplayConfig c;
  r.get("originals", c.originals);
  r.get("candidates", c.candidates);
  r.get("per_packet_csv", c.per_packet_csv);
  r.get("write_schedule", c.write_schedule);
  r.finish();
  for (const auto& o : c.originals) SchedulerAssignment::named(o, 0);
  for (const auto& k : c.candidates) ReplayCandidate::parse(k);
  return c;
}

ordered_json objective_to_json(const ObjectiveConfig& c) {
  ordered_json j;
  j["metric"] = c.metric;
  j["schedulers"] = c.schedulers;
  j["policy"] = c.policy;
  j["policy_param_ns"] = c.policy_param;
  j["r_est_fractions"] = c.r_est_fractions;
  j["window_ns"] = c.window;
  j["bucket_edges_bytes"] = c.bucket_edges;
  return j;
}

ObjectiveConfig objective_from_json(const json& j) {
  ObjectReader r(j, "objective");
  ObjectiveConfig c;
  r.get("metric", c.metric);
  r.get("schedulers", c.schedulers);
  r.get("policy", c.policy);
  r.get("policy_param_ns", c.policy_param);
  r.get("r_est_fractions", c.r_est_fractions);
  r.get("window_ns", c.window);
  r.get("bucket_edges_bytes", c.bucket_edges);
  r.finish();
  if (c.metric != "fct" && c.metric != "tail" && c.metric != "fairness") {
    throw ConfigError("objective.metric must be 'fct', 'tail' or 'fairness'");
  }
  if (c.policy != "fct" && c.policy != "uniform" && c.policy != "fair") {
    throw ConfigError("objective.policy must be 'fct', 'uniform' or 'fair'");
  }
  for (const auto& s : c.schedulers) {
    if (s != "lstf") SchedulerKind::parse(s);
  }
  for (double f : c.r_est_fractions) {
    if (!(f > 0)) throw ConfigError("objective.r_est_fractions must be positive");
  }
  if (c.window <= 0) throw ConfigError("objective.window_ns must be positive");
  if (c.bucket_edges.empty() || c.bucket_edges.front() != 0) {
    throw ConfigError("objective.bucket_edges_bytes must start at 0");
  }
  return c;
}

}  // namespace

ordered_json scenario_to_json(const ScenarioConfig& cfg) {
  ordered_json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  j["seed"] = cfg.seed;
  j["horizon_ns"] = cfg.horizon;
  j["topology"] = topology_to_json(cfg.topology);
  j["traffic"] = traffic_to_json(cfg.traffic);
  j["buffer"] = buffer_to_json(cfg.buffer);
  j["replay"] = replay_to_json(cfg.replay);
  j["objective"] = objective_to_json(cfg.objective);
  j["sweep"] = {{"utilizations", cfg.sweep.utilizations}};
  return j;
}

ScenarioConfig scenario_from_json(const json& j) {
  ObjectReader r(j, "scenario");
  ScenarioConfig cfg;
  if (!r.has("schema_version")) throw ConfigError("scenario: missing schema_version");
  r.get("schema_version", cfg.schema_version);
  if (cfg.schema_version != kScenarioSchemaVersion) {
    throw ConfigError("scenario: unsupported schema_version " +
                      std::to_string(cfg.schema_version));
  }
  r.get("name", cfg.name);
  r.get("seed", cfg.seed);
  r.get("horizon_ns", cfg.horizon);
  if (cfg.horizon < 0) throw ConfigError("scenario.horizon_ns must not be negative");
  if (const json* t = r.child("topology")) cfg.topology = topology_from_json(*t);
  if (const json* t = r.child("traffic")) cfg.traffic = traffic_from_json(*t);
  if (const json* b = r.child("buffer")) cfg.buffer = buffer_from_json(*b);
  if (const json* p = r.child("replay")) cfg.replay = replay_from_json(*p);
  if (const json* o = r.child("objective")) cfg.objective = objective_from_json(*o);
  if (const json* s = r.child("sweep")) {
    ObjectReader sr(*s, "sweep");
    sr.get("utilizations", cfg.sweep.utilizations);
    sr.finish();
    for (double u : cfg.sweep.utilizations) {
      if (!(u > 0 && u < 1)) throw ConfigError("sweep.utilizations must lie in (0, 1)");
    }
  }
  r.finish();
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace upsched
