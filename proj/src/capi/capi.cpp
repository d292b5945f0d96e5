#include "upsched/upsched.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <new>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include "upsched/experiments.hpp"

struct upsched_scenario {
  upsched::ScenarioConfig cfg;
};

struct upsched_result {
  std::string summary;
  std::string table;
  std::vector<std::string> rows;
};

namespace {

thread_local std::string g_last_error;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

upsched_status fail(upsched_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Maps exceptions from the core onto status codes.
upsched_status guarded(const std::function<void()>& body) {
  g_last_error.clear();
  try {
    body();
    return UPSCHED_OK;
  } catch (const IoError& e) {
    return fail(UPSCHED_E_IO, e.what());
  } catch (const upsched::ConfigError& e) {
    return fail(UPSCHED_E_CONFIG, e.what());
  } catch (const upsched::SimulationError& e) {
    return fail(UPSCHED_E_SIMULATION, e.what());
  } catch (const upsched::ContractViolation& e) {
    return fail(UPSCHED_E_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(UPSCHED_E_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(UPSCHED_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(UPSCHED_E_INTERNAL, e.what());
  } catch (...) {
    return fail(UPSCHED_E_INTERNAL, "unknown error");
  }
}

// Splits a comma-separated list, running `check` on every entry so that
// unknown tags are rejected before anything is stored.
std::vector<std::string> split_tags(const std::string& list,
                                    const std::function<void(const std::string&)>& check) {
  std::vector<std::string> tags;
  std::istringstream is(list);
  std::string tag;
  while (std::getline(is, tag, ',')) {
    if (tag.empty()) continue;
    check(tag);
    tags.push_back(tag);
  }
  if (tags.empty()) throw upsched::ContractViolation("tag list is empty");
  return tags;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << contents;
  if (!os) throw IoError("failed writing " + path.string());
}

std::optional<std::filesystem::path> prepare_dir(const char* out_dir) {
  if (!out_dir) return std::nullopt;
  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

upsched_result* finish(std::string summary, std::string table,
                       const std::optional<std::filesystem::path>& dir,
                       const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  if (dir) {
    write_file(*dir / "summary.jsonl", summary);
    write_file(*dir / "table.txt", table);
    for (const auto& [name, contents] : extra) write_file(*dir / name, contents);
  }
  auto* r = new upsched_result;
  r->rows = split_lines(summary);
  r->summary = std::move(summary);
  r->table = std::move(table);
  return r;
}

}  // namespace

extern "C" {

const char* upsched_version(void) { return "1.0.0"; }

const char* upsched_last_error(void) { return g_last_error.c_str(); }

const char* upsched_status_name(upsched_status status) {
  switch (status) {
    case UPSCHED_OK: return "ok";
    case UPSCHED_E_INVALID_ARGUMENT: return "invalid argument";
    case UPSCHED_E_CONFIG: return "configuration error";
    case UPSCHED_E_IO: return "i/o error";
    case UPSCHED_E_SIMULATION: return "simulation error";
    case UPSCHED_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

upsched_status upsched_scenario_load(const char* path, upsched_scenario** out) {
  if (!path || !out) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!std::filesystem::exists(path)) {
    return fail(UPSCHED_E_IO, std::string("no such scenario file: ") + path);
  }
  return guarded([&] { *out = new upsched_scenario{upsched::load_scenario(path)}; });
}

upsched_status upsched_scenario_parse(const char* json_text, upsched_scenario** out) {
  if (!json_text || !out) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new upsched_scenario{upsched::parse_scenario(json_text)}; });
}

void upsched_scenario_free(upsched_scenario* scenario) { delete scenario; }

upsched_status upsched_scenario_set_seed(upsched_scenario* scenario, uint64_t seed) {
  if (!scenario) return fail(UPSCHED_E_INVALID_ARGUMENT, "null scenario");
  scenario->cfg.seed = seed;
  return UPSCHED_OK;
}

upsched_status upsched_scenario_set_horizon(upsched_scenario* scenario, int64_t horizon_ns) {
  if (!scenario) return fail(UPSCHED_E_INVALID_ARGUMENT, "null scenario");
  if (horizon_ns < 0) return fail(UPSCHED_E_INVALID_ARGUMENT, "horizon must not be negative");
  scenario->cfg.horizon = horizon_ns;
  return UPSCHED_OK;
}

upsched_status upsched_scenario_set_candidates(upsched_scenario* scenario,
                                               const char* candidates) {
  if (!scenario || !candidates) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    scenario->cfg.replay.candidates = split_tags(candidates, [](const std::string& tag) {
      upsched::ReplayCandidate::parse(tag);
    });
  });
}

upsched_status upsched_scenario_set_originals(upsched_scenario* scenario, const char* originals) {
  if (!scenario || !originals) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    scenario->cfg.replay.originals = split_tags(originals, [](const std::string& tag) {
      upsched::SchedulerAssignment::named(tag, 0);
    });
  });
}

upsched_status upsched_scenario_set_policy(upsched_scenario* scenario, const char* policy) {
  if (!scenario || !policy) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  const std::string name(policy);
  if (name != "fct" && name != "uniform" && name != "fair") {
    return fail(UPSCHED_E_INVALID_ARGUMENT, "unknown slack policy '" + name + "'");
  }
  scenario->cfg.objective.policy = name;
  return UPSCHED_OK;
}

upsched_status upsched_scenario_to_json(const upsched_scenario* scenario, char** out) {
  if (!scenario || !out) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const std::string text = upsched::scenario_to_json(scenario->cfg).dump(2);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void upsched_string_free(char* s) { delete[] s; }

upsched_status upsched_run_replay(const upsched_scenario* scenario, const char* out_dir,
                                  upsched_result** out) {
  if (!scenario || !out) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto dir = prepare_dir(out_dir);
    const auto study = upsched::run_replay_study(scenario->cfg, dir ? &*dir : nullptr);
    *out = finish(upsched::replay_summary_jsonl(study), upsched::format_replay_table(study), dir);
  });
}

upsched_status upsched_run_sweep(const upsched_scenario* scenario, const char* out_dir,
                                 upsched_result** out) {
  if (!scenario || !out) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto dir = prepare_dir(out_dir);
    const auto study = upsched::run_sweep_study(scenario->cfg);
    *out = finish(upsched::replay_summary_jsonl(study), upsched::format_replay_table(study), dir);
  });
}

upsched_status upsched_run_objective(const upsched_scenario* scenario, const char* out_dir,
                                     upsched_result** out) {
  if (!scenario || !out) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto dir = prepare_dir(out_dir);
    const auto study = upsched::run_objective_study(scenario->cfg);
    *out = finish(upsched::objective_summary_jsonl(study), upsched::format_objective_table(study),
                  dir, upsched::objective_csvs(study));
  });
}

upsched_status upsched_run_fixture(const char* name, const char* out_dir, upsched_result** out) {
  if (!name || !out) return fail(UPSCHED_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto dir = prepare_dir(out_dir);
    const auto study = upsched::run_fixture_study(name);
    *out = finish(upsched::fixture_summary_jsonl(study), upsched::format_fixture_report(study),
                  dir);
  });
}

const char* upsched_fixture_names(void) {
  static const std::string names = [] {
    std::string s;
    for (const auto& n : upsched::fixture_names()) s += n + "\n";
    return s;
  }();
  return names.c_str();
}

const char* upsched_result_summary(const upsched_result* result) {
  return result ? result->summary.c_str() : nullptr;
}

const char* upsched_result_table(const upsched_result* result) {
  return result ? result->table.c_str() : nullptr;
}

size_t upsched_result_row_count(const upsched_result* result) {
  return result ? result->rows.size() : 0;
}

const char* upsched_result_row(const upsched_result* result, size_t index) {
  if (!result || index >= result->rows.size()) return nullptr;
  return result->rows[index].c_str();
}

void upsched_result_free(upsched_result* result) { delete result; }

}  // extern "C"
