#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "upsched/upsched.h"

namespace {

struct Options {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::string candidates;
  std::string originals;
  std::string policy;
  std::string fixture;
  bool list = false;
};

int report_failure(upsched_status st) {
  std::cerr << "error (" << upsched_status_name(st) << "): " << upsched_last_error() << "\n";
  return 1;
}

// Owns a scenario handle for the duration of one command.
class Scenario {
 public:
  ~Scenario() { upsched_scenario_free(handle_); }
  upsched_status load(const Options& opt) {
    upsched_status st = upsched_scenario_load(opt.scenario.c_str(), &handle_);
    if (st != UPSCHED_OK) return st;
    if (opt.seed && (st = upsched_scenario_set_seed(handle_, *opt.seed)) != UPSCHED_OK) return st;
    if (opt.horizon && (st = upsched_scenario_set_horizon(handle_, *opt.horizon)) != UPSCHED_OK) {
      return st;
    }
    if (!opt.candidates.empty() &&
        (st = upsched_scenario_set_candidates(handle_, opt.candidates.c_str())) != UPSCHED_OK) {
      return st;
    }
    if (!opt.originals.empty() &&
        (st = upsched_scenario_set_originals(handle_, opt.originals.c_str())) != UPSCHED_OK) {
      return st;
    }
    if (!opt.policy.empty() &&
        (st = upsched_scenario_set_policy(handle_, opt.policy.c_str())) != UPSCHED_OK) {
      return st;
    }
    return UPSCHED_OK;
  }
  const upsched_scenario* get() const { return handle_; }

 private:
  upsched_scenario* handle_ = nullptr;
};

int emit(upsched_status st, upsched_result* result, const Options& opt) {
  if (st != UPSCHED_OK) return report_failure(st);
  std::cout << upsched_result_table(result);
  std::cout << "summary: " << opt.out << "/summary.jsonl (" << upsched_result_row_count(result)
            << " rows)\n";
  upsched_result_free(result);
  return 0;
}

using Runner = upsched_status (*)(const upsched_scenario*, const char*, upsched_result**);

int run_scenario_command(const Options& opt, Runner runner) {
  Scenario sc;
  if (upsched_status st = sc.load(opt); st != UPSCHED_OK) return report_failure(st);
  upsched_result* result = nullptr;
  const upsched_status st = runner(sc.get(), opt.out.c_str(), &result);
  return emit(st, result, opt);
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--scenario", opt.scenario, "Scenario JSON file")->required();
  cmd->add_option("--seed", opt.seed, "Override the scenario seed");
  cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
  cmd->add_option("--horizon", opt.horizon, "Simulated-time cap in ns (0 removes it)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet scheduling replay and objective studies"};
  app.set_version_flag("--version", std::string(upsched_version()));
  app.require_subcommand(1);
  Options opt;

  auto* replay = app.add_subcommand("replay", "Record originals and replay each candidate");
  add_common(replay, opt);
  replay->add_option("--candidates", opt.candidates, "Comma-separated replay candidates");
  replay->add_option("--original,--originals", opt.originals,
                     "Comma-separated original schedulers");

  auto* sweep = app.add_subcommand("sweep", "Replay study across the scenario's utilizations");
  add_common(sweep, opt);
  sweep->add_option("--candidates", opt.candidates, "Comma-separated replay candidates");
  sweep->add_option("--original,--originals", opt.originals,
                    "Comma-separated original schedulers");

  auto* objective = app.add_subcommand("objective", "Compare schedulers on an objective");
  add_common(objective, opt);
  objective->add_option("--policy", opt.policy, "Slack policy for lstf: fct, uniform or fair");

  auto* fixture = app.add_subcommand("fixture", "Run a hand-built scenario and compare tables");
  fixture->add_option("name", opt.fixture, "Fixture name");
  fixture->add_option("--out", opt.out, "Output directory")->capture_default_str();
  fixture->add_flag("--list", opt.list, "List fixture names");

  CLI11_PARSE(app, argc, argv);

  if (replay->parsed()) return run_scenario_command(opt, upsched_run_replay);
  if (sweep->parsed()) return run_scenario_command(opt, upsched_run_sweep);
  if (objective->parsed()) return run_scenario_command(opt, upsched_run_objective);
  if (opt.list || opt.fixture.empty()) {
    std::cout << upsched_fixture_names();
    return opt.list ? 0 : 2;
  }
  upsched_result* result = nullptr;
  const upsched_status st = upsched_run_fixture(opt.fixture.c_str(), opt.out.c_str(), &result);
  return emit(st, result, opt);
}
