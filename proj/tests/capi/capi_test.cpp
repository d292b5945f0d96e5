// Exercises the shared library through its C header only.
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "upsched/upsched.h"

namespace {

int failures = 0;

void expect(bool ok, const char* what) {
  if (!ok) {
    std::printf("FAIL: %s (last error: %s)\n", what, upsched_last_error());
    ++failures;
  }
}

}  // namespace

int main() {
  expect(std::strcmp(upsched_version(), "1.0.0") == 0, "version string");
  expect(std::strcmp(upsched_status_name(UPSCHED_E_CONFIG), "configuration error") == 0,
         "status name");

  upsched_scenario* sc = nullptr;
  expect(upsched_scenario_load("/nonexistent/x.json", &sc) == UPSCHED_E_IO, "missing file is IO");
  expect(sc == nullptr, "no handle on failure");
  expect(std::strlen(upsched_last_error()) > 0, "last error set");
  expect(upsched_scenario_parse("{\"schema_version\": 1, \"bogus\": 2}", &sc) == UPSCHED_E_CONFIG,
         "unknown key is CONFIG");
  expect(upsched_scenario_parse(nullptr, &sc) == UPSCHED_E_INVALID_ARGUMENT, "null text");
  expect(upsched_scenario_set_seed(nullptr, 1) == UPSCHED_E_INVALID_ARGUMENT, "null handle");

  const std::string path = std::string(UPSCHED_SCENARIO_DIR) + "/i2_sweep.json";
  expect(upsched_scenario_load(path.c_str(), &sc) == UPSCHED_OK, "load shipped scenario");
  expect(std::strlen(upsched_last_error()) == 0, "last error cleared on success");
  expect(upsched_scenario_set_candidates(sc, "lstf,nonsense") == UPSCHED_E_CONFIG,
         "unknown candidate rejected");
  expect(upsched_scenario_set_originals(sc, ",,") == UPSCHED_E_INVALID_ARGUMENT,
         "empty original list rejected");
  expect(upsched_scenario_set_policy(sc, "edf") == UPSCHED_E_INVALID_ARGUMENT, "bad policy");
  expect(upsched_scenario_set_horizon(sc, -5) == UPSCHED_E_INVALID_ARGUMENT, "negative horizon");
  expect(upsched_scenario_set_candidates(sc, "omniscient,lstf") == UPSCHED_OK, "set candidates");
  expect(upsched_scenario_set_originals(sc, "fifo") == UPSCHED_OK, "set originals");
  expect(upsched_scenario_set_seed(sc, 5) == UPSCHED_OK, "set seed");

  char* json = nullptr;
  expect(upsched_scenario_to_json(sc, &json) == UPSCHED_OK, "to_json");
  upsched_scenario* again = nullptr;
  expect(upsched_scenario_parse(json, &again) == UPSCHED_OK, "parse own JSON");
  char* json2 = nullptr;
  expect(upsched_scenario_to_json(again, &json2) == UPSCHED_OK, "to_json again");
  expect(json && json2 && std::strcmp(json, json2) == 0, "JSON round trip is stable");
  expect(json && std::strstr(json, "\"seed\": 5") != nullptr, "seed override serialized");
  upsched_string_free(json);
  upsched_string_free(json2);
  upsched_scenario_free(again);

  const auto dir = std::filesystem::temp_directory_path() / "upsched_capi_test";
  std::filesystem::remove_all(dir);
  upsched_result* res = nullptr;
  expect(upsched_scenario_set_horizon(sc, 0) == UPSCHED_OK, "clear horizon");
  expect(upsched_run_replay(sc, dir.c_str(), &res) == UPSCHED_OK, "run replay");
  expect(upsched_result_row_count(res) == 2, "two replay rows");
  const char* row = upsched_result_row(res, 0);
  expect(row && std::strstr(row, "\"candidate\":\"omniscient\"") != nullptr, "first row");
  expect(row && std::strstr(row, "\"overdue\":0,") != nullptr, "omniscient has no overdue");
  expect(upsched_result_row(res, 2) == nullptr, "row out of range");
  expect(std::filesystem::exists(dir / "summary.jsonl"), "summary written");
  expect(std::filesystem::exists(dir / "table.txt"), "table written");
  upsched_result_free(res);
  upsched_scenario_free(sc);

  expect(upsched_run_fixture("priority_cycle", nullptr, &res) == UPSCHED_OK, "fixture run");
  expect(std::strstr(upsched_result_table(res), "priority_cycle") != nullptr, "fixture table");
  upsched_result_free(res);
  expect(upsched_run_fixture("missing", nullptr, &res) == UPSCHED_E_CONFIG, "unknown fixture");
  expect(res == nullptr, "no result on failure");
  expect(std::strstr(upsched_fixture_names(), "lstf_three_cp") != nullptr, "fixture names");

  std::filesystem::remove_all(dir);
  std::printf("%s (%d failures)\n", failures == 0 ? "capi ok" : "capi FAILED", failures);
  return failures == 0 ? 0 : 1;
}
