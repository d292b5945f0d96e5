#ifndef UPSCHED_UPSCHED_H
#define UPSCHED_UPSCHED_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UPSCHED_API __declspec(dllexport)
#else
#define UPSCHED_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum upsched_status {
  UPSCHED_OK = 0,
  UPSCHED_E_INVALID_ARGUMENT = 1, /* null handle, bad name or value */
  UPSCHED_E_CONFIG = 2,           /* malformed or inconsistent scenario */
  UPSCHED_E_IO = 3,               /* file could not be read or written */
  UPSCHED_E_SIMULATION = 4,       /* a run produced an unusable result */
  UPSCHED_E_INTERNAL = 5
} upsched_status;

typedef struct upsched_scenario upsched_scenario;
typedef struct upsched_result upsched_result;

UPSCHED_API const char* upsched_version(void);

/* Message for the most recent failure on the calling thread, "" if none. */
UPSCHED_API const char* upsched_last_error(void);

UPSCHED_API const char* upsched_status_name(upsched_status status);

UPSCHED_API upsched_status upsched_scenario_load(const char* path, upsched_scenario** out);
UPSCHED_API upsched_status upsched_scenario_parse(const char* json_text, upsched_scenario** out);
UPSCHED_API void upsched_scenario_free(upsched_scenario* scenario);

UPSCHED_API upsched_status upsched_scenario_set_seed(upsched_scenario* scenario, uint64_t seed);
/* Simulated-time cap in nanoseconds; 0 removes the cap. */
UPSCHED_API upsched_status upsched_scenario_set_horizon(upsched_scenario* scenario,
                                                        int64_t horizon_ns);
/* Comma-separated replay candidate tags, e.g. "lstf,priority_o". */
UPSCHED_API upsched_status upsched_scenario_set_candidates(upsched_scenario* scenario,
                                                           const char* candidates);
/* Comma-separated original scheduler tags, e.g. "random,sjf". */
UPSCHED_API upsched_status upsched_scenario_set_originals(upsched_scenario* scenario,
                                                          const char* originals);
/* Slack policy used by "lstf" in objective studies: fct, uniform or fair. */
UPSCHED_API upsched_status upsched_scenario_set_policy(upsched_scenario* scenario,
                                                       const char* policy);

/* Canonical JSON of the scenario. Release with upsched_string_free. */
UPSCHED_API upsched_status upsched_scenario_to_json(const upsched_scenario* scenario,
                                                    char** out);
UPSCHED_API void upsched_string_free(char* s);

/*
 * Study runners. When out_dir is non-null the directory is created if needed
 * and receives summary.jsonl, table.txt and any detail files the scenario
 * asks for. Results are owned by the caller.
 */
UPSCHED_API upsched_status upsched_run_replay(const upsched_scenario* scenario,
                                              const char* out_dir, upsched_result** out);
UPSCHED_API upsched_status upsched_run_sweep(const upsched_scenario* scenario,
                                             const char* out_dir, upsched_result** out);
UPSCHED_API upsched_status upsched_run_objective(const upsched_scenario* scenario,
                                                 const char* out_dir, upsched_result** out);
UPSCHED_API upsched_status upsched_run_fixture(const char* name, const char* out_dir,
                                               upsched_result** out);

/* Newline-separated fixture names; static storage. */
UPSCHED_API const char* upsched_fixture_names(void);

/* Strings below stay valid until the result is freed. */
UPSCHED_API const char* upsched_result_summary(const upsched_result* result); /* JSON lines */
UPSCHED_API const char* upsched_result_table(const upsched_result* result);   /* plain text */
UPSCHED_API size_t upsched_result_row_count(const upsched_result* result);
/* One summary line without its newline, or NULL when out of range. */
UPSCHED_API const char* upsched_result_row(const upsched_result* result, size_t index);
UPSCHED_API void upsched_result_free(upsched_result* result);

#ifdef __cplusplus
}
#endif

#endif
