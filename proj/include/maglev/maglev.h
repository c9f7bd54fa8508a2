#ifndef MAGLEV_MAGLEV_H
#define MAGLEV_MAGLEV_H

/* C interface to the maglev conveyor simulator. Every call returns a status;
 * on failure maglev_last_error() describes it for the calling thread. Strings
 * returned through out-parameters are owned by the caller and released with
 * maglev_string_free(). */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(MAGLEV_BUILDING)
#    define MAGLEV_API __declspec(dllexport)
#  else
#    define MAGLEV_API __declspec(dllimport)
#  endif
#else
#  define MAGLEV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum maglev_status {
    MAGLEV_OK = 0,
    MAGLEV_ERR_DOMAIN = 1,   /* invalid scenario, unknown id, failed simulation */
    MAGLEV_ERR_IO = 2,       /* unreadable file, malformed JSON, write failure */
    MAGLEV_ERR_ARGUMENT = 3  /* null handle or pointer */
} maglev_status;

typedef struct maglev_scenario maglev_scenario;

MAGLEV_API const char* maglev_version(void);

/* Thread-local message for the most recent failed call, "" if none. */
MAGLEV_API const char* maglev_last_error(void);

MAGLEV_API void maglev_string_free(char* s);

/* A handle is produced even when the scenario has diagnostics, so they can be
 * listed; the status is then MAGLEV_ERR_DOMAIN. On MAGLEV_ERR_IO *out is NULL. */
MAGLEV_API maglev_status maglev_scenario_load(const char* path, maglev_scenario** out);
MAGLEV_API maglev_status maglev_scenario_parse(const char* json_text, maglev_scenario** out);
MAGLEV_API void maglev_scenario_free(maglev_scenario* scenario);

MAGLEV_API size_t maglev_scenario_diagnostic_count(const maglev_scenario* scenario);
/* Borrowed pointer valid until the handle changes or is freed; NULL if out of range. */
MAGLEV_API const char* maglev_scenario_diagnostic(const maglev_scenario* scenario, size_t index);

/* Overwrites a numeric field by dotted path and revalidates. */
MAGLEV_API maglev_status maglev_scenario_set_param(maglev_scenario* scenario, const char* dotted_path, double value);

/* Writes trajectory.csv, events.json and summary.json into out_dir. */
MAGLEV_API maglev_status maglev_simulate(const maglev_scenario* scenario, const char* out_dir);

/* Route between two nodes as a JSON document. */
MAGLEV_API maglev_status maglev_route(const maglev_scenario* scenario, const char* from_node, const char* to_node,
                                      char** json_out);

/* method: "greedy", "local" or "brute". */
MAGLEV_API maglev_status maglev_dispatch(const maglev_scenario* scenario, const char* method, char** json_out);

MAGLEV_API maglev_status maglev_sweep(const maglev_scenario* scenario, const char* dotted_path, const double* values,
                                      size_t count, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif
