#ifndef HDERLAB_H
#define HDERLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of every fallible call.
typedef enum HderlabStatus {
  HDERLAB_STATUS_OK = 0,
  // The command ran and reported a mathematical negative.
  HDERLAB_STATUS_NEGATIVE = 1,
  // Malformed problem, bad arguments or size limit.
  HDERLAB_STATUS_INPUT_ERROR = 2,
  HDERLAB_STATUS_NULL_POINTER = 3,
  HDERLAB_STATUS_INVALID_UTF8 = 4,
  HDERLAB_STATUS_PANIC = 5,
} HderlabStatus;

// A parsed problem file.
typedef struct HderlabProblem HderlabProblem;

// Outcome of one command.
typedef struct HderlabReport HderlabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a problem document. Size limits come from `HDERLAB_MAX_DIM`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum HderlabStatus hderlab_problem_from_json(const char *json, struct HderlabProblem **out);

// # Safety
// `problem` must come from [`hderlab_problem_from_json`] or be null.
void hderlab_problem_free(struct HderlabProblem *problem);

// Runs `command` (a CLI subcommand name such as `"cohomology"`) with
// `nargs` extra flags, e.g. `{"--degree", "2"}`. A report is produced
// whenever the command could be parsed, including for negative outcomes;
// the return value mirrors the CLI exit code.
//
// # Safety
// `args` must point to `nargs` NUL-terminated strings (or be null when
// `nargs` is 0); `out` must be writable.
enum HderlabStatus hderlab_run(const struct HderlabProblem *problem,
                               const char *command,
                               const char *const *args,
                               size_t nargs,
                               struct HderlabReport **out);

// The report as pretty-printed JSON; free with [`hderlab_string_free`].
//
// # Safety
// `report` must be a live handle or null.
char *hderlab_report_json(const struct HderlabReport *report);

// # Safety
// `report` must be a live handle or null.
bool hderlab_report_ok(const struct HderlabReport *report);

// # Safety
// `report` must be a live handle or null.
int32_t hderlab_report_exit_code(const struct HderlabReport *report);

// # Safety
// `report` must come from [`hderlab_run`] or be null.
void hderlab_report_free(struct HderlabReport *report);

// `dim H^degree` with the problem's bimodule (adjoint when none is given).
//
// # Safety
// `problem` must be a live handle; `betti` must be writable.
enum HderlabStatus hderlab_cohomology_betti(const struct HderlabProblem *problem,
                                            size_t degree,
                                            size_t *betti);

// Message for the most recent failure on this thread, or null. Free with
// [`hderlab_string_free`].
char *hderlab_last_error(void);

// # Safety
// `s` must come from this library or be null.
void hderlab_string_free(char *s);

// Library version, statically allocated.
const char *hderlab_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HDERLAB_H */
