#ifndef EMCK_H
#define EMCK_H

#include <stdbool.h>
#include <stdint.h>

/**
 * Status codes; the values match the command-line exit codes.
 */
typedef enum EmckStatus {
  EMCK_STATUS_OK = 0,
  /**
   * A check failed or a claim was falsified.
   */
  EMCK_STATUS_FAILED = 1,
  EMCK_STATUS_PARSE = 2,
  EMCK_STATUS_INVARIANT = 3,
  EMCK_STATUS_HYPOTHESIS_NOT_MET = 4,
  /**
   * An argument the library cannot use.
   */
  EMCK_STATUS_INVALID_ARGUMENT = 64,
  /**
   * An internal panic was caught.
   */
  EMCK_STATUS_INTERNAL = 70,
} EmckStatus;

/**
 * A parsed model document.
 */
typedef struct EmckModel EmckModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `.emod` text into a new handle stored in `*out`.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable; `error`
 * may be null.
 */
enum EmckStatus emck_model_parse(const char *text,
                                 bool allow_null_cells,
                                 struct EmckModel **out,
                                 char **error);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `model` must come from `emck_model_parse` and not be used afterwards.
 */
void emck_model_free(struct EmckModel *model);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void emck_string_free(char *s);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
uint32_t emck_model_n_states(const struct EmckModel *model);

/**
 * Number of agents, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
uint32_t emck_model_n_agents(const struct EmckModel *model);

/**
 * Canonical `.emod` text.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable; `error` may be null.
 */
enum EmckStatus emck_model_serialize(const struct EmckModel *model,
                                     bool expand_types,
                                     char **out,
                                     char **error);

/**
 * Runs one named checker for one agent (null `agent` means every agent).
 * Writes a JSON array of reports to `*report_json`.
 *
 * # Safety
 * Pointers must be valid as documented; `agent` and `error` may be null.
 */
enum EmckStatus emck_check(const struct EmckModel *model,
                           const char *axiom,
                           const char *agent,
                           char **report_json,
                           char **error);

/**
 * Verifies a claim; writes a JSON array of `{agent, report}` objects.
 *
 * # Safety
 * Pointers must be valid as documented; `error` may be null.
 */
enum EmckStatus emck_verify(const struct EmckModel *model,
                            const char *claim,
                            bool diagnostic,
                            char **report_json,
                            char **error);

/**
 * Evaluates an operator expression. The result is a bitmask over states in
 * declaration order (bit `i` is state `i`).
 *
 * # Safety
 * Pointers must be valid as documented; `error` may be null.
 */
enum EmckStatus emck_eval(const struct EmckModel *model,
                          const char *expr,
                          uint64_t *out_bits,
                          char **error);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* EMCK_H */
