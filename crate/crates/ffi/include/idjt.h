#ifndef IDJT_H
#define IDJT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IdjtHeuristic {
  IDJT_HEURISTIC_MIN_FILL = 0,
  IDJT_HEURISTIC_MIN_WEIGHT = 1,
} IdjtHeuristic;

typedef enum IdjtStatus {
  IDJT_STATUS_OK = 0,
  IDJT_STATUS_NULL_ARGUMENT = 1,
  IDJT_STATUS_INVALID_UTF8 = 2,
  IDJT_STATUS_IO = 3,
  IDJT_STATUS_SYNTAX = 4,
  IDJT_STATUS_INVALID_MODEL = 5,
  IDJT_STATUS_UNKNOWN_VARIABLE = 6,
  IDJT_STATUS_INVALID_ORDER = 7,
  IDJT_STATUS_OUT_OF_RANGE = 8,
  IDJT_STATUS_SOLVER = 9,
  IDJT_STATUS_PANIC = 10,
} IdjtStatus;

// A parsed and validated model.
typedef struct IdjtModel IdjtModel;

// A solved model; keeps its own copy of the model.
typedef struct IdjtSolution IdjtSolution;

// Message for the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *idjt_last_error(void);

// Parses and validates model text.
//
// # Safety
// `source` must be a NUL-terminated string and `out` a writable pointer.
enum IdjtStatus idjt_model_parse(const char *source, struct IdjtModel **out_model);

// Reads, parses and validates a model file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum IdjtStatus idjt_model_load(const char *path, struct IdjtModel **out_model);

// # Safety
// `model` must come from this library and not be freed twice. Null is ignored.
void idjt_model_free(struct IdjtModel *model);

// Number of variables, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t idjt_model_variable_count(const struct IdjtModel *model);

// Position of a variable in the canonical order used for assignments.
//
// # Safety
// `model` must be a live handle, `name` NUL-terminated, `out_index` writable.
enum IdjtStatus idjt_model_variable_index(const struct IdjtModel *model,
                                          const char *name,
                                          size_t *out_index);

// Compiles with a heuristic elimination order and solves.
//
// # Safety
// `model` must be a live handle and `out_solution` writable.
enum IdjtStatus idjt_solve(const struct IdjtModel *model,
                           enum IdjtHeuristic heuristic,
                           uint64_t seed,
                           struct IdjtSolution **out_solution);

// Compiles with a comma-separated elimination order, first eliminated first.
//
// # Safety
// `model` must be a live handle, `order` NUL-terminated, `out_solution` writable.
enum IdjtStatus idjt_solve_with_order(const struct IdjtModel *model,
                                      const char *order,
                                      struct IdjtSolution **out_solution);

// # Safety
// `solution` must come from this library and not be freed twice. Null is ignored.
void idjt_solution_free(struct IdjtSolution *solution);

// Maximum expected utility, or NaN for a null handle.
//
// # Safety
// `solution` must be null or a live handle.
double idjt_solution_meu(const struct IdjtSolution *solution);

// Optimal state of `decision` under a full assignment of state indices, one
// per variable in canonical order. Entries for variables outside the
// policy's domain are ignored.
//
// # Safety
// `solution` must be a live handle, `decision` NUL-terminated, `assignment`
// readable for `len` entries and `out_state` writable.
enum IdjtStatus idjt_solution_policy(const struct IdjtSolution *solution,
                                     const char *decision,
                                     const size_t *assignment,
                                     size_t len,
                                     size_t *out_state);

// Names of the variables a decision's policy depends on, space-separated.
// Free the result with [`idjt_string_free`].
//
// # Safety
// `solution` must be a live handle, `decision` NUL-terminated, `out_names` writable.
enum IdjtStatus idjt_solution_policy_domain(const struct IdjtSolution *solution,
                                            const char *decision,
                                            char **out_names);

// # Safety
// `s` must come from this library and not be freed twice. Null is ignored.
void idjt_string_free(char *s);

#endif  /* IDJT_H */
