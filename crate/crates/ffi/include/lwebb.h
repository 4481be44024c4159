#ifndef LWEBB_H
#define LWEBB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum LwebbStatus {
  LWEBB_STATUS_OK = 0,
  LWEBB_STATUS_NULL_POINTER = 1,
  LWEBB_STATUS_INVALID_UTF8 = 2,
  LWEBB_STATUS_PARSE_ERROR = 3,
  LWEBB_STATUS_LOAD_ERROR = 4,
  LWEBB_STATUS_SOLVE_ERROR = 5,
  // Wall-clock cap or memory guard of an unbounded query.
  LWEBB_STATUS_RESOURCE_LIMIT = 6,
  LWEBB_STATUS_IO_ERROR = 7,
  LWEBB_STATUS_OUT_OF_RANGE = 8,
  LWEBB_STATUS_PANIC = 9,
} LwebbStatus;

// Outcome of a query that ran to completion. Values match the CLI exit codes.
typedef enum LwebbOutcome {
  LWEBB_OUTCOME_SUCCESS = 0,
  LWEBB_OUTCOME_FAILURE = 1,
  LWEBB_OUTCOME_BOUND_EXHAUSTED = 2,
} LwebbOutcome;

// Answers of one query.
typedef struct LwebbResult LwebbResult;

// A query session: resolution map, loaded pages and plain program.
typedef struct LwebbSession LwebbSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// New session with default settings: no map, unbounded queries, one
// answer per query, 30 s wall cap. Returns null on failure.
struct LwebbSession *lwebb_session_new(void);

// # Safety
// `s` is null or a handle from `lwebb_session_new` not yet freed.
void lwebb_session_free(struct LwebbSession *s);

// Sets the resolution map file; null clears it.
//
// # Safety
// `s` is a live session; `path` is null or a NUL-terminated string.
enum LwebbStatus lwebb_session_set_map_file(struct LwebbSession *s, const char *path);

// Default bound for queries that give none; a negative value means unbounded.
//
// # Safety
// `s` is a live session.
enum LwebbStatus lwebb_session_set_default_bound(struct LwebbSession *s, int64_t bound);

// Answers collected per query; 0 is treated as 1.
//
// # Safety
// `s` is a live session.
enum LwebbStatus lwebb_session_set_max_solutions(struct LwebbSession *s, size_t n);

// Wall-clock cap for unbounded queries, in milliseconds.
//
// # Safety
// `s` is a live session.
enum LwebbStatus lwebb_session_set_wall_cap_ms(struct LwebbSession *s, uint64_t ms);

// # Safety
// `s` is a live session.
enum LwebbStatus lwebb_session_set_occurs_check(struct LwebbSession *s, bool on);

// Records every rule application of each answer.
//
// # Safety
// `s` is a live session.
enum LwebbStatus lwebb_session_set_trace(struct LwebbSession *s, bool on);

// Resolves a page (e.g. `www.d.com/lists`); later queries run inside it.
//
// # Safety
// `s` is a live session; `origin` is a NUL-terminated string.
enum LwebbStatus lwebb_session_load(struct LwebbSession *s, const char *origin);

// Appends plain clauses to the session program.
//
// # Safety
// `s` is a live session; `text` is a NUL-terminated string.
enum LwebbStatus lwebb_session_add_program(struct LwebbSession *s, const char *text);

// Runs a query such as `?- (100) p(X).` (the `?-` and the final `.` are
// optional). On `LWEBB_STATUS_OK`, `*out` holds a result to release with
// `lwebb_result_free`; otherwise it is set to null.
//
// # Safety
// `s` is a live session, `query` a NUL-terminated string, `out` writable.
enum LwebbStatus lwebb_session_query(struct LwebbSession *s,
                                     const char *query,
                                     struct LwebbResult **out);

// # Safety
// `r` is null or a result not yet freed.
void lwebb_result_free(struct LwebbResult *r);

// # Safety
// `r` is a live result.
enum LwebbOutcome lwebb_result_outcome(const struct LwebbResult *r);

// Number of answers held by the result.
//
// # Safety
// `r` is null or a live result.
size_t lwebb_result_count(const struct LwebbResult *r);

// Proof length of answer `i`.
//
// # Safety
// `r` is a live result; `len` is writable.
enum LwebbStatus lwebb_result_length(const struct LwebbResult *r, size_t i, uint64_t *len);

// Value of query variable `name` in answer `i`, rendered as a term. Null
// when the variable is unbound or the arguments are invalid.
//
// # Safety
// `r` is a live result; `name` is a NUL-terminated string.
char *lwebb_result_binding(const struct LwebbResult *r, size_t i, const char *name);

// Answer `i` as printed by the CLI: bindings, then the `yes` line.
//
// # Safety
// `r` is a live result.
char *lwebb_result_answer(const struct LwebbResult *r, size_t i);

// Whole result as printed by the CLI.
//
// # Safety
// `r` is a live result.
char *lwebb_result_render(const struct LwebbResult *r);

// # Safety
// `p` is null or a string returned by this library, not yet freed.
void lwebb_string_free(char *p);

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *lwebb_last_error_message(void);

// Library version, static storage.
const char *lwebb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LWEBB_H */
