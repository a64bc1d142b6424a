#ifndef WALLCROSS_H
#define WALLCROSS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WcStatus {
  WC_STATUS_OK = 0,
  WC_STATUS_NULL_POINTER = 1,
  WC_STATUS_UTF8 = 2,
  WC_STATUS_PARSE = 3,
  WC_STATUS_INPUT = 4,
  WC_STATUS_INTERNAL = 5,
  WC_STATUS_PANIC = 6,
} WcStatus;

// A representation together with its wall arrangement.
typedef struct WcRep WcRep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds a representation from JSON `{"root_datum": {...}, "weights": [[...], ...]}`.
//
// # Safety
// `json` must be null or a valid NUL-terminated string; `out` must be null or writable.
enum WcStatus wc_rep_from_json(const char *json, struct WcRep **out);

// Builds a rank-one torus representation from `n` integer weights.
//
// # Safety
// `weights` must point to `n` readable values; `out` must be null or writable.
enum WcStatus wc_rep_torus1(const int64_t *weights, uintptr_t n, struct WcRep **out);

// Releases a handle from `wc_rep_from_json` or `wc_rep_torus1`. Null is ignored.
//
// # Safety
// `rep` must be null or a handle not yet freed.
void wc_rep_free(struct WcRep *rep);

// Rank of the character lattice.
//
// # Safety
// `rep` must be a live handle or null; `out` must be null or writable.
enum WcStatus wc_rep_rank(const struct WcRep *rep, uintptr_t *out);

// Window at `delta` (comma-separated rationals such as `"1/2"`) as JSON `{"delta", "chars"}`.
//
// # Safety
// `rep` must be a live handle or null; `delta` a NUL-terminated string or null; `out` writable or null.
enum WcStatus wc_window_json(const struct WcRep *rep,
                             const char *delta,
                             char **out);

// Wall crossing between adjacent chambers as JSON with `common` and `faces`.
//
// # Safety
// As for `wc_window_json`, with `delta2` a second NUL-terminated string.
enum WcStatus wc_wallcross_json(const struct WcRep *rep,
                                const char *delta,
                                const char *delta2,
                                char **out);

// Calabi–Yau report for weights `a[0..n]`, degrees `d[0..r]` and twist parameter `twist`.
//
// # Safety
// `a` and `d` must point to `n` and `r` readable values; `out` writable or null.
enum WcStatus wc_cy_report_json(const int64_t *a,
                                uintptr_t n,
                                const int64_t *d,
                                uintptr_t r,
                                int64_t twist,
                                char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void wc_string_free(char *s);

// Message of the last failed call on this thread; empty after a success. Valid until the next call.
const char *wc_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WALLCROSS_H */
