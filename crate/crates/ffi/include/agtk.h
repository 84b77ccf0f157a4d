#ifndef AGTK_H
#define AGTK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of an FFI call. Values 1 to 3 match the command-line exit codes.
 */
typedef enum AgtkStatus {
  AGTK_STATUS_OK = 0,
  /**
   * A checked property failed; the report or witness is still returned
   * where the call produces one.
   */
  AGTK_STATUS_VIOLATION = 1,
  AGTK_STATUS_INVALID_INPUT = 2,
  AGTK_STATUS_CAP_EXCEEDED = 3,
  /**
   * Solver non-convergence or io failure.
   */
  AGTK_STATUS_FAILURE = 4,
  AGTK_STATUS_NULL_POINTER = 5,
  AGTK_STATUS_PANIC = 6,
} AgtkStatus;

/**
 * Opaque group handle.
 */
typedef struct AgtkGroup AgtkGroup;

/**
 * Opaque element-set handle; remembers its group.
 */
typedef struct AgtkSet AgtkSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * Valid until the next call on the same thread.
 */
const char *agtk_last_error(void);

/**
 * Library version as a static string.
 */
const char *agtk_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void agtk_string_free(char *s);

/**
 * Creates a group from a JSON spec (`{"kind": "cyclic", "n": 6}`) or a
 * short form (`psl2:5`), with default caps.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum AgtkStatus agtk_group_new(const char *spec, struct AgtkGroup **out);

/**
 * # Safety
 * `g` must come from [`agtk_group_new`] and not be freed twice. Null is ignored.
 */
void agtk_group_free(struct AgtkGroup *g);

/**
 * Writes the order of a finite group, or sets `finite` to false.
 * Orders above `u64::MAX` are a cap error.
 *
 * # Safety
 * `g` must be a live handle; `order` and `finite` must be writable.
 */
enum AgtkStatus agtk_group_order(const struct AgtkGroup *g, uint64_t *order, bool *finite);

/**
 * Builds a set from a JSON array of element literals.
 *
 * # Safety
 * `g` must be a live handle, `elements` NUL-terminated, `out` writable.
 */
enum AgtkStatus agtk_set_new(const struct AgtkGroup *g, const char *elements, struct AgtkSet **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is ignored.
 */
void agtk_set_free(struct AgtkSet *s);

/**
 * Number of elements; 0 for null.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t agtk_set_len(const struct AgtkSet *s);

/**
 * Product set `AB`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` writable.
 */
enum AgtkStatus agtk_set_product(const struct AgtkSet *a,
                                 const struct AgtkSet *b,
                                 struct AgtkSet **out);

/**
 * Elements as a JSON array of literals in canonical order.
 *
 * # Safety
 * `s` must be a live handle; `out` writable.
 */
enum AgtkStatus agtk_set_to_json(const struct AgtkSet *s, char **out);

/**
 * Doubling report (`|Aⁿ|` for `n ≤ n_max`, doubling and tripling) as JSON.
 *
 * # Safety
 * `s` must be a live handle; `out` writable.
 */
enum AgtkStatus agtk_doubling_report(const struct AgtkSet *s, size_t n_max, char **out);

/**
 * Ball sizes and diameter of the Cayley graph of `g` with generating set
 * `s`, or the symmetrized standard generators when `s` is null.
 *
 * # Safety
 * `g` must be a live handle, `s` null or a live handle, `out` writable.
 */
enum AgtkStatus agtk_diameter(const struct AgtkGroup *g, const struct AgtkSet *s, char **out);

/**
 * Spectral gap report, same generating-set convention as [`agtk_diameter`].
 *
 * # Safety
 * As for [`agtk_diameter`].
 */
enum AgtkStatus agtk_spectral_gap(const struct AgtkGroup *g, const struct AgtkSet *s, char **out);

/**
 * Runs a battery (`"freiman"`, `"hamidoune"`, ...) and writes its JSON
 * report. Returns `Violation` together with the report when a check failed.
 *
 * # Safety
 * `battery` must be NUL-terminated; `out` writable.
 */
enum AgtkStatus agtk_verify(const char *battery,
                            uint64_t max_order,
                            size_t samples,
                            uint64_t seed,
                            char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AGTK_H */
