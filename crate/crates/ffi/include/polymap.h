#ifndef POLYMAP_H
#define POLYMAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PolymapStability {
  POLYMAP_STABILITY_ATTRACTOR = 0,
  POLYMAP_STABILITY_REPELLOR = 1,
  POLYMAP_STABILITY_NONHYPERBOLIC_STABLE = 2,
  POLYMAP_STABILITY_NONHYPERBOLIC_UNSTABLE = 3,
  POLYMAP_STABILITY_SEMISTABLE_RIGHT = 4,
  POLYMAP_STABILITY_SEMISTABLE_LEFT = 5,
  POLYMAP_STABILITY_INDETERMINATE = 6,
} PolymapStability;

typedef enum PolymapStatus {
  POLYMAP_STATUS_OK = 0,
  POLYMAP_STATUS_NULL_POINTER = 1,
  POLYMAP_STATUS_INVALID_ARGUMENT = 2,
  POLYMAP_STATUS_COMPLEX_FIXED_POINTS = 3,
  POLYMAP_STATUS_NON_CONVERGENCE = 4,
  POLYMAP_STATUS_SYNTAX = 5,
  POLYMAP_STATUS_POISONED = 6,
  POLYMAP_STATUS_UNKNOWN_PRESET = 7,
  POLYMAP_STATUS_INDEX_OUT_OF_RANGE = 8,
  POLYMAP_STATUS_UNSUPPORTED_DEGREE = 9,
  POLYMAP_STATUS_NUMERICAL = 10,
  POLYMAP_STATUS_IO = 11,
  POLYMAP_STATUS_PANIC = 12,
} PolymapStatus;

/**
 * Opaque one-parameter family.
 */
typedef struct PolymapFamily PolymapFamily;

/**
 * Opaque canonical map.
 */
typedef struct PolymapMap PolymapMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after success.
 * The pointer stays valid until the next call on this thread.
 */
const char *polymap_last_error(void);

/**
 * Canonical map with sign `s` (+1 or -1) and nonzero fixed points `xs[0..n]`.
 *
 * # Safety
 * `xs` must point to `n` doubles; `out` must be valid for writes.
 */
enum PolymapStatus polymap_map_new(int32_t s, const double *xs, size_t n, struct PolymapMap **out);

/**
 * Canonical form of `f(y) = sum coeffs[i] y^i`, anchored at the smallest
 * fixed point. `scale` and `offset` receive `y = scale x + offset`; either
 * may be null.
 *
 * # Safety
 * `coeffs` must point to `n` doubles; `out` must be valid for writes.
 */
enum PolymapStatus polymap_map_from_coefficients(const double *coeffs,
                                                 size_t n,
                                                 struct PolymapMap **out,
                                                 double *scale,
                                                 double *offset);

/**
 * # Safety
 * `map` must be null or a handle from this library, not yet freed.
 */
void polymap_map_free(struct PolymapMap *map);

/**
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum PolymapStatus polymap_map_degree(const struct PolymapMap *map, size_t *out);

/**
 * Fixed point `k` (0 is the origin).
 *
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum PolymapStatus polymap_map_fixed_point(const struct PolymapMap *map, size_t k, double *out);

/**
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum PolymapStatus polymap_map_eval(const struct PolymapMap *map, double x, double *out);

/**
 * Product distance function of fixed point `k`.
 *
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum PolymapStatus polymap_map_pdf(const struct PolymapMap *map, size_t k, double *out);

/**
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum PolymapStatus polymap_map_multiplier(const struct PolymapMap *map, size_t k, double *out);

/**
 * # Safety
 * `map` must be a live handle; `out` valid for writes.
 */
enum PolymapStatus polymap_map_classify(const struct PolymapMap *map,
                                        size_t k,
                                        double tol,
                                        enum PolymapStability *out);

/**
 * Named family. `arg` is `r` for harvest, `b(lambda)` for bmap, else may be null.
 *
 * # Safety
 * `name` must be a NUL-terminated string, `arg` null or one; `out` valid for writes.
 */
enum PolymapStatus polymap_family_preset(const char *name,
                                         const char *arg,
                                         struct PolymapFamily **out);

/**
 * Family from a JSON specification.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for writes.
 */
enum PolymapStatus polymap_family_from_json(const char *json, struct PolymapFamily **out);

/**
 * # Safety
 * `fam` must be null or a handle from this library, not yet freed.
 */
void polymap_family_free(struct PolymapFamily *fam);

/**
 * The canonical map of `fam` at `lambda`; free it with `polymap_map_free`.
 *
 * # Safety
 * `fam` must be a live handle; `out` valid for writes.
 */
enum PolymapStatus polymap_family_at(const struct PolymapFamily *fam,
                                     double lambda,
                                     struct PolymapMap **out);

/**
 * Tabulated band edge `k` for degree 2 or 3.
 *
 * # Safety
 * `value` must be valid for writes; `uncertainty` may be null.
 */
enum PolymapStatus polymap_band_value(size_t degree, size_t k, double *value, double *uncertainty);

/**
 * Bifurcation value `b_k` on the canonical slice of degree 2 or 3.
 *
 * # Safety
 * `value` and `half_width` must be valid for writes.
 */
enum PolymapStatus polymap_find_bifurcation(size_t degree,
                                            size_t k,
                                            double bisect_tol,
                                            double *value,
                                            double *half_width);

/**
 * Smallest period of `tail` within `rel_tol`; writes 0 when aperiodic.
 *
 * # Safety
 * `tail` must point to `n` doubles; `out` valid for writes.
 */
enum PolymapStatus polymap_detect_period(const double *tail,
                                         size_t n,
                                         double rel_tol,
                                         size_t p_max,
                                         size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYMAP_H */
