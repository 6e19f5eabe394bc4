#ifndef GI_FFI_H
#define GI_FFI_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum GiStatus {
  GI_STATUS_OK = 0,
  GI_STATUS_NULL_ARGUMENT = 1,
  GI_STATUS_INVALID_UTF8 = 2,
  GI_STATUS_PARSE = 3,
  GI_STATUS_INVALID_INPUT = 4,
  GI_STATUS_INFEASIBLE = 5,
  GI_STATUS_TIMEOUT = 6,
  GI_STATUS_BACKEND = 7,
  GI_STATUS_LIMIT = 8,
  GI_STATUS_IO = 9,
  GI_STATUS_INTERNAL = 10,
} GiStatus;

/**
 * Opaque instance handle.
 */
typedef struct GiInstance GiInstance;

/**
 * Opaque walk handle; vertices refer to the instance it was solved on.
 */
typedef struct GiWalk GiWalk;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next `gi_*` call on the same thread.
 */
const char *gi_last_error(void);

/**
 * Parses an instance from NUL-terminated text.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum GiStatus gi_instance_parse(const char *text, struct GiInstance **out);

/**
 * Generates a synthetic instance. `profile` is `crisp-like`, `drone-like`
 * or `uniform`.
 *
 * # Safety
 * `profile` must be a valid C string and `out` a valid pointer.
 */
enum GiStatus gi_instance_generate(const char *profile,
                                   size_t n,
                                   uint64_t seed,
                                   struct GiInstance **out);

/**
 * Serializes an instance; release the result with `gi_string_free`.
 *
 * # Safety
 * `inst` must come from this library and `out` be a valid pointer.
 */
enum GiStatus gi_instance_write(const struct GiInstance *inst, char **out);

/**
 * # Safety
 * `inst` must be NULL or come from this library, and not be used afterwards.
 */
void gi_instance_free(struct GiInstance *inst);

/**
 * Number of vertices, or 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or come from this library.
 */
size_t gi_instance_vertex_count(const struct GiInstance *inst);

/**
 * Size of the color universe, or 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or come from this library.
 */
size_t gi_instance_color_count(const struct GiInstance *inst);

/**
 * Optimal walk by dynamic programming. `quota` counts original colors
 * (start colors included); pass -1 for the instance's quota.
 *
 * # Safety
 * `inst` must come from this library and `out` be a valid pointer.
 */
enum GiStatus gi_solve_dp(const struct GiInstance *inst, int64_t quota, struct GiWalk **out);

/**
 * Optimal walk through the integer program solved by HiGHS. A
 * non-positive `time_limit` means no limit.
 *
 * # Safety
 * `inst` must come from this library and `out` be a valid pointer.
 */
enum GiStatus gi_solve_ilp(const struct GiInstance *inst,
                           int64_t quota,
                           double time_limit,
                           struct GiWalk **out);

/**
 * Steiner-tree walk, an upper bound within a factor of the quota.
 *
 * # Safety
 * `inst` must come from this library and `out` be a valid pointer.
 */
enum GiStatus gi_upper_bound_walk(const struct GiInstance *inst,
                                  int64_t quota,
                                  struct GiWalk **out);

/**
 * LP-relaxation lower bound on the optimal walk weight.
 *
 * # Safety
 * `inst` must come from this library and `out` be a valid pointer.
 */
enum GiStatus gi_lower_bound(const struct GiInstance *inst, int64_t quota, double *out);

/**
 * Runs the reduce, solve and merge pipeline with a TOML configuration
 * (NULL or empty for defaults) and returns the JSON report.
 *
 * # Safety
 * `inst` must come from this library, `config` be NULL or a valid C
 * string, and `out` a valid pointer.
 */
enum GiStatus gi_run_pipeline(const struct GiInstance *inst, const char *config, char **out);

/**
 * # Safety
 * `walk` must be NULL or come from this library, and not be used afterwards.
 */
void gi_walk_free(struct GiWalk *walk);

/**
 * Total edge weight, or NaN for NULL.
 *
 * # Safety
 * `walk` must be NULL or come from this library.
 */
double gi_walk_weight(const struct GiWalk *walk);

/**
 * Collected colors over all colors, start colors included; NaN for NULL.
 *
 * # Safety
 * `walk` must be NULL or come from this library.
 */
double gi_walk_coverage(const struct GiWalk *walk);

/**
 * Number of vertices in the closed sequence (edges + 1), or 0 for NULL.
 *
 * # Safety
 * `walk` must be NULL or come from this library.
 */
size_t gi_walk_len(const struct GiWalk *walk);

/**
 * Copies up to `cap` vertex ids into `buf` and returns the full length.
 *
 * # Safety
 * `walk` must be NULL or come from this library; `buf` must hold `cap`
 * elements unless `cap` is 0.
 */
size_t gi_walk_vertices(const struct GiWalk *walk, size_t *buf, size_t cap);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void gi_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GI_FFI_H */
