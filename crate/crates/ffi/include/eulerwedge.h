#ifndef EULERWEDGE_H
#define EULERWEDGE_H

/* Generated by cbindgen; edit the Rust sources instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EwStatus {
  EW_STATUS_OK = 0,
  /**
   * The axiom suite ran and at least one check failed.
   */
  EW_STATUS_AXIOM_FAILURE = 1,
  EW_STATUS_INVALID_ARGUMENT = 2,
  EW_STATUS_NULL_POINTER = 3,
  EW_STATUS_COMPUTATION_FAILED = 4,
  EW_STATUS_PANIC = 5,
} EwStatus;

/**
 * An irreducible root system.
 */
typedef struct EwRootSystem EwRootSystem;

/**
 * A standard subspace together with its modular data.
 */
typedef struct EwStandardSubspace EwStandardSubspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *ew_last_error(void);

/**
 * Library version as a static string.
 */
const char *ew_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed already.
 */
void ew_string_free(char *s);

/**
 * Builds the root system of `family` ("A", "D", "E8", ...) with the given rank.
 *
 * # Safety
 * `family` must be a nul-terminated string and `out` writable.
 */
enum EwStatus ew_root_system_new(const char *family, size_t rank, struct EwRootSystem **out);

/**
 * # Safety
 * `rs` must come from [`ew_root_system_new`] or be null.
 */
void ew_root_system_free(struct EwRootSystem *rs);

/**
 * Number of roots (positive and negative).
 *
 * # Safety
 * `rs` must be a live handle and `out` writable.
 */
enum EwStatus ew_root_system_root_count(const struct EwRootSystem *rs, size_t *out);

/**
 * Bit `j-1` is set when the coweight `h_j` is an Euler element; `symmetric` likewise for
 * symmetric ones. Either output may be null.
 *
 * # Safety
 * `rs` must be a live handle; non-null outputs must be writable.
 */
enum EwStatus ew_root_system_euler_mask(const struct EwRootSystem *rs,
                                        uint64_t *euler,
                                        uint64_t *symmetric);

/**
 * Classification report of one root system as a JSON envelope.
 *
 * # Safety
 * `family` must be a nul-terminated string and `out` writable.
 */
enum EwStatus ew_classify_json(const char *family, size_t rank, char **out);

/**
 * Classification of every family with rank at most 8.
 *
 * # Safety
 * `out` must be writable.
 */
enum EwStatus ew_classify_all_json(char **out);

/**
 * Grading dimensions of `algebra` ("sl", "so", "sp") with `params` sizes and Euler
 * element `which` ("h2", "hn", ...).
 *
 * # Safety
 * Strings must be nul-terminated, `params` must point to `nparams` values, `out` writable.
 */
enum EwStatus ew_grading_json(const char *algebra,
                              const size_t *params,
                              size_t nparams,
                              const char *which,
                              char **out);

/**
 * Wedge orbits for the `cover`-fold Moebius cover; 0 selects the universal cover.
 *
 * # Safety
 * `out` must be writable.
 */
enum EwStatus ew_orbits_json(uint64_t cover, char **out);

/**
 * Runs the BGL axiom suite on a model ("mobius", "affine", "orthogonal", "poincare-mock",
 * "trivial"). `cover` only matters for "mobius". Returns `AxiomFailure` with the report
 * still written when a check fails.
 *
 * # Safety
 * `model` must be nul-terminated and `out` writable.
 */
enum EwStatus ew_bgl_demo_json(const char *model,
                               size_t dim,
                               uint64_t cover,
                               uint64_t seed,
                               bool perturb,
                               char **out);

/**
 * Draws a random standard subspace of C^n and computes its modular data.
 *
 * # Safety
 * `out` must be writable.
 */
enum EwStatus ew_standard_subspace_random(size_t n, uint64_t seed, struct EwStandardSubspace **out);

/**
 * # Safety
 * `h` must come from this library or be null.
 */
void ew_standard_subspace_free(struct EwStandardSubspace *h);

/**
 * Complex dimension of the ambient space.
 *
 * # Safety
 * `h` must be a live handle.
 */
size_t ew_standard_subspace_dim(const struct EwStandardSubspace *h);

/**
 * Eigenvalues of the modular operator in ascending order. `out` must hold `dim` values.
 *
 * # Safety
 * `h` must be a live handle and `out` must have room for `dim` doubles.
 */
enum EwStatus ew_standard_subspace_modular_spectrum(const struct EwStandardSubspace *h,
                                                    double *out);

/**
 * Distance between the subspace and the one rebuilt from its modular data.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum EwStatus ew_standard_subspace_roundtrip(const struct EwStandardSubspace *h, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EULERWEDGE_H */
