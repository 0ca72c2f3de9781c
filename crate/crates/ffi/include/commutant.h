#ifndef COMMUTANT_H
#define COMMUTANT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CommutantStatus {
  COMMUTANT_STATUS_OK = 0,
  COMMUTANT_STATUS_NULL_POINTER = 1,
  COMMUTANT_STATUS_INVALID_ARGUMENT = 2,
  COMMUTANT_STATUS_BUDGET = 3,
  COMMUTANT_STATUS_SINGULAR = 4,
  COMMUTANT_STATUS_OVERFLOW = 5,
  COMMUTANT_STATUS_CONSISTENCY = 6,
  COMMUTANT_STATUS_BUFFER_TOO_SMALL = 7,
  COMMUTANT_STATUS_PANIC = 8,
} CommutantStatus;

/**
 * Square matrix over a prime field.
 */
typedef struct CommutantMatrix CommutantMatrix;

/**
 * An unsigned 128-bit count split into halves.
 */
typedef struct CommutantU128 {
  uint64_t lo;
  uint64_t hi;
} CommutantU128;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next call on the same thread.
 */
const char *commutant_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *commutant_version(void);

/**
 * Builds an `n×n` matrix over `F_p` from `n*n` row-major integers.
 *
 * # Safety
 * `entries` must point to `n*n` readable values and `out` must be writable.
 */
enum CommutantStatus commutant_matrix_new(uint32_t p,
                                          size_t n,
                                          const int64_t *entries,
                                          struct CommutantMatrix **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `m` must come from `commutant_matrix_new` and not be used afterwards.
 */
void commutant_matrix_free(struct CommutantMatrix *m);

/**
 * Side length of the matrix.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum CommutantStatus commutant_matrix_size(const struct CommutantMatrix *m, size_t *out);

/**
 * Entry `(i, j)` (zero-based) as a residue in `[0, p)`.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum CommutantStatus commutant_matrix_get(const struct CommutantMatrix *m,
                                          size_t i,
                                          size_t j,
                                          uint32_t *out);

/**
 * `#{(U,V) : UV - VU = M}`. A `budget` of 0 selects the default limit.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum CommutantStatus commutant_fibre_count(const struct CommutantMatrix *m,
                                           uint64_t budget,
                                           struct CommutantU128 *out);

/**
 * `#{(U,V) : UV = VU}` in `M_n(F_p)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CommutantStatus commutant_commuting_count(size_t n,
                                               uint32_t p,
                                               uint64_t budget,
                                               struct CommutantU128 *out);

/**
 * `N(T)`: integer pairs with entries in `[-T, T]` that commute.
 *
 * # Safety
 * `out` must be writable.
 */
enum CommutantStatus commutant_count_n(size_t n,
                                       int64_t t,
                                       uint64_t budget,
                                       struct CommutantU128 *out);

/**
 * `S(A,B;p)` as the counts `c_0, ..., c_{p-1}` with `S = Σ c_k ζ_p^k` and
 * `c_0 = 0`, plus `|S|`. `counts` must hold `p` values.
 *
 * # Safety
 * `a`, `b` must be live handles; `counts` must point to `counts_len`
 * writable values and `magnitude` must be writable.
 */
enum CommutantStatus commutant_exp_sum(const struct CommutantMatrix *a,
                                       const struct CommutantMatrix *b,
                                       uint64_t budget,
                                       int64_t *counts,
                                       size_t counts_len,
                                       double *magnitude);

/**
 * `D - L + L²/(N - D + L)` with `L = twice_l / 2`, as a reduced fraction.
 *
 * # Safety
 * `numer` and `denom` must be writable.
 */
enum CommutantStatus commutant_exponent_general(int64_t big_n,
                                                int64_t d,
                                                int64_t twice_l,
                                                int64_t *numer,
                                                int64_t *denom);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMMUTANT_H */
