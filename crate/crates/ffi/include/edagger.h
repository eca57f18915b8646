#ifndef EDAGGER_H
#define EDAGGER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EdStatus {
  ED_STATUS_OK = 0,
  ED_STATUS_NULL_POINTER = 1,
  ED_STATUS_INVALID_INPUT = 2,
  ED_STATUS_DEGENERATE_CURVE = 3,
  ED_STATUS_NEAR_POLE = 4,
  ED_STATUS_NUMERICAL_FAILURE = 5,
  ED_STATUS_DIMENSION_BOUND = 6,
  ED_STATUS_PANIC = 7,
} EdStatus;

typedef enum EdModel {
  ED_MODEL_EDAGGER = 0,
  ED_MODEL_P1 = 1,
} EdModel;

// Opaque period lattice.
typedef struct EdLattice EdLattice;

typedef struct EdComplex {
  double re;
  double im;
} EdComplex;

typedef struct EdPeriods {
  struct EdComplex omega1;
  struct EdComplex omega2;
  struct EdComplex eta1;
  struct EdComplex eta2;
  struct EdComplex tau;
} EdPeriods;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into this library on the same
// thread.
const char *ed_last_error(void);

// Lattice of `y² = 4x³ − ax − b`, with `a`, `b` given as rationals `"p/q"`.
//
// # Safety
// `a` and `b` must be NUL-terminated strings; `out` must be writable.
enum EdStatus ed_lattice_new(const char *a, const char *b, double tol, struct EdLattice **out);

// Lattice spanned by `w1`, `w2`.
//
// # Safety
// `out` must be writable.
enum EdStatus ed_lattice_from_basis(struct EdComplex w1,
                                    struct EdComplex w2,
                                    struct EdLattice **out);

// # Safety
// `l` must be null or a handle from this library not yet freed.
void ed_lattice_free(struct EdLattice *l);

// # Safety
// `l` must be a live handle; `out` must be writable.
enum EdStatus ed_lattice_periods(const struct EdLattice *l, struct EdPeriods *out);

// `℘(z)` and `℘′(z)`.
//
// # Safety
// `l` must be a live handle; `wp` and `wp_prime` must be writable.
enum EdStatus ed_wp(const struct EdLattice *l,
                    struct EdComplex z,
                    struct EdComplex *wp,
                    struct EdComplex *wp_prime);

// # Safety
// `l` must be a live handle; `out` must be writable.
enum EdStatus ed_zeta(const struct EdLattice *l, struct EdComplex z, struct EdComplex *out);

// # Safety
// `l` must be a live handle; `out` must be writable.
enum EdStatus ed_sigma(const struct EdLattice *l, struct EdComplex z, struct EdComplex *out);

// `f⁽⁰⁾(z, s), …, f⁽ⁿ⁾(z, s)` into `out[0..=n]`.
//
// # Safety
// `l` must be a live handle; `out` must have room for `n + 1` values.
enum EdStatus ed_forms_f(const struct EdLattice *l,
                         size_t n,
                         struct EdComplex z,
                         struct EdComplex s,
                         struct EdComplex *out);

// `ζ(k₁, …, k_d)` by series, and the iterated integral of its word (equal
// to `(−1)^d` times the series value).
//
// # Safety
// `k` must point to `depth` entries; `series` and `integral` must be
// writable (either may be null to skip it).
enum EdStatus ed_mzv(const uint32_t *k,
                     size_t depth,
                     double tol,
                     double *series,
                     struct EdComplex *integral);

// Dimension of the closed degree-zero bar elements of length `≤ ell` for
// the given model (`truncation` is ignored for `P1`).
//
// # Safety
// `out` must be writable.
enum EdStatus ed_bar_kernel_dimension(enum EdModel model,
                                      size_t truncation,
                                      size_t ell,
                                      size_t *out);

// Iterated integral of the word `letters[0..len]` (basis indices: `0` is
// `ν`, `i ≥ 1` is `ω⁽ⁱ⁻¹⁾`; for `P1`, `0` and `1`) along a path given as
// JSON. `l` may be null for `P1` paths.
//
// # Safety
// `path_json` must be a NUL-terminated string, `letters` must point to `len`
// entries and `out` must be writable.
enum EdStatus ed_integrate(const struct EdLattice *l,
                           const char *path_json,
                           const size_t *letters,
                           size_t len,
                           double tol,
                           struct EdComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EDAGGER_H */
