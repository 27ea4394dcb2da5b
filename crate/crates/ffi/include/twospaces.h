#ifndef TWOSPACES_H
#define TWOSPACES_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  /**
   * The call succeeded and the answer is "no".
   */
  TS_STATUS_FALSE = 1,
  TS_STATUS_INVALID_ARGUMENT = 2,
  TS_STATUS_BUDGET_EXHAUSTED = 3,
  TS_STATUS_ORACLE_FAILURE = 4,
  TS_STATUS_PANIC = 5,
} TsStatus;

typedef struct TsGroup TsGroup;

typedef struct TsLattice TsLattice;

typedef struct TsMarked TsMarked;

typedef struct TsWord TsWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *ts_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ts_string_free(char *s);

/**
 * # Safety
 * `text` must be a nul-terminated string; `out` must be writable.
 */
enum TsStatus ts_word_parse(const char *text, struct TsWord **out);

/**
 * The `k`-th word of the canonical enumeration.
 *
 * # Safety
 * `out` must be writable.
 */
enum TsStatus ts_word_enumerate(uint64_t k, struct TsWord **out);

/**
 * # Safety
 * `w` must be a live word handle; `out` must be writable.
 */
enum TsStatus ts_word_index(const struct TsWord *w, uint64_t *out);

/**
 * # Safety
 * `a`, `b` must be live word handles; `out` must be writable.
 */
enum TsStatus ts_word_mul(const struct TsWord *a, const struct TsWord *b, struct TsWord **out);

/**
 * # Safety
 * `w` must be a live word handle; `out` must be writable.
 */
enum TsStatus ts_word_inverse(const struct TsWord *w, struct TsWord **out);

/**
 * Text form of a word; release with [`ts_string_free`]. NULL on a null handle.
 *
 * # Safety
 * `w` must be a live word handle or NULL.
 */
char *ts_word_to_string(const struct TsWord *w);

/**
 * # Safety
 * `w` must come from this library and not have been freed.
 */
void ts_word_free(struct TsWord *w);

/**
 * A named group such as `Z^2` or `Prod(Cyclic(2),Z)`.
 *
 * # Safety
 * `spec` must be a nul-terminated string; `out` must be writable.
 */
enum TsStatus ts_group_named(const char *spec, struct TsGroup **out);

/**
 * # Safety
 * `g` must be a live group handle; `out` must be writable.
 */
enum TsStatus ts_group_mul(const struct TsGroup *g, uint64_t a, uint64_t b, uint64_t *out);

/**
 * # Safety
 * `g` must be a live group handle; `out` must be writable.
 */
enum TsStatus ts_group_identity(const struct TsGroup *g, uint64_t *out);

/**
 * # Safety
 * `g` must come from this library and not have been freed.
 */
void ts_group_free(struct TsGroup *g);

/**
 * Kernel of the marking described by `assignment` (e.g. `0,1;pair-row(2)`).
 *
 * # Safety
 * `g` must be a live group handle; `assignment` a nul-terminated string;
 * `out` writable.
 */
enum TsStatus ts_marked_kernel(const struct TsGroup *g,
                               const char *assignment,
                               struct TsMarked **out);

/**
 * `Φ(G)`.
 *
 * # Safety
 * `g` must be a live group handle; `out` writable.
 */
enum TsStatus ts_marked_phi(const struct TsGroup *g, struct TsMarked **out);

/**
 * `ker σ_G`.
 *
 * # Safety
 * `g` must be a live group handle; `out` writable.
 */
enum TsStatus ts_marked_sigma(const struct TsGroup *g, struct TsMarked **out);

/**
 * `Ψ(L)`.
 *
 * # Safety
 * `l` must be a live lattice handle; `out` writable.
 */
enum TsStatus ts_marked_psi(const struct TsLattice *l, struct TsMarked **out);

/**
 * `Ok` if `w ∈ N`, `False` if not.
 *
 * # Safety
 * `n` and `w` must be live handles.
 */
enum TsStatus ts_marked_contains(const struct TsMarked *n, const struct TsWord *w);

/**
 * `f(N)(a, b)` with at most `budget` generator probes.
 *
 * # Safety
 * `n` must be a live handle; `out` writable.
 */
enum TsStatus ts_f_mul(const struct TsMarked *n,
                       uint64_t a,
                       uint64_t b,
                       uint64_t budget,
                       uint64_t *out);

/**
 * `Ok` for true, `False` for false, `BudgetExhausted` for unknown.
 *
 * # Safety
 * `n` must be a live handle.
 */
enum TsStatus ts_dm_check(const struct TsMarked *n, uint64_t m, uint64_t budget);

/**
 * # Safety
 * `n` must come from this library and not have been freed.
 */
void ts_marked_free(struct TsMarked *n);

/**
 * Row span of a row-major `rows × ambient` matrix.
 *
 * # Safety
 * `entries` must point to `rows * ambient` readable values (or be NULL when
 * that product is 0); `out` writable.
 */
enum TsStatus ts_lattice_from_rows(size_t ambient,
                                   const int64_t *entries,
                                   size_t rows,
                                   struct TsLattice **out);

/**
 * `Ok` if the vector lies in the lattice, `False` otherwise.
 *
 * # Safety
 * `l` must be live; `v` must point to `len` readable values (or be NULL when
 * `len` is 0).
 */
enum TsStatus ts_lattice_contains(const struct TsLattice *l, const int64_t *v, size_t len);

/**
 * Invariants of `ℤⁿ / L` as text, e.g. `rank 1 torsion (2)`; release with
 * [`ts_string_free`].
 *
 * # Safety
 * `l` must be a live lattice handle or NULL.
 */
char *ts_lattice_invariants(const struct TsLattice *l);

/**
 * # Safety
 * `l` must come from this library and not have been freed.
 */
void ts_lattice_free(struct TsLattice *l);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TWOSPACES_H */
