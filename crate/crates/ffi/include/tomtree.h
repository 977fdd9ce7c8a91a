#ifndef TOMTREE_H
#define TOMTREE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result of every fallible call.
 */
typedef enum TtStatus {
  TT_OK = 0,
  TT_NULL_POINTER = 1,
  TT_INVALID_ARGUMENT = 2,
  TT_INVALID_TREE = 3,
  TT_INVALID_CONTOUR = 4,
  TT_AMBIGUOUS = 5,
  TT_OUT_OF_RANGE = 6,
  TT_PARSE = 7,
  TT_IO = 8,
  TT_SIMULATION = 9,
  TT_OTHER = 10,
  TT_PANIC = 11,
} TtStatus;

/*
 Opaque contour.
 */
typedef struct TtContour TtContour;

/*
 Opaque chronological tree.
 */
typedef struct TtTree TtTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or NULL. Owned by the
 library; valid until the next call on this thread.
 */
const char *tt_last_error(void);

/*
 Library version as a static string.
 */
const char *tt_version(void);

/*
 # Safety
 `s` must come from this library, or be NULL.
 */
void tt_string_free(char *s);

/*
 Parses a tree from JSON Lines text.

 # Safety
 `text` must be a nul-terminated string; `out` a writable pointer.
 */
enum TtStatus tt_tree_from_jsonl(const char *text, struct TtTree **out);

/*
 Canonical JSON Lines text of a tree; free with `tt_string_free`.

 # Safety
 `tree` must be a live handle; `out` a writable pointer.
 */
enum TtStatus tt_tree_to_jsonl(const struct TtTree *tree, char **out);

/*
 # Safety
 `tree` must come from this library, or be NULL.
 */
void tt_tree_free(struct TtTree *tree);

/*
 Number of individuals; 0 for NULL.

 # Safety
 `tree` must be a live handle or NULL.
 */
uintptr_t tt_tree_len(const struct TtTree *tree);

/*
 # Safety
 `tree` must be a live handle; `out` writable.
 */
enum TtStatus tt_tree_total_measure(const struct TtTree *tree, double *out);

/*
 Number of individuals alive at height `h`.

 # Safety
 `tree` must be a live handle; `out` writable.
 */
enum TtStatus tt_tree_alive_count(const struct TtTree *tree, double h, uintptr_t *out);

/*
 The tree restricted to heights at most `r`, as a new handle.

 # Safety
 `tree` must be a live handle; `out` writable.
 */
enum TtStatus tt_tree_truncate(const struct TtTree *tree, double r, struct TtTree **out);

/*
 Simulates a splitting tree with births at `birth_rate` and lifetimes
 drawn from `lifetime` (e.g. "exp:2"), cut at `truncation` when positive.

 # Safety
 `lifetime` must be a nul-terminated string; `out` writable.
 */
enum TtStatus tt_simulate_splitting(double birth_rate,
                                    const char *lifetime,
                                    double truncation,
                                    uint64_t seed,
                                    struct TtTree **out);

/*
 # Safety
 `tree` must be a live handle; `out` writable.
 */
enum TtStatus tt_encode(const struct TtTree *tree, struct TtContour **out);

/*
 # Safety
 `c` must be a live handle; `out` writable.
 */
enum TtStatus tt_decode(const struct TtContour *c, struct TtTree **out);

/*
 Parses a contour from `kind,a,b` CSV text, canonicalizing it.

 # Safety
 `text` must be a nul-terminated string; `out` writable.
 */
enum TtStatus tt_contour_from_csv(const char *text, struct TtContour **out);

/*
 # Safety
 `c` must be a live handle; `out` writable.
 */
enum TtStatus tt_contour_to_csv(const struct TtContour *c, char **out);

/*
 # Safety
 `c` must come from this library, or be NULL.
 */
void tt_contour_free(struct TtContour *c);

/*
 # Safety
 `c` must be a live handle; `out` writable.
 */
enum TtStatus tt_contour_duration(const struct TtContour *c, double *out);

/*
 Value at time `t` (right-continuous).

 # Safety
 `c` must be a live handle; `out` writable.
 */
enum TtStatus tt_contour_eval(const struct TtContour *c, double t, double *out);

/*
 The contour with the stretches above `r` excised, as a new handle.

 # Safety
 `c` must be a live handle; `out` writable.
 */
enum TtStatus tt_time_change(const struct TtContour *c, double r, struct TtContour **out);

/*
 Distance between the trees coded by two contours.

 # Safety
 `a`, `b` must be live handles; `out` writable.
 */
enum TtStatus tt_contour_distance(const struct TtContour *a,
                                  const struct TtContour *b,
                                  double *out);

/*
 Non-zero when the two contours are identical.

 # Safety
 `a`, `b` must be live handles or NULL.
 */
int32_t tt_contour_equal(const struct TtContour *a, const struct TtContour *b);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOMTREE_H */
