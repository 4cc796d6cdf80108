#ifndef FIELDNORM_H
#define FIELDNORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define FN_OK 0

/**
 * The aggregation guard refused to sum or average the scores.
 */
#define FN_REFUSED 2

/**
 * A null pointer, malformed string, or unknown name was passed.
 */
#define FN_INVALID_ARGUMENT 64

/**
 * The input data could not be parsed or the method is undefined on it.
 */
#define FN_DATA_ERROR 65

/**
 * A lookup key (such as a paper id) is not present.
 */
#define FN_NOT_FOUND 66

/**
 * An internal error was caught at the boundary.
 */
#define FN_PANIC 70

/**
 * Linearity class of a score set.
 */
#define FN_LINEAR 0

#define FN_NONLINEAR 1

#define FN_OUTSIDE_CATEGORY 2

/**
 * Aggregation statistics.
 */
#define FN_STAT_SUM 0

#define FN_STAT_MEAN 1

/**
 * Opaque paper corpus.
 */
typedef struct FnCorpus FnCorpus;

/**
 * Opaque set of normalized scores.
 */
typedef struct FnScoreSet FnScoreSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a corpus from CSV text with header
 * `paper_id,field_id,pub_year,doc_type,citations`.
 *
 * `cell_mode` is `field`, `field-year` or `field-year-doctype`; null
 * selects `field-year-doctype`.
 *
 * # Safety
 * `csv_text` must be a NUL-terminated string, `cell_mode` null or a
 * NUL-terminated string, and `out` a valid pointer.
 */
int fn_corpus_from_csv(const char *csv_text, const char *cell_mode, struct FnCorpus **out);

/**
 * Builds the 52-paper worked-example corpus.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int fn_corpus_table1(struct FnCorpus **out);

/**
 * Number of papers in the corpus; 0 for a null handle.
 *
 * # Safety
 * `corpus` must be null or a handle from this library.
 */
uintptr_t fn_corpus_len(const struct FnCorpus *corpus);

/**
 * Releases a corpus. Null is ignored.
 *
 * # Safety
 * `corpus` must be null or a handle from this library not yet freed.
 */
void fn_corpus_free(struct FnCorpus *corpus);

/**
 * Normalizes a corpus with the named method (`mean`, `percentile-cp-in`,
 * `reverse-engineering`, ...). Exchange-rate methods use `n_intervals`
 * quantile intervals and the rate band `[pi_m, pi_max]`; the three are
 * ignored by other methods.
 *
 * # Safety
 * `corpus` must be a handle from this library, `method` a NUL-terminated
 * string and `out` a valid pointer.
 */
int fn_normalize(const struct FnCorpus *corpus,
                 const char *method,
                 uintptr_t n_intervals,
                 uintptr_t pi_m,
                 uintptr_t pi_max,
                 struct FnScoreSet **out);

/**
 * Number of scored papers; 0 for a null handle.
 *
 * # Safety
 * `scores` must be null or a handle from this library.
 */
uintptr_t fn_scores_len(const struct FnScoreSet *scores);

/**
 * Looks up the score of one paper.
 *
 * # Safety
 * `scores` must be a handle from this library, `paper_id` a NUL-terminated
 * string and `out` a valid pointer.
 */
int fn_scores_get(const struct FnScoreSet *scores, const char *paper_id, double *out);

/**
 * Linearity class of the method that produced the scores (`FN_LINEAR`,
 * `FN_NONLINEAR` or `FN_OUTSIDE_CATEGORY`); -1 for a null handle.
 *
 * # Safety
 * `scores` must be null or a handle from this library.
 */
int fn_scores_linearity(const struct FnScoreSet *scores);

/**
 * Sums (`FN_STAT_SUM`) or averages (`FN_STAT_MEAN`) the scores of a group
 * of papers. Returns `FN_REFUSED` when the scores are not additive.
 *
 * # Safety
 * `scores` must be a handle from this library, `paper_ids` point to
 * `n_ids` NUL-terminated strings, and `out` be a valid pointer.
 */
int fn_scores_aggregate(const struct FnScoreSet *scores,
                        const char *const *paper_ids,
                        uintptr_t n_ids,
                        int statistic,
                        double *out);

/**
 * Releases a score set. Null is ignored.
 *
 * # Safety
 * `scores` must be null or a handle from this library not yet freed.
 */
void fn_scores_free(struct FnScoreSet *scores);

/**
 * Tests whether the points `(x[i], y[i])` lie on a line, within
 * `tolerance · (1 + max|y|)`. Writes 1 (equidistant) or 0 to
 * `is_equidistant`.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles and `is_equidistant` be valid.
 */
int fn_check_equidistance(const double *x,
                          const double *y,
                          uintptr_t n,
                          double tolerance,
                          int *is_equidistant);

/**
 * Copies the last error message of the calling thread into `buf`
 * (truncated, always NUL-terminated when `len > 0`) and returns the full
 * message length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
uintptr_t fn_last_error_message(char *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FIELDNORM_H */
