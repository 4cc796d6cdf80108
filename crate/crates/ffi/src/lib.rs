//! C ABI for `fieldnorm`.
//!
//! Corpora and score sets are opaque handles created by this library and
//! released with the matching `*_free` function. Every fallible function
//! returns a status code (`FN_OK` on success) and writes its result through
//! an out-pointer. On failure, `fn_last_error_message` returns a description
//! of the most recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use fieldnorm::corpus::{parse_corpus, table1_fixture, CellMode, Corpus};
use fieldnorm::linearity::{check_equidistance, guarded_aggregate, Statistic};
use fieldnorm::normalizers::{normalize_corpus, ExchangeRateMode, ExchangeRateParams, Linearity, Method, ScoreSet};
use fieldnorm::Error;

/// Success.
pub const FN_OK: c_int = 0;
/// The aggregation guard refused to sum or average the scores.
pub const FN_REFUSED: c_int = 2;
/// A null pointer, malformed string, or unknown name was passed.
pub const FN_INVALID_ARGUMENT: c_int = 64;
/// The input data could not be parsed or the method is undefined on it.
pub const FN_DATA_ERROR: c_int = 65;
/// A lookup key (such as a paper id) is not present.
pub const FN_NOT_FOUND: c_int = 66;
/// An internal error was caught at the boundary.
pub const FN_PANIC: c_int = 70;

/// Linearity class of a score set.
pub const FN_LINEAR: c_int = 0;
pub const FN_NONLINEAR: c_int = 1;
pub const FN_OUTSIDE_CATEGORY: c_int = 2;

/// Aggregation statistics.
pub const FN_STAT_SUM: c_int = 0;
pub const FN_STAT_MEAN: c_int = 1;

/// Opaque paper corpus.
pub struct FnCorpus {
    inner: Corpus,
}

/// Opaque set of normalized scores.
pub struct FnScoreSet {
    inner: ScoreSet,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message.into());
}

fn status_of(error: &Error) -> c_int {
    match error {
        Error::Refused { .. } => FN_REFUSED,
        Error::InvalidParameter(_) => FN_INVALID_ARGUMENT,
        Error::UnknownPaper(_) | Error::UnknownCell(_) => FN_NOT_FOUND,
        _ => FN_DATA_ERROR,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard<F>(body: F) -> c_int
where
    F: FnOnce() -> Result<(), (c_int, String)>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FN_OK,
        Ok(Err((code, message))) => {
            set_error(message);
            code
        }
        Err(_) => {
            set_error("internal error");
            FN_PANIC
        }
    }
}

fn fail(error: Error) -> (c_int, String) {
    (status_of(&error), error.to_string())
}

fn invalid(message: &str) -> (c_int, String) {
    (FN_INVALID_ARGUMENT, message.to_owned())
}

/// # Safety
/// `ptr` must be null or point to a NUL-terminated string.
unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, (c_int, String)> {
    if ptr.is_null() {
        return Err(invalid(&format!("{name} is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| invalid(&format!("{name} is not valid UTF-8")))
}

/// Parses a corpus from CSV text with header
/// `paper_id,field_id,pub_year,doc_type,citations`.
///
/// `cell_mode` is `field`, `field-year` or `field-year-doctype`; null
/// selects `field-year-doctype`.
///
/// # Safety
/// `csv_text` must be a NUL-terminated string, `cell_mode` null or a
/// NUL-terminated string, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fn_corpus_from_csv(
    csv_text: *const c_char,
    cell_mode: *const c_char,
    out: *mut *mut FnCorpus,
) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let text = str_arg(csv_text, "csv_text")?;
        let mode = if cell_mode.is_null() {
            CellMode::default()
        } else {
            str_arg(cell_mode, "cell_mode")?.parse().map_err(fail)?
        };
        let corpus = parse_corpus(text.as_bytes(), mode).map_err(fail)?;
        *out = Box::into_raw(Box::new(FnCorpus { inner: corpus }));
        Ok(())
    })
}

/// Builds the 52-paper worked-example corpus.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fn_corpus_table1(out: *mut *mut FnCorpus) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        *out = Box::into_raw(Box::new(FnCorpus { inner: table1_fixture() }));
        Ok(())
    })
}

/// Number of papers in the corpus; 0 for a null handle.
///
/// # Safety
/// `corpus` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fn_corpus_len(corpus: *const FnCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.len())
}

/// Releases a corpus. Null is ignored.
///
/// # Safety
/// `corpus` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fn_corpus_free(corpus: *mut FnCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Normalizes a corpus with the named method (`mean`, `percentile-cp-in`,
/// `reverse-engineering`, ...). Exchange-rate methods use `n_intervals`
/// quantile intervals and the rate band `[pi_m, pi_max]`; the three are
/// ignored by other methods.
///
/// # Safety
/// `corpus` must be a handle from this library, `method` a NUL-terminated
/// string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fn_normalize(
    corpus: *const FnCorpus,
    method: *const c_char,
    n_intervals: usize,
    pi_m: usize,
    pi_max: usize,
    out: *mut *mut FnScoreSet,
) -> c_int {
    guard(|| {
        let corpus = corpus.as_ref().ok_or_else(|| invalid("corpus is null"))?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let method: Method = str_arg(method, "method")?.parse().map_err(fail)?;
        let exchange = ExchangeRateParams { mode: ExchangeRateMode::Redefined, n_intervals, pi_m, pi_max };
        let set = normalize_corpus(&corpus.inner, method, &exchange).map_err(fail)?;
        *out = Box::into_raw(Box::new(FnScoreSet { inner: set }));
        Ok(())
    })
}

/// Number of scored papers; 0 for a null handle.
///
/// # Safety
/// `scores` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fn_scores_len(scores: *const FnScoreSet) -> usize {
    scores.as_ref().map_or(0, |s| s.inner.len())
}

/// Looks up the score of one paper.
///
/// # Safety
/// `scores` must be a handle from this library, `paper_id` a NUL-terminated
/// string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fn_scores_get(scores: *const FnScoreSet, paper_id: *const c_char, out: *mut f64) -> c_int {
    guard(|| {
        let scores = scores.as_ref().ok_or_else(|| invalid("scores is null"))?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let id = str_arg(paper_id, "paper_id")?;
        *out = scores.inner.get(id).ok_or_else(|| fail(Error::UnknownPaper(id.to_owned())))?;
        Ok(())
    })
}

/// Linearity class of the method that produced the scores (`FN_LINEAR`,
/// `FN_NONLINEAR` or `FN_OUTSIDE_CATEGORY`); -1 for a null handle.
///
/// # Safety
/// `scores` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn fn_scores_linearity(scores: *const FnScoreSet) -> c_int {
    match scores.as_ref().map(|s| s.inner.linearity()) {
        Some(Linearity::Linear) => FN_LINEAR,
        Some(Linearity::Nonlinear) => FN_NONLINEAR,
        Some(Linearity::OutsideCategory) => FN_OUTSIDE_CATEGORY,
        None => -1,
    }
}

/// Sums (`FN_STAT_SUM`) or averages (`FN_STAT_MEAN`) the scores of a group
/// of papers. Returns `FN_REFUSED` when the scores are not additive.
///
/// # Safety
/// `scores` must be a handle from this library, `paper_ids` point to
/// `n_ids` NUL-terminated strings, and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fn_scores_aggregate(
    scores: *const FnScoreSet,
    paper_ids: *const *const c_char,
    n_ids: usize,
    statistic: c_int,
    out: *mut f64,
) -> c_int {
    guard(|| {
        let scores = scores.as_ref().ok_or_else(|| invalid("scores is null"))?;
        if out.is_null() || (paper_ids.is_null() && n_ids > 0) {
            return Err(invalid("null pointer argument"));
        }
        let statistic = match statistic {
            FN_STAT_SUM => Statistic::Sum,
            FN_STAT_MEAN => Statistic::Mean,
            other => return Err(invalid(&format!("unknown statistic {other}"))),
        };
        let ptrs = if n_ids == 0 { &[][..] } else { slice::from_raw_parts(paper_ids, n_ids) };
        let ids = ptrs.iter().map(|&p| str_arg(p, "paper id")).collect::<Result<Vec<_>, _>>()?;
        *out = guarded_aggregate(&scores.inner, &ids, statistic).map_err(fail)?.value;
        Ok(())
    })
}

/// Releases a score set. Null is ignored.
///
/// # Safety
/// `scores` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fn_scores_free(scores: *mut FnScoreSet) {
    if !scores.is_null() {
        drop(Box::from_raw(scores));
    }
}

/// Tests whether the points `(x[i], y[i])` lie on a line, within
/// `tolerance · (1 + max|y|)`. Writes 1 (equidistant) or 0 to
/// `is_equidistant`.
///
/// # Safety
/// `x` and `y` must point to `n` doubles and `is_equidistant` be valid.
#[no_mangle]
pub unsafe extern "C" fn fn_check_equidistance(
    x: *const f64,
    y: *const f64,
    n: usize,
    tolerance: f64,
    is_equidistant: *mut c_int,
) -> c_int {
    guard(|| {
        if x.is_null() || y.is_null() || is_equidistant.is_null() {
            return Err(invalid("null pointer argument"));
        }
        let (x, y) = (slice::from_raw_parts(x, n), slice::from_raw_parts(y, n));
        let pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
        let verdict = check_equidistance(&pairs, tolerance).map_err(fail)?;
        *is_equidistant = c_int::from(verdict.is_equidistant);
        Ok(())
    })
}

/// Copies the last error message of the calling thread into `buf`
/// (truncated, always NUL-terminated when `len > 0`) and returns the full
/// message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn fn_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let message = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = message.len().min(len - 1);
            ptr::copy_nonoverlapping(message.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        message.len()
    })
}
