//! C ABI over `tomtree`.
//!
//! Objects cross the boundary as opaque handles created by `tt_*` constructors
//! and released with the matching `*_free`. Every fallible call returns a
//! [`TtStatus`]; on failure `tt_last_error` describes the cause until the next
//! call on the same thread. Strings handed out must be freed with
//! `tt_string_free`. Panics are caught and reported as `TT_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tomtree::contour::{self, PljContour};
use tomtree::io;
use tomtree::levy::{simulate_splitting_tree, JumpLaw, SplittingParams};
use tomtree::{ChronoTree, Error};

/// Result of every fallible call.
#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TtStatus {
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
}

/// Opaque chronological tree.
pub struct TtTree(ChronoTree);

/// Opaque contour.
pub struct TtContour(PljContour);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TtStatus {
    match e {
        Error::InvalidTree(_) | Error::InvalidPoint(_) | Error::Degenerate(_) => TtStatus::TT_INVALID_TREE,
        Error::InvalidContour(_) => TtStatus::TT_INVALID_CONTOUR,
        Error::Ambiguous(_) => TtStatus::TT_AMBIGUOUS,
        Error::OutOfRange { .. } => TtStatus::TT_OUT_OF_RANGE,
        Error::Parse { .. } => TtStatus::TT_PARSE,
        Error::Io(_) => TtStatus::TT_IO,
        Error::Simulation(_) => TtStatus::TT_SIMULATION,
        Error::Params(_) => TtStatus::TT_INVALID_ARGUMENT,
        _ => TtStatus::TT_OTHER,
    }
}

enum Fail {
    Null,
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TtStatus::TT_OK,
        Ok(Err(Fail::Null)) => {
            set_error("null pointer argument".into());
            TtStatus::TT_NULL_POINTER
        }
        Ok(Err(Fail::Arg(m))) => {
            set_error(m);
            TtStatus::TT_INVALID_ARGUMENT
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            TtStatus::TT_PANIC
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail::Arg("string is not UTF-8".into()))
}

unsafe fn obj<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn put_f64(out: *mut f64, v: f64) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = v;
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null);
    }
    *out = CString::new(s)
        .map_err(|_| Fail::Arg("output contains a nul byte".into()))?
        .into_raw();
    Ok(())
}

/// Message of the last failure on this thread, or NULL. Owned by the
/// library; valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn tt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a tree from JSON Lines text.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_tree_from_jsonl(text: *const c_char, out: *mut *mut TtTree) -> TtStatus {
    guard(|| put(out, TtTree(io::tree_from_jsonl(str_arg(text)?)?)))
}

/// Canonical JSON Lines text of a tree; free with `tt_string_free`.
///
/// # Safety
/// `tree` must be a live handle; `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tt_tree_to_jsonl(tree: *const TtTree, out: *mut *mut c_char) -> TtStatus {
    guard(|| put_string(out, io::tree_to_jsonl(&obj(tree)?.0)))
}

/// # Safety
/// `tree` must come from this library, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tt_tree_free(tree: *mut TtTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Number of individuals; 0 for NULL.
///
/// # Safety
/// `tree` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn tt_tree_len(tree: *const TtTree) -> usize {
    tree.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `tree` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_tree_total_measure(tree: *const TtTree, out: *mut f64) -> TtStatus {
    guard(|| put_f64(out, obj(tree)?.0.total_measure()))
}

/// Number of individuals alive at height `h`.
///
/// # Safety
/// `tree` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_tree_alive_count(tree: *const TtTree, h: f64, out: *mut usize) -> TtStatus {
    guard(|| {
        let n = obj(tree)?.0.alive_count(h);
        if out.is_null() {
            return Err(Fail::Null);
        }
        *out = n;
        Ok(())
    })
}

/// The tree restricted to heights at most `r`, as a new handle.
///
/// # Safety
/// `tree` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_tree_truncate(tree: *const TtTree, r: f64, out: *mut *mut TtTree) -> TtStatus {
    guard(|| put(out, TtTree(obj(tree)?.0.truncate(r)?)))
}

/// Simulates a splitting tree with births at `birth_rate` and lifetimes
/// drawn from `lifetime` (e.g. "exp:2"), cut at `truncation` when positive.
///
/// # Safety
/// `lifetime` must be a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_simulate_splitting(
    birth_rate: f64,
    lifetime: *const c_char,
    truncation: f64,
    seed: u64,
    out: *mut *mut TtTree,
) -> TtStatus {
    guard(|| {
        let law: JumpLaw = str_arg(lifetime)?.parse()?;
        let mut p = SplittingParams::new(birth_rate, law);
        if truncation > 0.0 {
            p = p.with_truncation(truncation);
        }
        let tree = simulate_splitting_tree(&p, &mut ChaCha8Rng::seed_from_u64(seed))?;
        put(out, TtTree(tree))
    })
}

/// # Safety
/// `tree` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_encode(tree: *const TtTree, out: *mut *mut TtContour) -> TtStatus {
    guard(|| put(out, TtContour(contour::encode(&obj(tree)?.0))))
}

/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_decode(c: *const TtContour, out: *mut *mut TtTree) -> TtStatus {
    guard(|| put(out, TtTree(contour::decode(&obj(c)?.0)?)))
}

/// Parses a contour from `kind,a,b` CSV text, canonicalizing it.
///
/// # Safety
/// `text` must be a nul-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_contour_from_csv(text: *const c_char, out: *mut *mut TtContour) -> TtStatus {
    guard(|| put(out, TtContour(io::contour_from_csv(str_arg(text)?)?.contour)))
}

/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_contour_to_csv(c: *const TtContour, out: *mut *mut c_char) -> TtStatus {
    guard(|| put_string(out, io::contour_to_csv(&obj(c)?.0)))
}

/// # Safety
/// `c` must come from this library, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tt_contour_free(c: *mut TtContour) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_contour_duration(c: *const TtContour, out: *mut f64) -> TtStatus {
    guard(|| put_f64(out, obj(c)?.0.duration()))
}

/// Value at time `t` (right-continuous).
///
/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_contour_eval(c: *const TtContour, t: f64, out: *mut f64) -> TtStatus {
    guard(|| put_f64(out, obj(c)?.0.eval(t)?))
}

/// The contour with the stretches above `r` excised, as a new handle.
///
/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_time_change(c: *const TtContour, r: f64, out: *mut *mut TtContour) -> TtStatus {
    guard(|| put(out, TtContour(contour::time_change(&obj(c)?.0, r)?)))
}

/// Distance between the trees coded by two contours.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tt_contour_distance(a: *const TtContour, b: *const TtContour, out: *mut f64) -> TtStatus {
    guard(|| put_f64(out, contour::contour_distance(&obj(a)?.0, &obj(b)?.0)))
}

/// Non-zero when the two contours are identical.
///
/// # Safety
/// `a`, `b` must be live handles or NULL.
#[no_mangle]
pub unsafe extern "C" fn tt_contour_equal(a: *const TtContour, b: *const TtContour) -> i32 {
    match (a.as_ref(), b.as_ref()) {
        (Some(a), Some(b)) => (a.0 == b.0) as i32,
        _ => 0,
    }
}
