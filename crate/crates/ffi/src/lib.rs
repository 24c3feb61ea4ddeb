//! C ABI surface over the `tk-core` twisted K-theory engine.
//!
//! Conventions shared by every entry point:
//!
//! - Functions that can fail return a [`TkStatus`]; results travel through
//!   out-parameters that are written only on `TK_STATUS_OK`.
//! - Returned strings are NUL-terminated UTF-8 owned by the caller, who must
//!   release them with [`tk_string_free`]. `tk_version` is the one exception:
//!   it returns a static string that must not be freed.
//! - [`TkPresentation`] is an opaque handle produced by
//!   [`tk_presentation_parse`] and released with [`tk_presentation_free`].
//! - After any status other than `TK_STATUS_OK`, [`tk_last_error`] returns a
//!   human-readable message for the calling thread.
//! - Every entry point catches panics; a panic maps to `TK_STATUS_INTERNAL`
//!   and never unwinds across the ABI boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};

use tk_core::kk::KKElement;
use tk_core::presentation::Presentation;
use tk_core::selftest::{run as run_selftest, Depth};
use tk_core::tor::{report_json_string, tor, Mode};
use tk_core::twist::twisted_k;

/// Result code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkStatus {
    /// Success; out-parameters are populated.
    Ok = 0,
    /// A required pointer was NULL or a scalar argument was out of range.
    InvalidArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input text failed to parse or validate.
    ParseError = 3,
    /// The computation itself reported an error (e.g. an internal
    /// consistency cross-check failed).
    ComputeError = 4,
    /// A panic was caught at the ABI boundary; state is unchanged.
    Internal = 5,
}

/// Resolution mode selector for `tk_tor_json`: resolve by free Λ-modules.
pub const TK_TOR_MODE_FREE: i32 = 0;
/// Resolution mode selector for `tk_tor_json`: resolve by relatively
/// projective extended modules.
pub const TK_TOR_MODE_RELATIVE: i32 = 1;

/// Largest homological degree accepted by `tk_tor_json`.
pub const TK_TOR_MAX_DEGREE: u32 = 64;

/// Opaque handle to a validated finitely presented module over the
/// truncated β-basis ring.
pub struct TkPresentation {
    inner: Presentation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Display) {
    let text = msg.to_string();
    let c = CString::new(text.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").expect("no interior NUL"));
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: TkStatus, msg: impl Display) -> TkStatus {
    set_error(msg);
    status
}

/// Run `f` with panics converted to `TK_STATUS_INTERNAL`.
fn guarded(f: impl FnOnce() -> TkStatus) -> TkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".to_string());
            fail(TkStatus::Internal, format!("internal panic: {msg}"))
        }
    }
}

/// Read a required C string argument, reporting the appropriate status.
///
/// # Safety
/// `ptr` must be NULL or point to a NUL-terminated string.
unsafe fn required_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, TkStatus> {
    if ptr.is_null() {
        return Err(fail(TkStatus::InvalidArgument, format!("{name} must not be NULL")));
    }
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|e| fail(TkStatus::InvalidUtf8, format!("{name} is not valid UTF-8: {e}")))
}

fn export_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior NULs removed").into_raw()
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn tk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the most recent failure on the calling thread, or an
/// empty string if the last call succeeded. The caller owns the returned
/// string and must release it with `tk_string_free`.
#[no_mangle]
pub extern "C" fn tk_last_error() -> *mut c_char {
    let msg = LAST_ERROR
        .with(|e| e.borrow().as_ref().map(|c| c.to_string_lossy().into_owned()))
        .unwrap_or_default();
    export_string(msg)
}

/// Release a string previously returned through an out-parameter or by
/// `tk_last_error`. NULL is accepted and ignored.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library that has not
/// already been freed.
#[no_mangle]
pub unsafe extern "C" fn tk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parse and validate a presentation from its JSON document. On success,
/// writes a handle that the caller must release with `tk_presentation_free`.
///
/// # Safety
/// `json` must be NULL or point to a NUL-terminated string; `out` must be
/// NULL or point to writable memory for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tk_presentation_parse(
    json: *const c_char,
    out: *mut *mut TkPresentation,
) -> TkStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TkStatus::InvalidArgument, "out must not be NULL");
        }
        let text = match unsafe { required_str(json, "json") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match Presentation::from_json_str(text) {
            Ok(p) => {
                let handle = Box::into_raw(Box::new(TkPresentation { inner: p }));
                unsafe { out.write(handle) };
                TkStatus::Ok
            }
            Err(e) => fail(TkStatus::ParseError, e),
        }
    })
}

/// Release a presentation handle. NULL is accepted and ignored.
///
/// # Safety
/// `handle` must be NULL or a pointer obtained from `tk_presentation_parse`
/// that has not already been freed.
#[no_mangle]
pub unsafe extern "C" fn tk_presentation_free(handle: *mut TkPresentation) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Number of generators in the presentation.
///
/// # Safety
/// `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_presentation_generators(
    handle: *const TkPresentation,
    out: *mut usize,
) -> TkStatus {
    guarded(|| {
        let (Some(p), false) = (unsafe { handle.as_ref() }, out.is_null()) else {
            return fail(TkStatus::InvalidArgument, "handle and out must not be NULL");
        };
        unsafe { out.write(p.inner.generators().len()) };
        TkStatus::Ok
    })
}

/// Truncation level D of the presentation's coefficient ring.
///
/// # Safety
/// `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
/// `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_presentation_truncation(
    handle: *const TkPresentation,
    out: *mut u32,
) -> TkStatus {
    guarded(|| {
        let (Some(p), false) = (unsafe { handle.as_ref() }, out.is_null()) else {
            return fail(TkStatus::InvalidArgument, "handle and out must not be NULL");
        };
        unsafe { out.write(p.inner.truncation()) };
        TkStatus::Ok
    })
}

/// Compute the twisted K-groups of the presented module as a JSON document
/// with per-parity free ranks and invariant factors. The caller owns the
/// returned string and must release it with `tk_string_free`.
///
/// # Safety
/// `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
/// `out_json` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_twisted_k_json(
    handle: *const TkPresentation,
    out_json: *mut *mut c_char,
) -> TkStatus {
    guarded(|| {
        let (Some(p), false) = (unsafe { handle.as_ref() }, out_json.is_null()) else {
            return fail(TkStatus::InvalidArgument, "handle and out_json must not be NULL");
        };
        let groups = twisted_k(&p.inner);
        unsafe { out_json.write(export_string(groups.to_json_string())) };
        TkStatus::Ok
    })
}

/// Compute Tor_s for s = 0, …, `s_max` of the presented module against the
/// coefficient module of the multiplicative formal group law, in the chosen
/// resolution mode (`TK_TOR_MODE_FREE` or `TK_TOR_MODE_RELATIVE`). Writes a
/// JSON document; the caller owns it and must release it with
/// `tk_string_free`.
///
/// # Safety
/// `handle` must be a live pointer from `tk_presentation_parse` (or NULL);
/// `out_json` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_tor_json(
    handle: *const TkPresentation,
    s_max: u32,
    mode: i32,
    out_json: *mut *mut c_char,
) -> TkStatus {
    guarded(|| {
        let (Some(p), false) = (unsafe { handle.as_ref() }, out_json.is_null()) else {
            return fail(TkStatus::InvalidArgument, "handle and out_json must not be NULL");
        };
        let mode = match mode {
            TK_TOR_MODE_FREE => Mode::Free,
            TK_TOR_MODE_RELATIVE => Mode::Relative,
            other => return fail(TkStatus::InvalidArgument, format!("unknown tor mode {other}")),
        };
        if s_max > TK_TOR_MAX_DEGREE {
            return fail(
                TkStatus::InvalidArgument,
                format!("s_max {s_max} exceeds the supported maximum {TK_TOR_MAX_DEGREE}"),
            );
        }
        match tor(&p.inner, s_max as usize, mode) {
            Ok(report) => {
                unsafe { out_json.write(export_string(report_json_string(&report))) };
                TkStatus::Ok
            }
            Err(e) => fail(TkStatus::ComputeError, e),
        }
    })
}

/// Decide whether a Laurent expression in u and v lies in the integral
/// bialgebra of cooperations. Writes 1 or 0 through `out_is_member`.
///
/// # Safety
/// `expr` must be NULL or point to a NUL-terminated string; `out_is_member`
/// must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tk_kk_is_member(
    expr: *const c_char,
    out_is_member: *mut bool,
) -> TkStatus {
    guarded(|| {
        if out_is_member.is_null() {
            return fail(TkStatus::InvalidArgument, "out_is_member must not be NULL");
        }
        let text = match unsafe { required_str(expr, "expr") } {
            Ok(t) => t,
            Err(status) => return status,
        };
        match KKElement::parse(text) {
            Ok(e) => {
                unsafe { out_is_member.write(e.is_integral()) };
                TkStatus::Ok
            }
            Err(e) => fail(TkStatus::ParseError, e),
        }
    })
}

/// Run the built-in consistency checks. `deep` enables the slower corpus.
/// Returns `TK_STATUS_OK` when every check passes and
/// `TK_STATUS_COMPUTE_ERROR` (with a message naming the first failure)
/// otherwise.
#[no_mangle]
pub extern "C" fn tk_self_test(deep: bool) -> TkStatus {
    guarded(|| {
        let depth = if deep { Depth::Deep } else { Depth::Normal };
        let report = run_selftest(depth);
        match report.checks.iter().find(|c| !c.pass) {
            None => TkStatus::Ok,
            Some(first) => fail(
                TkStatus::ComputeError,
                format!("self-test check '{}' failed: {}", first.name, first.detail),
            ),
        }
    })
}
