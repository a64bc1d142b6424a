//! C ABI over `wallcross`. Representations are opaque handles; results come back as
//! NUL-terminated JSON strings owned by the library and released with `wc_string_free`.
//! Every call returns a `WcStatus`; on failure `wc_last_error_message` describes the error.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wallcross::arrangement::Arrangement;
use wallcross::cy::CYModel;
use wallcross::linalg::{parse_qvec, QVec};
use wallcross::rep::{QSRep, RepSpec};
use wallcross::windows::{wall_crossing, window};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    Utf8 = 2,
    Parse = 3,
    Input = 4,
    Internal = 5,
    Panic = 6,
}

/// A representation together with its wall arrangement.
pub struct WcRep {
    rep: QSRep,
    arr: Arrangement,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(WcStatus, String);

impl From<wallcross::Error> for Failure {
    fn from(e: wallcross::Error) -> Self {
        Failure(WcStatus::Input, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            WcStatus::Ok
        }
        Ok(Err(Failure(s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("panic inside wallcross");
            WcStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(WcStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(WcStatus::Utf8, format!("{name}: {e}")))
}

unsafe fn rep_arg<'a>(p: *const WcRep) -> Result<&'a WcRep, Failure> {
    p.as_ref().ok_or_else(|| Failure(WcStatus::NullPointer, "rep is null".into()))
}

unsafe fn delta_arg(p: *const c_char, name: &str, rank: usize) -> Result<QVec, Failure> {
    let s = str_arg(p, name)?;
    let v = parse_qvec(s).map_err(|e| Failure(WcStatus::Parse, format!("{name}: {e}")))?;
    if v.len() != rank {
        return Err(Failure(WcStatus::Input, format!("{name} has {} coordinates, expected {rank}", v.len())));
    }
    Ok(v)
}

unsafe fn write_json(out: *mut *mut c_char, v: &serde_json::Value) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(WcStatus::NullPointer, "out is null".into()));
    }
    let s = serde_json::to_string(v).map_err(|e| Failure(WcStatus::Internal, e.to_string()))?;
    let c = CString::new(s).map_err(|e| Failure(WcStatus::Internal, e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn build(rep: QSRep) -> Result<Box<WcRep>, Failure> {
    let arr = Arrangement::build(&rep)?;
    Ok(Box::new(WcRep { rep, arr }))
}

/// Builds a representation from JSON `{"root_datum": {...}, "weights": [[...], ...]}`.
///
/// # Safety
/// `json` must be null or a valid NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn wc_rep_from_json(json: *const c_char, out: *mut *mut WcRep) -> WcStatus {
    guard(|| {
        let s = str_arg(json, "json")?;
        if out.is_null() {
            return Err(Failure(WcStatus::NullPointer, "out is null".into()));
        }
        let spec: RepSpec = serde_json::from_str(s).map_err(|e| Failure(WcStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(build(spec.build()?)?);
        Ok(())
    })
}

/// Builds a rank-one torus representation from `n` integer weights.
///
/// # Safety
/// `weights` must point to `n` readable values; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn wc_rep_torus1(weights: *const i64, n: usize, out: *mut *mut WcRep) -> WcStatus {
    guard(|| {
        if weights.is_null() || out.is_null() {
            return Err(Failure(WcStatus::NullPointer, "weights or out is null".into()));
        }
        let ws = std::slice::from_raw_parts(weights, n);
        *out = Box::into_raw(build(wallcross::catalog::torus1(ws)?)?);
        Ok(())
    })
}

/// Releases a handle from `wc_rep_from_json` or `wc_rep_torus1`. Null is ignored.
///
/// # Safety
/// `rep` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wc_rep_free(rep: *mut WcRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Rank of the character lattice.
///
/// # Safety
/// `rep` must be a live handle or null; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn wc_rep_rank(rep: *const WcRep, out: *mut usize) -> WcStatus {
    guard(|| {
        let r = rep_arg(rep)?;
        if out.is_null() {
            return Err(Failure(WcStatus::NullPointer, "out is null".into()));
        }
        *out = r.rep.rank();
        Ok(())
    })
}

/// Window at `delta` (comma-separated rationals such as `"1/2"`) as JSON `{"delta", "chars"}`.
///
/// # Safety
/// `rep` must be a live handle or null; `delta` a NUL-terminated string or null; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn wc_window_json(rep: *const WcRep, delta: *const c_char, out: *mut *mut c_char) -> WcStatus {
    guard(|| {
        let r = rep_arg(rep)?;
        let d = delta_arg(delta, "delta", r.rep.rank())?;
        let w = window(&r.rep, &r.arr, &d)?;
        let v = serde_json::json!({
            "delta": wallcross::json::qvec(&w.delta),
            "chars": w.chars,
        });
        write_json(out, &v)
    })
}

/// Wall crossing between adjacent chambers as JSON with `common` and `faces`.
///
/// # Safety
/// As for `wc_window_json`, with `delta2` a second NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wc_wallcross_json(
    rep: *const WcRep,
    delta: *const c_char,
    delta2: *const c_char,
    out: *mut *mut c_char,
) -> WcStatus {
    guard(|| {
        let r = rep_arg(rep)?;
        let a = delta_arg(delta, "delta", r.rep.rank())?;
        let b = delta_arg(delta2, "delta2", r.rep.rank())?;
        let c = wall_crossing(&r.rep, &r.arr, &a, &b)?;
        write_json(out, &c.to_json())
    })
}

/// Calabi–Yau report for weights `a[0..n]`, degrees `d[0..r]` and twist parameter `twist`.
///
/// # Safety
/// `a` and `d` must point to `n` and `r` readable values; `out` writable or null.
#[no_mangle]
pub unsafe extern "C" fn wc_cy_report_json(a: *const i64, n: usize, d: *const i64, r: usize, twist: i64, out: *mut *mut c_char) -> WcStatus {
    guard(|| {
        if a.is_null() || d.is_null() {
            return Err(Failure(WcStatus::NullPointer, "a or d is null".into()));
        }
        let model = CYModel::build(std::slice::from_raw_parts(a, n), std::slice::from_raw_parts(d, r))?;
        write_json(out, &model.report(twist)?.to_json())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread; empty after a success. Valid until the next call.
#[no_mangle]
pub extern "C" fn wc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_values_are_stable() {
        assert_eq!(WcStatus::Ok as i32, 0);
        assert_eq!(WcStatus::Panic as i32, 6);
    }

    #[test]
    fn null_handles() {
        let mut out = std::ptr::null_mut();
        let s = unsafe { wc_window_json(std::ptr::null(), std::ptr::null(), &mut out) };
        assert_eq!(s, WcStatus::NullPointer);
        assert!(out.is_null());
        unsafe { wc_rep_free(std::ptr::null_mut()) };
        unsafe { wc_string_free(std::ptr::null_mut()) };
    }
}
