//! C ABI over `agtk`.
//!
//! Groups and sets are opaque handles owned by the caller and released with
//! the matching `_free`. Every fallible call returns an [`AgtkStatus`]; on
//! failure [`agtk_last_error`] describes the error for the calling thread.
//! Reports cross the boundary as JSON strings released by
//! [`agtk_string_free`]. Panics never unwind into C.

use agtk::cayley::{ball_diameter, spectral_gap, CayleyGraph};
use agtk::setcalc::doubling_report;
use agtk::verify::{run_battery, Battery, SweepOptions};
use agtk::{Caps, ElementSet, Error, Group, GroupSpec};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of an FFI call. Values 1 to 3 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgtkStatus {
    Ok = 0,
    /// A checked property failed; the report or witness is still returned
    /// where the call produces one.
    Violation = 1,
    InvalidInput = 2,
    CapExceeded = 3,
    /// Solver non-convergence or io failure.
    Failure = 4,
    NullPointer = 5,
    Panic = 6,
}

/// Opaque group handle.
pub struct AgtkGroup(Group);

/// Opaque element-set handle; remembers its group.
pub struct AgtkSet(ElementSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> AgtkStatus {
    match e.exit_code() {
        1 => AgtkStatus::Violation,
        2 => AgtkStatus::InvalidInput,
        3 => AgtkStatus::CapExceeded,
        _ => AgtkStatus::Failure,
    }
}

enum Fail {
    Agtk(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Agtk(e)
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> AgtkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            AgtkStatus::Ok
        }
        Ok(Err(Fail::Agtk(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            AgtkStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".to_string());
            AgtkStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Agtk(Error::InvalidInput(format!("{what} is not UTF-8"))))
}

unsafe fn json_arg(p: *const c_char, what: &'static str) -> Result<serde_json::Value, Fail> {
    Ok(serde_json::from_str(str_arg(p, what)?).map_err(Error::from)?)
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn put_json(out: *mut *mut c_char, v: impl serde::Serialize) -> Result<(), Fail> {
    let text = serde_json::to_string(&v).map_err(Error::from)?;
    let c = CString::new(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    put(out, c.into_raw(), "out")
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn agtk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn agtk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn agtk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a group from a JSON spec (`{"kind": "cyclic", "n": 6}`) or a
/// short form (`psl2:5`), with default caps.
///
/// # Safety
/// `spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_group_new(spec: *const c_char, out: *mut *mut AgtkGroup) -> AgtkStatus {
    guard(|| {
        let spec = GroupSpec::parse(str_arg(spec, "spec")?)?;
        let g = Group::with_caps(spec, Caps::default())?;
        put(out, Box::into_raw(Box::new(AgtkGroup(g))), "out")
    })
}

/// # Safety
/// `g` must come from [`agtk_group_new`] and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn agtk_group_free(g: *mut AgtkGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Writes the order of a finite group, or sets `finite` to false.
/// Orders above `u64::MAX` are a cap error.
///
/// # Safety
/// `g` must be a live handle; `order` and `finite` must be writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_group_order(g: *const AgtkGroup, order: *mut u64, finite: *mut bool) -> AgtkStatus {
    guard(|| {
        let g = &handle(g, "group")?.0;
        let o = match g.order() {
            Some(o) => u64::try_from(o).map_err(|_| Error::cap("group order", u64::MAX))?,
            None => 0,
        };
        put(order, o, "order")?;
        put(finite, g.is_finite(), "finite")
    })
}

/// Builds a set from a JSON array of element literals.
///
/// # Safety
/// `g` must be a live handle, `elements` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_set_new(
    g: *const AgtkGroup,
    elements: *const c_char,
    out: *mut *mut AgtkSet,
) -> AgtkStatus {
    guard(|| {
        let g = &handle(g, "group")?.0;
        let s = ElementSet::from_json(g, &json_arg(elements, "elements")?)?;
        put(out, Box::into_raw(Box::new(AgtkSet(s))), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn agtk_set_free(s: *mut AgtkSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of elements; 0 for null.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn agtk_set_len(s: *const AgtkSet) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// Product set `AB`.
///
/// # Safety
/// `a`, `b` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_set_product(a: *const AgtkSet, b: *const AgtkSet, out: *mut *mut AgtkSet) -> AgtkStatus {
    guard(|| {
        let p = handle(a, "a")?.0.product(&handle(b, "b")?.0)?;
        put(out, Box::into_raw(Box::new(AgtkSet(p))), "out")
    })
}

/// Elements as a JSON array of literals in canonical order.
///
/// # Safety
/// `s` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_set_to_json(s: *const AgtkSet, out: *mut *mut c_char) -> AgtkStatus {
    guard(|| put_json(out, handle(s, "set")?.0.to_json()))
}

/// Doubling report (`|Aⁿ|` for `n ≤ n_max`, doubling and tripling) as JSON.
///
/// # Safety
/// `s` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_doubling_report(s: *const AgtkSet, n_max: usize, out: *mut *mut c_char) -> AgtkStatus {
    guard(|| put_json(out, doubling_report(&handle(s, "set")?.0, n_max)?))
}

unsafe fn graph(g: *const AgtkGroup, s: *const AgtkSet) -> Result<CayleyGraph, Fail> {
    let g = &handle(g, "group")?.0;
    Ok(match s.as_ref() {
        Some(s) => CayleyGraph::build(g, &s.0)?,
        None => CayleyGraph::standard(g)?,
    })
}

/// Ball sizes and diameter of the Cayley graph of `g` with generating set
/// `s`, or the symmetrized standard generators when `s` is null.
///
/// # Safety
/// `g` must be a live handle, `s` null or a live handle, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_diameter(g: *const AgtkGroup, s: *const AgtkSet, out: *mut *mut c_char) -> AgtkStatus {
    guard(|| put_json(out, ball_diameter(&graph(g, s)?)?))
}

/// Spectral gap report, same generating-set convention as [`agtk_diameter`].
///
/// # Safety
/// As for [`agtk_diameter`].
#[no_mangle]
pub unsafe extern "C" fn agtk_spectral_gap(
    g: *const AgtkGroup,
    s: *const AgtkSet,
    out: *mut *mut c_char,
) -> AgtkStatus {
    guard(|| put_json(out, spectral_gap(&graph(g, s)?)?))
}

/// Runs a battery (`"freiman"`, `"hamidoune"`, ...) and writes its JSON
/// report. Returns `Violation` together with the report when a check failed.
///
/// # Safety
/// `battery` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn agtk_verify(
    battery: *const c_char,
    max_order: u64,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> AgtkStatus {
    let mut violated = false;
    let status = guard(|| {
        let b: Battery = str_arg(battery, "battery")?.parse()?;
        let opts = SweepOptions {
            max_order,
            samples,
            seed,
            caps: Caps::default(),
        };
        let report = run_battery(b, &opts)?;
        violated = report.violations > 0;
        put_json(out, &report)
    });
    if status == AgtkStatus::Ok && violated {
        set_error(format!(
            "{} battery reported violations",
            unsafe { CStr::from_ptr(battery) }.to_string_lossy()
        ));
        return AgtkStatus::Violation;
    }
    status
}
