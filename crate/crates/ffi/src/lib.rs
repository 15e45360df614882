//! C interface to `bernlat`.
//!
//! Objects are exposed as opaque handles created by `bl_*_new`-style calls and
//! released with the matching `*_free`. Every fallible call returns a
//! [`BlStatus`]; on failure a description is available from
//! [`bl_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bernlat::analysis;
use bernlat::function::{ModulusSpec, BOUNDARY_TOLERANCE};
use bernlat::quantizer::{self, CutoffMode};
use bernlat::{bernstein, Error, FunctionSpec, LatticeApproximant};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    BoundaryNotInteger = 4,
    StructuralViolation = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// A certified function on [0, 1] with its modulus of continuity.
pub struct BlFunction {
    spec: FunctionSpec,
}

/// Integer Bernstein coefficients `q_0..q_n` with their cutoff and shift.
pub struct BlApproximant {
    inner: LatticeApproximant,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> BlStatus {
    match err {
        Error::Parse(_) => BlStatus::ParseError,
        Error::BoundaryNotInteger { .. } => BlStatus::BoundaryNotInteger,
        Error::StructuralViolation(_) | Error::Overflow(_) => BlStatus::StructuralViolation,
        _ => BlStatus::InvalidArgument,
    }
}

fn fail(status: BlStatus, msg: &str) -> BlStatus {
    set_error(msg);
    status
}

fn guard(body: impl FnOnce() -> Result<(), BlStatus>) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            BlStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(BlStatus::Internal, "internal panic"),
    }
}

fn lift<T>(r: bernlat::Result<T>) -> Result<T, BlStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, BlStatus> {
    // SAFETY: caller passes either null or a live handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| fail(BlStatus::NullPointer, "null pointer argument"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), BlStatus> {
    if out.is_null() {
        return Err(fail(BlStatus::NullPointer, "null output pointer"));
    }
    // SAFETY: non-null and, per the contract, valid for writes.
    unsafe { out.write(v) };
    Ok(())
}

/// Message for the most recent failure on this thread; empty after a
/// success. Valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn bl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses `text` as a function of `x` and certifies integer endpoint values
/// within `boundary_tol` (pass a negative value for the default 1e-9).
/// The modulus defaults to an empirical estimate.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_function_from_expr(text: *const c_char, boundary_tol: f64, out: *mut *mut BlFunction) -> BlStatus {
    guard(|| {
        if text.is_null() {
            return Err(fail(BlStatus::NullPointer, "null expression"));
        }
        // SAFETY: checked non-null; caller guarantees NUL termination.
        let text = unsafe { CStr::from_ptr(text) }
            .to_str()
            .map_err(|_| fail(BlStatus::InvalidArgument, "expression is not UTF-8"))?;
        let tol = if boundary_tol < 0.0 { BOUNDARY_TOLERANCE } else { boundary_tol };
        let spec = lift(FunctionSpec::from_expr(text, tol))?;
        // SAFETY: see function contract.
        unsafe { write(out, Box::into_raw(Box::new(BlFunction { spec }))) }
    })
}

/// # Safety
/// `f` must be null or a handle from [`bl_function_from_expr`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_function_free(f: *mut BlFunction) {
    if !f.is_null() {
        // SAFETY: handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(f) });
    }
}

fn set_modulus(f: *mut BlFunction, m: ModulusSpec) -> BlStatus {
    guard(|| {
        // SAFETY: caller passes a live handle or null.
        let handle = unsafe { f.as_mut() }.ok_or_else(|| fail(BlStatus::NullPointer, "null function"))?;
        handle.spec = lift(handle.spec.clone().with_modulus(m))?;
        Ok(())
    })
}

/// Sets `omega(d) = min(constant * d, cap)`; pass a NaN cap for none.
///
/// # Safety
/// `f` must be a live function handle.
#[no_mangle]
pub unsafe extern "C" fn bl_function_set_lipschitz(f: *mut BlFunction, constant: f64, cap: f64) -> BlStatus {
    let cap = if cap.is_nan() { None } else { Some(cap) };
    set_modulus(f, ModulusSpec::Lipschitz { constant, cap })
}

/// Sets `omega(d) = constant * d^exponent`.
///
/// # Safety
/// `f` must be a live function handle.
#[no_mangle]
pub unsafe extern "C" fn bl_function_set_hoelder(f: *mut BlFunction, constant: f64, exponent: f64) -> BlStatus {
    set_modulus(f, ModulusSpec::hoelder(constant, exponent))
}

/// # Safety
/// `f` must be a live function handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_function_eval(f: *const BlFunction, x: f64, out: *mut f64) -> BlStatus {
    guard(|| {
        let f = unsafe { deref(f) }?;
        let v = lift(f.spec.eval(x))?;
        unsafe { write(out, v) }
    })
}

/// Integer endpoint values `f(0)` and `f(1)`.
///
/// # Safety
/// `f` must be a live function handle; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_function_endpoints(f: *const BlFunction, f0: *mut i64, f1: *mut i64) -> BlStatus {
    guard(|| {
        let f = unsafe { deref(f) }?;
        unsafe { write(f0, f.spec.f0()) }?;
        unsafe { write(f1, f.spec.f1()) }
    })
}

/// Builds `Q_n`. A negative `t` selects the default cutoff.
///
/// # Safety
/// `f` must be a live function handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_approximate(f: *const BlFunction, n: usize, t: i64, out: *mut *mut BlApproximant) -> BlStatus {
    guard(|| {
        let f = unsafe { deref(f) }?;
        if n == 0 {
            return Err(fail(BlStatus::InvalidArgument, "degree must be at least 1"));
        }
        let t = if t < 0 { lift(quantizer::choose_t(n, CutoffMode::Default))? } else { t as usize };
        let (inner, _) = lift(quantizer::quantize_function(&f.spec, n, t))?;
        unsafe { write(out, Box::into_raw(Box::new(BlApproximant { inner }))) }
    })
}

/// # Safety
/// `a` must be null or a handle from [`bl_approximate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bl_approximant_free(a: *mut BlApproximant) {
    if !a.is_null() {
        // SAFETY: handle was created by Box::into_raw.
        drop(unsafe { Box::from_raw(a) });
    }
}

/// Degree `n`, or 0 for a null handle.
///
/// # Safety
/// `a` must be null or a live approximant handle.
#[no_mangle]
pub unsafe extern "C" fn bl_approximant_degree(a: *const BlApproximant) -> usize {
    unsafe { a.as_ref() }.map_or(0, |a| a.inner.n)
}

/// # Safety
/// `a` must be null or a live approximant handle.
#[no_mangle]
pub unsafe extern "C" fn bl_approximant_cutoff(a: *const BlApproximant) -> usize {
    unsafe { a.as_ref() }.map_or(0, |a| a.inner.t)
}

/// The shift `epsilon_n`; NaN for a null handle.
///
/// # Safety
/// `a` must be null or a live approximant handle.
#[no_mangle]
pub unsafe extern "C" fn bl_approximant_epsilon(a: *const BlApproximant) -> f64 {
    unsafe { a.as_ref() }.map_or(f64::NAN, |a| a.inner.epsilon_n)
}

/// Copies `q_0..q_n` into `buf`. `*written` receives `n + 1` in all cases, so
/// a call with `len = 0` queries the required size.
///
/// # Safety
/// `buf` must be valid for `len` writes (may be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn bl_approximant_coefficients(a: *const BlApproximant, buf: *mut i64, len: usize, written: *mut usize) -> BlStatus {
    guard(|| {
        let a = unsafe { deref(a) }?;
        let q = &a.inner.q;
        unsafe { write(written, q.len()) }?;
        if len < q.len() {
            return Err(fail(BlStatus::BufferTooSmall, &format!("need room for {} coefficients", q.len())));
        }
        if buf.is_null() {
            return Err(fail(BlStatus::NullPointer, "null buffer"));
        }
        // SAFETY: buf holds at least q.len() elements.
        unsafe { ptr::copy_nonoverlapping(q.as_ptr(), buf, q.len()) };
        Ok(())
    })
}

/// # Safety
/// `a` must be a live approximant handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_approximant_eval(a: *const BlApproximant, x: f64, out: *mut f64) -> BlStatus {
    guard(|| {
        let a = unsafe { deref(a) }?;
        let v = lift(a.inner.eval(x))?;
        unsafe { write(out, v) }
    })
}

/// Grid sup-norm error of `a` against `f` on `m` uniform points; `m = 0`
/// selects `max(2049, 8n + 1)`.
///
/// # Safety
/// Handles must be live; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_sup_error(f: *const BlFunction, a: *const BlApproximant, m: usize, out: *mut f64) -> BlStatus {
    guard(|| {
        let f = unsafe { deref(f) }?;
        let a = unsafe { deref(a) }?;
        let m = if m == 0 { analysis::default_grid(a.inner.n) } else { m };
        let v = lift(analysis::sup_error(&f.spec, &a.inner, m))?;
        unsafe { write(out, v) }
    })
}

/// `rho(f, n)` and its smallest minimizing cutoff.
///
/// # Safety
/// `f` must be a live function handle; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_rho(f: *const BlFunction, n: usize, value: *mut f64, t: *mut usize) -> BlStatus {
    guard(|| {
        let f = unsafe { deref(f) }?;
        let r = lift(quantizer::rho(&f.spec, n))?;
        unsafe { write(value, r.value) }?;
        unsafe { write(t, r.t) }
    })
}

/// Cutoff for degree `n`: the default rule when `alpha <= 0`, otherwise the
/// rule tuned to a Hoelder exponent `alpha`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_choose_t(n: usize, alpha: f64, out: *mut usize) -> BlStatus {
    guard(|| {
        let mode = if alpha <= 0.0 { CutoffMode::Default } else { CutoffMode::Hoelder(alpha) };
        let t = lift(quantizer::choose_t(n, mode))?;
        unsafe { write(out, t) }
    })
}

/// `p_{n,k}(x)`, zero for `k` outside `0..=n`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bl_eval_basis(n: usize, k: i64, x: f64, out: *mut f64) -> BlStatus {
    guard(|| {
        let v = lift(bernstein::eval_basis(n, k, x))?;
        unsafe { write(out, v) }
    })
}
