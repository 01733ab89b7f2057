//! C interface to `cupgates`.
//!
//! Objects are opaque handles that the caller releases with the matching
//! `*_free` function. Every fallible call returns an `i32` status: `0` on
//! success, a positive code for library errors and a negative code for misuse
//! at the boundary (null pointers, bad UTF-8, panics). The message of the most
//! recent failure on the calling thread is available from
//! [`cupgates_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use cupgates::code::CssCode;
use cupgates::data::resolve_complex;
use cupgates::homology::betti_numbers;
use cupgates::scenarios::run_scenario;
use cupgates::synth::{synthesize_diagonal, Constants, GateExpression};
use cupgates::verify::{check_circuit_commutation, extract_logical_action, CheckOptions};
use cupgates::{CellComplex, Error};

pub const CUPGATES_OK: i32 = 0;
pub const CUPGATES_ERR_INPUT: i32 = 1;
pub const CUPGATES_ERR_PRECONDITION: i32 = 2;
pub const CUPGATES_ERR_UNSUPPORTED: i32 = 3;
pub const CUPGATES_ERR_BUDGET: i32 = 4;
pub const CUPGATES_ERR_OVERFLOW: i32 = 5;
pub const CUPGATES_ERR_PARSE: i32 = 6;
/// The output buffer is too short; the required length was still written.
pub const CUPGATES_ERR_BUFFER: i32 = 7;
pub const CUPGATES_ERR_NULL: i32 = -1;
pub const CUPGATES_ERR_UTF8: i32 = -2;
pub const CUPGATES_ERR_PANIC: i32 = -3;

/// A loaded cell complex.
pub struct CupgatesComplex {
    inner: Arc<CellComplex>,
}

/// A CSS code built from a complex.
pub struct CupgatesCode {
    inner: CssCode,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs were removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Input(_) => CUPGATES_ERR_INPUT,
        Error::Precondition(_) => CUPGATES_ERR_PRECONDITION,
        Error::Unsupported(_) => CUPGATES_ERR_UNSUPPORTED,
        Error::Budget(_) => CUPGATES_ERR_BUDGET,
        Error::Overflow(_) => CUPGATES_ERR_OVERFLOW,
        Error::Parse { .. } => CUPGATES_ERR_PARSE,
    }
}

/// Boundary failure, already recorded as the last error.
struct Fail(i32);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        set_error(e.to_string());
        Fail(code_of(&e))
    }
}

fn fail(code: i32, msg: &str) -> Fail {
    set_error(msg.to_string());
    Fail(code)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CUPGATES_OK,
        Ok(Err(Fail(code))) => code,
        Err(_) => {
            set_error("internal panic".into());
            CUPGATES_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(CUPGATES_ERR_NULL, &format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(CUPGATES_ERR_UTF8, &format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| fail(CUPGATES_ERR_NULL, &format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| fail(CUPGATES_ERR_NULL, &format!("{what} is null")))
}

/// Message of the last failed call on this thread, empty if none.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cupgates_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a complex by shipped name (`rp2`, `cp2`, `t3`, `torus:2x3`, ...) or
/// from a JSON file path.
///
/// # Safety
///
/// `spec` must be a NUL-terminated string and `out` a valid pointer. On
/// success `*out` owns a handle to release with [`cupgates_complex_free`].
#[no_mangle]
pub unsafe extern "C" fn cupgates_complex_load(spec: *const c_char, out: *mut *mut CupgatesComplex) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let c = resolve_complex(str_arg(spec, "spec")?)?;
        *out = Box::into_raw(Box::new(CupgatesComplex { inner: c }));
        Ok(())
    })
}

/// Top dimension of the complex.
///
/// # Safety
///
/// `complex` must be a live handle from [`cupgates_complex_load`] and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cupgates_complex_dim(complex: *const CupgatesComplex, out: *mut usize) -> i32 {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(complex, "complex")?.inner.dim();
        Ok(())
    })
}

/// Betti numbers mod the prime `p`, written into `buf` (`len` entries).
/// `*written` receives dim + 1; if that exceeds `len` the call fails with
/// `CUPGATES_ERR_BUFFER` and writes nothing else.
///
/// # Safety
///
/// `complex` must be a live handle, `written` a valid pointer and `buf`
/// valid for `len` writes (it may be null when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn cupgates_betti_numbers(
    complex: *const CupgatesComplex,
    p: u64,
    buf: *mut u64,
    len: usize,
    written: *mut usize,
) -> i32 {
    guard(|| {
        let written = out_arg(written, "written")?;
        let b = betti_numbers(&ref_arg(complex, "complex")?.inner, p)?;
        *written = b.len();
        if b.len() > len {
            return Err(fail(CUPGATES_ERR_BUFFER, &format!("need {} entries, got {len}", b.len())));
        }
        if buf.is_null() {
            return Err(fail(CUPGATES_ERR_NULL, "buf is null"));
        }
        for (i, v) in b.iter().enumerate() {
            *buf.add(i) = *v as u64;
        }
        Ok(())
    })
}

/// Releases a complex. Null is ignored.
///
/// # Safety
///
/// `complex` must be null or a handle not yet freed. Codes built from it
/// remain valid.
#[no_mangle]
pub unsafe extern "C" fn cupgates_complex_free(complex: *mut CupgatesComplex) {
    if !complex.is_null() {
        drop(Box::from_raw(complex));
    }
}

/// Builds the Z_`modulus` code with qudits on `degree`-cells, `copies` times.
///
/// # Safety
///
/// `complex` must be a live handle and `out` a valid pointer. On success
/// `*out` owns a handle to release with [`cupgates_code_free`].
#[no_mangle]
pub unsafe extern "C" fn cupgates_code_new(
    complex: *const CupgatesComplex,
    degree: usize,
    modulus: u64,
    copies: usize,
    out: *mut *mut CupgatesCode,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let code = CssCode::from_chain_complex(&ref_arg(complex, "complex")?.inner, degree, modulus, copies)?;
        *out = Box::into_raw(Box::new(CupgatesCode { inner: code }));
        Ok(())
    })
}

/// Number of physical qudits.
///
/// # Safety
///
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cupgates_code_num_qudits(code: *const CupgatesCode, out: *mut usize) -> i32 {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(code, "code")?.inner.num_qudits();
        Ok(())
    })
}

/// Logical dimension of the code. Fails with `CUPGATES_ERR_OVERFLOW` when it
/// does not fit in 64 bits.
///
/// # Safety
///
/// `code` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cupgates_code_logical_dimension(code: *const CupgatesCode, out: *mut u64) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let d = ref_arg(code, "code")?.inner.logical_dimension();
        *out = d
            .value()
            .and_then(|v| u64::try_from(v).ok())
            .ok_or_else(|| fail(CUPGATES_ERR_OVERFLOW, "logical dimension exceeds 64 bits"))?;
        Ok(())
    })
}

/// Synthesizes `expr` on the code, checks that the circuit commutes with
/// every X-check and, if it does, extracts its logical action.
///
/// `*commutes` is set to 1 or 0. On commutation `*description` receives a
/// newly allocated string (release with [`cupgates_string_free`]); otherwise
/// it is set to null.
///
/// # Safety
///
/// `code` must be a live handle, `expr` a NUL-terminated string and
/// `commutes` and `description` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cupgates_verify_expression(
    code: *const CupgatesCode,
    expr: *const c_char,
    seed: u64,
    commutes: *mut i32,
    description: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let commutes = out_arg(commutes, "commutes")?;
        let description = out_arg(description, "description")?;
        *description = ptr::null_mut();
        let code = &ref_arg(code, "code")?.inner;
        let e = GateExpression::parse(str_arg(expr, "expr")?)?;
        let circ = synthesize_diagonal(&e, code, &Constants::new())?;
        let opts = CheckOptions {
            seed,
            ..CheckOptions::default()
        };
        let report = check_circuit_commutation(&circ, code, &opts)?;
        *commutes = report.passed as i32;
        if report.passed {
            let text = extract_logical_action(&circ, code, seed)?.describe();
            *description = CString::new(text).expect("descriptions have no NULs").into_raw();
        }
        Ok(())
    })
}

/// Runs a shipped scenario by name; `*passed` is set to 1 or 0.
///
/// # Safety
///
/// `name` must be a NUL-terminated string and `passed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cupgates_run_scenario(name: *const c_char, passed: *mut i32) -> i32 {
    guard(|| {
        let passed = out_arg(passed, "passed")?;
        *passed = run_scenario(str_arg(name, "name")?)?.passed as i32;
        Ok(())
    })
}

/// Releases a code. Null is ignored.
///
/// # Safety
///
/// `code` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cupgates_code_free(code: *mut CupgatesCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
///
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cupgates_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
