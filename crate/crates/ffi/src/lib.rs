//! C interface. Functions return an `int32_t` status (`HB_OK` on success) and
//! deliver results through out-pointers. Objects are opaque handles that the
//! caller releases with the matching `*_free`. On failure the message is
//! available from `hb_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use haar_besov::approx::{a_norm, b_norm_modulus, BesovParams};
use haar_besov::dyadic::{DyadicStepFunction, StepFunction};
use haar_besov::experiments::{random_step, Distribution};
use haar_besov::families::spike;
use haar_besov::haar::{analyze, synthesize, HaarCoefficients};
use haar_besov::regimes::{classify_with, Regime, System};
use haar_besov::sequence::lqlp_norm;
use haar_besov::Error;

pub const HB_OK: i32 = 0;
pub const HB_ERR_NULL: i32 = 1;
pub const HB_ERR_PARAMETER: i32 = 2;
pub const HB_ERR_CAPACITY: i32 = 3;
pub const HB_ERR_UNSUPPORTED: i32 = 4;
pub const HB_ERR_FORMAT: i32 = 5;
pub const HB_ERR_IO: i32 = 6;
pub const HB_ERR_PANIC: i32 = 7;

pub const HB_SYSTEM_ISOTROPIC: i32 = 0;
pub const HB_SYSTEM_TENSOR: i32 = 1;

/// Regime codes written by `hb_classify`.
pub const HB_REGIME_UNCONDITIONAL_BASIS: i32 = 0;
pub const HB_REGIME_CONDITIONAL_BASIS: i32 = 1;
pub const HB_REGIME_NOT_BASIS_TRIVIAL_DUAL: i32 = 2;
pub const HB_REGIME_NOT_BASIS_UNBOUNDED_PROJECTORS: i32 = 3;
pub const HB_REGIME_NOT_BASIS_TENSOR: i32 = 4;
pub const HB_REGIME_DEGENERATE_SPACE: i32 = 5;

/// Besov parameters; `q = INFINITY` is allowed where the operation supports it.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HbParams {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub d: u32,
}

/// Dyadic step function on the unit cube.
pub struct HbFunction(DyadicStepFunction);

/// Isotropic Haar coefficients.
pub struct HbCoefficients(HaarCoefficients);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) => HB_ERR_PARAMETER,
        Error::Capacity { .. } => HB_ERR_CAPACITY,
        Error::Unsupported(_) => HB_ERR_UNSUPPORTED,
        Error::Format(_) | Error::Json(_) => HB_ERR_FORMAT,
        Error::Io(_) => HB_ERR_IO,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HB_OK,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HB_ERR_NULL
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            code_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            HB_ERR_PANIC
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = value;
    Ok(())
}

fn params(p: &HbParams) -> Result<BesovParams, Fail> {
    Ok(BesovParams::new(p.p, p.q, p.s, p.d as usize)?)
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL,
/// or 0 when there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn hb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Function at level `m` from `len = 2^(m d)` row-major values.
///
/// # Safety
/// `values` must be valid for `len` reads; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_function_new(
    d: u32,
    m: u32,
    values: *const f64,
    len: usize,
    out: *mut *mut HbFunction,
) -> i32 {
    guard(|| {
        if values.is_null() && len > 0 {
            return Err(Fail::Null("values"));
        }
        let v = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(values, len).to_vec() };
        store(out, HbFunction(DyadicStepFunction::new(d as usize, m, v)?))
    })
}

/// Random function with values uniform on `[-1, 1]` (`normal = 0`) or
/// standard normal, fully determined by `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_function_random(
    seed: u64,
    d: u32,
    m: u32,
    normal: i32,
    out: *mut *mut HbFunction,
) -> i32 {
    guard(|| {
        let dist = if normal != 0 { Distribution::StandardNormal } else { Distribution::Uniform };
        store(out, HbFunction(random_step(seed, d as usize, m, dist)?))
    })
}

/// The normalized spike `2^(m d)` on `[0, 2^-m)^d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_function_spike(d: u32, m: u32, out: *mut *mut HbFunction) -> i32 {
    guard(|| store(out, HbFunction(spike(d as usize, m)?.to_dense()?)))
}

/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hb_function_free(f: *mut HbFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Dimension, level and number of cells.
///
/// # Safety
/// `f` must be a live handle; out-pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn hb_function_shape(f: *const HbFunction, d: *mut u32, m: *mut u32, len: *mut usize) -> i32 {
    guard(|| {
        let f = &deref(f, "f")?.0;
        if !d.is_null() {
            *d = f.dim() as u32;
        }
        if !m.is_null() {
            *m = f.level();
        }
        if !len.is_null() {
            *len = f.values().len();
        }
        Ok(())
    })
}

/// Copies the values into `buf`, which must hold exactly the cell count.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hb_function_values(f: *const HbFunction, buf: *mut f64, len: usize) -> i32 {
    guard(|| {
        let f = &deref(f, "f")?.0;
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        if len != f.values().len() {
            return Err(Error::Parameter(format!("buffer holds {len} values, function has {}", f.values().len())).into());
        }
        ptr::copy_nonoverlapping(f.values().as_ptr(), buf, len);
        Ok(())
    })
}

/// `||f||_p` for any `p > 0`.
///
/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hb_lp_norm(f: *const HbFunction, p: f64, out: *mut f64) -> i32 {
    guard(|| {
        let f = &deref(f, "f")?.0;
        if !(p > 0.0) {
            return Err(Error::Parameter(format!("p must be positive, got {p}")).into());
        }
        write(out, (f.log2_lp_norm_pow(p) / p).exp2())
    })
}

/// Besov quasi-norm through best piecewise-constant approximation.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_a_norm(f: *const HbFunction, prm: *const HbParams, out: *mut f64) -> i32 {
    guard(|| {
        let f = &deref(f, "f")?.0;
        let prm = params(deref(prm, "prm")?)?;
        write(out, a_norm(f, &prm)?)
    })
}

/// Besov quasi-norm through the modulus of smoothness (finite `q`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_b_norm_modulus(f: *const HbFunction, prm: *const HbParams, out: *mut f64) -> i32 {
    guard(|| {
        let f = &deref(f, "f")?.0;
        let prm = params(deref(prm, "prm")?)?;
        write(out, b_norm_modulus(f, &prm)?)
    })
}

/// # Safety
/// `f` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hb_analyze(f: *const HbFunction, out: *mut *mut HbCoefficients) -> i32 {
    guard(|| store(out, HbCoefficients(analyze(&deref(f, "f")?.0))))
}

/// Synthesizes at level `m`, which must be at least the deepest block.
///
/// # Safety
/// `c` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hb_synthesize(c: *const HbCoefficients, m: u32, out: *mut *mut HbFunction) -> i32 {
    guard(|| store(out, HbFunction(synthesize(&deref(c, "c")?.0, m)?)))
}

/// # Safety
/// `c` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hb_coefficients_free(c: *mut HbCoefficients) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Deepest block `K`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_coefficients_max_level(c: *const HbCoefficients, out: *mut u32) -> i32 {
    guard(|| write(out, deref(c, "c")?.0.max_level()))
}

/// Number of coefficients in block `k`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_coefficients_level_len(c: *const HbCoefficients, k: u32, out: *mut usize) -> i32 {
    guard(|| {
        let c = &deref(c, "c")?.0;
        if k > c.max_level() {
            return Err(Error::Parameter(format!("block {k} exceeds K = {}", c.max_level())).into());
        }
        write(out, c.level(k).len())
    })
}

/// Copies block `k` (storage order: parent lexicographic, then pattern) into `buf`.
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn hb_coefficients_level(c: *const HbCoefficients, k: u32, buf: *mut f64, len: usize) -> i32 {
    guard(|| {
        let c = &deref(c, "c")?.0;
        if k > c.max_level() {
            return Err(Error::Parameter(format!("block {k} exceeds K = {}", c.max_level())).into());
        }
        let lv = c.level(k);
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        if len != lv.len() {
            return Err(Error::Parameter(format!("buffer holds {len} values, block has {}", lv.len())).into());
        }
        ptr::copy_nonoverlapping(lv.as_ptr(), buf, len);
        Ok(())
    })
}

/// Weighted sequence quasi-norm of the coefficients.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_lqlp_norm(c: *const HbCoefficients, prm: *const HbParams, out: *mut f64) -> i32 {
    guard(|| {
        let c = &deref(c, "c")?.0;
        let prm = params(deref(prm, "prm")?)?;
        write(out, lqlp_norm(c, &prm)?)
    })
}

/// Writes one of the `HB_REGIME_*` codes.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hb_classify(prm: *const HbParams, system: i32, allow_degenerate: i32, out: *mut i32) -> i32 {
    guard(|| {
        let p = deref(prm, "prm")?;
        let prm = BesovParams::unrestricted(p.p, p.q, p.s, p.d as usize)?;
        let system = match system {
            HB_SYSTEM_ISOTROPIC => System::Isotropic,
            HB_SYSTEM_TENSOR => System::Tensor,
            other => return Err(Error::Parameter(format!("unknown system {other}")).into()),
        };
        let c = classify_with(&prm, system, allow_degenerate != 0)?;
        let code = match c.regime {
            Regime::UnconditionalBasis => HB_REGIME_UNCONDITIONAL_BASIS,
            Regime::ConditionalBasis => HB_REGIME_CONDITIONAL_BASIS,
            Regime::NotBasisTrivialDual => HB_REGIME_NOT_BASIS_TRIVIAL_DUAL,
            Regime::NotBasisUnboundedProjectors => HB_REGIME_NOT_BASIS_UNBOUNDED_PROJECTORS,
            Regime::NotBasisTensor => HB_REGIME_NOT_BASIS_TENSOR,
            Regime::DegenerateSpace => HB_REGIME_DEGENERATE_SPACE,
        };
        write(out, code)
    })
}
