//! C ABI over canard-core.
//!
//! Every entry point returns a [`CanardStatus`]. On failure a description is
//! kept per thread and can be read with [`canard_last_error_message`]. Owned
//! objects are opaque handles released by their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use canard_core::complex_ode::{integrate_along_path, FieldKind, IntegratorConfig, OdeField};
use canard_core::formal_canard::{vdp_bn, vdp_series, VdpSeries};
use canard_core::inner_stokes::{brusselator_stokes_diff, vdp_stokes_diff, StokesDiff};
use canard_core::relief::{descent_check, relief_value, ComplexPath, ReliefSpec};
use canard_core::shooter::{
    brusselator_stokes_observable, find_brusselator_a, find_vdp_alpha, vdp_stokes_observable, ShootConfig,
};
use num_complex::Complex64;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanardStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ComputationFailed = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CanardComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for CanardComplex {
    fn from(z: Complex64) -> Self {
        CanardComplex { re: z.re, im: z.im }
    }
}

impl From<CanardComplex> for Complex64 {
    fn from(z: CanardComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CanardShootResult {
    pub parameter: CanardComplex,
    /// Scaled observable 2ℑ(p)·e^{k/ε}·ε^m for the chosen system.
    pub observable: f64,
    pub residual: f64,
    pub iterations: u32,
    pub precision_digits: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CanardStokesDiff {
    pub x: f64,
    pub diff: CanardComplex,
    pub formula: f64,
    pub ratio: f64,
    pub digits: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanardReliefKind {
    Vdp = 0,
    Brusselator = 1,
    Quadratic = 2,
}

/// Exact Van der Pol coefficients a_0..a_n and functions v_0..v_n.
pub struct CanardVdpSeries(VdpSeries);

/// A relief R(x) = ℜ(e^{−iθ}F(x)).
pub struct CanardRelief(ReliefSpec);

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| {
        let mut e = e.borrow_mut();
        e.clear();
        e.extend(msg.bytes().filter(|&b| b != 0));
    });
}

struct Fail(CanardStatus, String);

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(CanardStatus::InvalidArgument, msg.into())
}

fn failed(e: impl std::fmt::Display) -> Fail {
    Fail(CanardStatus::ComputationFailed, e.to_string())
}

fn null(name: &str) -> Fail {
    Fail(CanardStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, turning errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CanardStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CanardStatus::Ok
        }
        Ok(Err(Fail(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            CanardStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn handle<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

/// Copies `s` plus a terminating NUL into `buf`. `needed` (optional)
/// receives the full size including the NUL.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), Fail> {
    if let Some(n) = needed.as_mut() {
        *n = s.len() + 1;
    }
    if buf.is_null() {
        return if len == 0 { Ok(()) } else { Err(null("buf")) };
    }
    if len < s.len() + 1 {
        return Err(Fail(CanardStatus::BufferTooSmall, format!("buffer of {len} bytes, need {}", s.len() + 1)));
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn canard_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Size in bytes (including the NUL) of the last error message on this thread.
#[no_mangle]
pub extern "C" fn canard_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len() + 1)
}

/// Copies the last error message on this thread into `buf`.
///
/// # Safety
/// `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn canard_last_error_message(buf: *mut c_char, len: usize) -> CanardStatus {
    let msg = LAST_ERROR.with(|e| String::from_utf8_lossy(&e.borrow()).into_owned());
    match write_str(&msg, buf, len, ptr::null_mut()) {
        Ok(()) => CanardStatus::Ok,
        Err(Fail(code, _)) => code,
    }
}

/// Computes a_0..a_n exactly. Release the handle with `canard_vdp_series_free`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn canard_vdp_series_new(n: usize, out: *mut *mut CanardVdpSeries) -> CanardStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        let s = vdp_series(n).map_err(failed)?;
        *slot = Box::into_raw(Box::new(CanardVdpSeries(s)));
        Ok(())
    })
}

/// # Safety
/// `series` must come from `canard_vdp_series_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn canard_vdp_series_free(series: *mut CanardVdpSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Highest index n held by the series.
///
/// # Safety
/// `series` must be a live handle; `n` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn canard_vdp_series_order(series: *const CanardVdpSeries, n: *mut usize) -> CanardStatus {
    guard(|| {
        *out(n, "n")? = handle(series, "series")?.0.order();
        Ok(())
    })
}

/// a_k as a "num/den" string. Pass `buf = NULL, len = 0` to query the size
/// through `needed`.
///
/// # Safety
/// `series` must be a live handle; `buf` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn canard_vdp_series_coefficient(
    series: *const CanardVdpSeries,
    k: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> CanardStatus {
    guard(|| {
        let s = &handle(series, "series")?.0;
        let a = s.a.get(k).ok_or_else(|| invalid(format!("index {k} above order {}", s.order())))?;
        write_str(&a.to_string(), buf, len, needed)
    })
}

/// b_n = a_n (4e/(3n))ⁿ in double precision.
///
/// # Safety
/// `series` must be a live handle; `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn canard_vdp_series_bn(series: *const CanardVdpSeries, n: usize, value: *mut f64) -> CanardStatus {
    guard(|| {
        let s = &handle(series, "series")?.0;
        let slot = out(value, "value")?;
        *slot = vdp_bn(s, n, 17).map_err(failed)?.to_f64();
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn canard_relief_new(kind: CanardReliefKind, theta: f64, out: *mut *mut CanardRelief) -> CanardStatus {
    guard(|| {
        let slot = self::out(out, "out")?;
        *slot = ptr::null_mut();
        if !theta.is_finite() {
            return Err(invalid("theta must be finite"));
        }
        let spec = match kind {
            CanardReliefKind::Vdp => ReliefSpec::vdp(),
            CanardReliefKind::Brusselator => ReliefSpec::brusselator(),
            CanardReliefKind::Quadratic => ReliefSpec::quadratic(),
        };
        *slot = Box::into_raw(Box::new(CanardRelief(spec.with_theta(theta))));
        Ok(())
    })
}

/// # Safety
/// `relief` must come from `canard_relief_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn canard_relief_free(relief: *mut CanardRelief) {
    if !relief.is_null() {
        drop(Box::from_raw(relief));
    }
}

/// # Safety
/// `relief` must be a live handle; `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn canard_relief_value(relief: *const CanardRelief, x: CanardComplex, value: *mut f64) -> CanardStatus {
    guard(|| {
        *out(value, "value")? = relief_value(&handle(relief, "relief")?.0, x.into());
        Ok(())
    })
}

unsafe fn path_from(points: *const CanardComplex, n: usize) -> Result<ComplexPath, Fail> {
    if points.is_null() {
        return Err(null("points"));
    }
    let v: Vec<Complex64> = std::slice::from_raw_parts(points, n).iter().map(|&z| z.into()).collect();
    ComplexPath::new(v).map_err(|e| invalid(e.to_string()))
}

/// Sampled descent constant of the polyline through `points`.
///
/// # Safety
/// `relief` must be a live handle; `points` must hold `n` elements; the
/// output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn canard_relief_descent_check(
    relief: *const CanardRelief,
    points: *const CanardComplex,
    n: usize,
    constant: *mut f64,
    descending: *mut bool,
) -> CanardStatus {
    guard(|| {
        let spec = &handle(relief, "relief")?.0;
        let c = out(constant, "constant")?;
        let d = out(descending, "descending")?;
        let cert = descent_check(spec, &path_from(points, n)?).map_err(failed)?;
        *c = cert.c;
        *d = cert.descending;
        Ok(())
    })
}

/// Integrates a named field along the polyline and stores y at its end.
/// `field` is one of the CLI field names; `param` is α, a or λ.
///
/// # Safety
/// `field` must be a NUL-terminated string; `points` must hold `n` elements;
/// `end` must be valid.
#[no_mangle]
pub unsafe extern "C" fn canard_integrate(
    field: *const c_char,
    eps: CanardComplex,
    param: CanardComplex,
    points: *const CanardComplex,
    n: usize,
    y0: CanardComplex,
    tol: f64,
    precision_digits: u32,
    end: *mut CanardComplex,
) -> CanardStatus {
    guard(|| {
        if field.is_null() {
            return Err(null("field"));
        }
        let name = CStr::from_ptr(field).to_str().map_err(|_| invalid("field name is not UTF-8"))?;
        let kind = FieldKind::parse(name).ok_or_else(|| invalid(format!("unknown field '{name}'")))?;
        if kind == FieldKind::UserPolynomial {
            return Err(invalid("user-polynomial fields are not available through this entry point"));
        }
        let slot = out(end, "end")?;
        let cfg = IntegratorConfig { precision_digits: precision_digits.max(16), ..IntegratorConfig::with_tol(tol) };
        cfg.validate().map_err(|e| invalid(e.to_string()))?;
        let path = path_from(points, n)?;
        let t = integrate_along_path(&OdeField::new(kind, eps.into(), param.into()), &path, y0.into(), &cfg).map_err(failed)?;
        *slot = t.end_value.into();
        Ok(())
    })
}

fn shoot_impl(eps: f64, digits: u32, brusselator: bool, result: *mut CanardShootResult) -> Result<(), Fail> {
    let slot = unsafe { out(result, "result")? };
    let cfg = ShootConfig { precision_digits: (digits != 0).then_some(digits), ..Default::default() };
    let r = if brusselator { find_brusselator_a(eps, &cfg) } else { find_vdp_alpha(eps, &cfg) }.map_err(failed)?;
    let obs = if brusselator { brusselator_stokes_observable(eps, &r) } else { vdp_stokes_observable(eps, &r) };
    *slot = CanardShootResult {
        parameter: r.parameter.into(),
        observable: obs,
        residual: r.residual.norm(),
        iterations: r.iterations as u32,
        precision_digits: r.precision_digits,
    };
    Ok(())
}

/// Canard value α⁺(ε) of the Van der Pol equation. `digits = 0` picks the
/// precision automatically.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn canard_shoot_vdp(eps: f64, digits: u32, result: *mut CanardShootResult) -> CanardStatus {
    guard(|| shoot_impl(eps, digits, false, result))
}

/// Canard value a⁺(ε) of the Brusselator.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn canard_shoot_brusselator(eps: f64, digits: u32, result: *mut CanardShootResult) -> CanardStatus {
    guard(|| shoot_impl(eps, digits, true, result))
}

fn stokes_impl(x: f64, digits: u32, brusselator: bool, result: *mut CanardStokesDiff) -> Result<(), Fail> {
    let slot = unsafe { out(result, "result")? };
    let d = (digits != 0).then_some(digits);
    let s: StokesDiff = if brusselator { brusselator_stokes_diff(x, d) } else { vdp_stokes_diff(x, d) }.map_err(failed)?;
    *slot = CanardStokesDiff { x: s.x, diff: s.diff.into(), formula: s.formula, ratio: s.ratio, digits: s.digits };
    Ok(())
}

/// Y₀⁺ − Y₀⁻ of the Van der Pol inner equation at real X.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn canard_vdp_stokes_diff(x: f64, digits: u32, result: *mut CanardStokesDiff) -> CanardStatus {
    guard(|| stokes_impl(x, digits, false, result))
}

/// Y₀⁺ − Y₀⁻ of the Brusselator inner equation at real X.
///
/// # Safety
/// `result` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn canard_brusselator_stokes_diff(x: f64, digits: u32, result: *mut CanardStokesDiff) -> CanardStatus {
    guard(|| stokes_impl(x, digits, true, result))
}
