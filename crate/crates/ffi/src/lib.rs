//! C ABI over the `boojum` crate.
//!
//! Parameters live behind an opaque [`BoojumParams`] handle. Every fallible
//! call returns a [`BoojumStatus`]; on anything other than `BOOJUM_OK` the
//! message is available from [`boojum_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use boojum::{
    BoojumError, EstimatorConfig, ImproperPolicy, MomentRequest, Pivot, PropernessReason,
};

/// Opaque parameter handle.
pub struct BoojumParams(boojum::BoojumParams);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoojumStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Improper = 3,
    Unsupported = 4,
    Resolution = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoojumReason {
    Proper = 0,
    RateNonpositive = 1,
    ShapeAtOrBelowMinusOne = 2,
    BoundaryTAtLeastOne = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BoojumVerdict {
    pub proper: bool,
    pub reason: BoojumReason,
    /// Whether `t_value` is meaningful (only when `m > 0` and all rates are positive).
    pub has_t_value: bool,
    pub t_value: f64,
}

/// Estimator settings. `rho <= 0` selects the automatic pivot.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BoojumEstimatorConfig {
    pub grid_n: usize,
    pub samples_p: usize,
    pub rho: f64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BoojumEstimate {
    pub log_z: f64,
    pub std_err: f64,
    /// The pivot actually used.
    pub rho: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &BoojumError) -> BoojumStatus {
    match err {
        BoojumError::Improper { .. } => BoojumStatus::Improper,
        BoojumError::UnsupportedOrder(_) => BoojumStatus::Unsupported,
        BoojumError::Resolution => BoojumStatus::Resolution,
        _ => BoojumStatus::InvalidArgument,
    }
}

struct Failure(BoojumStatus, String);

impl From<BoojumError> for Failure {
    fn from(e: BoojumError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BoojumStatus::NullPointer, format!("{what} is null"))
}

fn guard<F>(f: F) -> BoojumStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BoojumStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            BoojumStatus::Panic
        }
    }
}

unsafe fn handle<'a>(p: *const BoojumParams) -> Result<&'a boojum::BoojumParams, Failure> {
    p.as_ref().map(|h| &h.0).ok_or_else(|| null("params"))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn config(c: &BoojumEstimatorConfig) -> Result<EstimatorConfig, Failure> {
    let rho = if c.rho > 0.0 { Pivot::Fixed(c.rho) } else { Pivot::Auto };
    Ok(EstimatorConfig::new(c.grid_n, c.samples_p, rho, c.seed)?)
}

unsafe fn read_config(c: *const BoojumEstimatorConfig) -> Result<EstimatorConfig, Failure> {
    config(c.as_ref().ok_or_else(|| null("config"))?)
}

/// Message for the most recent failed call on this thread, or NULL. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn boojum_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Default estimator settings (grid 500, 2000 samples, automatic pivot, seed 0).
#[no_mangle]
pub extern "C" fn boojum_estimator_config_default() -> BoojumEstimatorConfig {
    let d = EstimatorConfig::default();
    BoojumEstimatorConfig { grid_n: d.grid_n, samples_p: d.samples_p, rho: 0.0, seed: d.seed }
}

/// Creates a parameter handle from `m` and `k` rates.
///
/// # Safety
/// `r` must point to `k` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_params_new(
    m: f64,
    r: *const f64,
    k: usize,
    out: *mut *mut BoojumParams,
) -> BoojumStatus {
    guard(|| {
        let rates = input(r, k, "r")?.to_vec();
        let params = boojum::BoojumParams::new(m, rates)?;
        write(out, Box::into_raw(Box::new(BoojumParams(params))), "out")
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `p` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn boojum_params_free(p: *mut BoojumParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of coordinates, or 0 for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn boojum_params_dim(p: *const BoojumParams) -> usize {
    p.as_ref().map_or(0, |h| h.0.dim())
}

/// Shape parameter `m`, or NaN for NULL.
///
/// # Safety
/// `p` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn boojum_params_m(p: *const BoojumParams) -> f64 {
    p.as_ref().map_or(f64::NAN, |h| h.0.m())
}

/// Copies the rates into `out` (holding `len >= dim` doubles).
///
/// # Safety
/// `p` must be a live handle and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn boojum_params_rates(
    p: *const BoojumParams,
    out: *mut f64,
    len: usize,
) -> BoojumStatus {
    guard(|| {
        let params = handle(p)?;
        copy_out(params.r(), out, len)
    })
}

unsafe fn copy_out(values: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if len < values.len() {
        return Err(Failure(
            BoojumStatus::InvalidArgument,
            format!("output buffer holds {len}, need {}", values.len()),
        ));
    }
    if out.is_null() {
        return Err(null("out"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_classify(
    p: *const BoojumParams,
    out: *mut BoojumVerdict,
) -> BoojumStatus {
    guard(|| {
        let v = handle(p)?.classify();
        let reason = match v.reason {
            PropernessReason::Proper => BoojumReason::Proper,
            PropernessReason::RateNonpositive => BoojumReason::RateNonpositive,
            PropernessReason::ShapeAtOrBelowMinusOne => BoojumReason::ShapeAtOrBelowMinusOne,
            PropernessReason::BoundaryTAtLeastOne => BoojumReason::BoundaryTAtLeastOne,
        };
        let verdict = BoojumVerdict {
            proper: v.proper,
            reason,
            has_t_value: v.t_value.is_some(),
            t_value: v.t_value.unwrap_or(f64::NAN),
        };
        write(out, verdict, "out")
    })
}

/// `1 - T` when `m > 0`; `*has_margin` is false otherwise.
///
/// # Safety
/// `p` must be a live handle; `margin` and `has_margin` writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_boundary_margin(
    p: *const BoojumParams,
    margin: *mut f64,
    has_margin: *mut bool,
) -> BoojumStatus {
    guard(|| {
        let value = boojum::boundary_margin(handle(p)?);
        write(has_margin, value.is_some(), "has_margin")?;
        write(margin, value.unwrap_or(f64::NAN), "margin")
    })
}

/// Estimates `log Z`. Improper parameters give `BOOJUM_IMPROPER` unless
/// `allow_improper` is set.
///
/// # Safety
/// `p` must be a live handle, `cfg` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_estimate_log_z(
    p: *const BoojumParams,
    cfg: *const BoojumEstimatorConfig,
    allow_improper: bool,
    out: *mut BoojumEstimate,
) -> BoojumStatus {
    guard(|| {
        let params = handle(p)?;
        let config = read_config(cfg)?;
        let policy = if allow_improper { ImproperPolicy::Allow } else { ImproperPolicy::Reject };
        let est = boojum::estimate_log_z(params, &config, policy)?;
        let value = BoojumEstimate { log_z: est.log_z, std_err: est.std_err, rho: est.config.rho };
        write(out, value, "out")
    })
}

/// Conjugate update with `n_obs` observations stored row-major in `ys`
/// (`n_obs * dim` doubles). Writes a new handle to `out`.
///
/// # Safety
/// `prior` must be a live handle, `ys` must hold `n_obs * dim` doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_posterior(
    prior: *const BoojumParams,
    ys: *const f64,
    n_obs: usize,
    out: *mut *mut BoojumParams,
) -> BoojumStatus {
    guard(|| {
        let prior = handle(prior)?;
        let k = prior.dim();
        let len = n_obs.checked_mul(k).ok_or_else(|| {
            Failure(BoojumStatus::InvalidArgument, "observation buffer size overflows".into())
        })?;
        let flat = input(ys, len, "ys")?;
        let obs = flat
            .chunks_exact(k)
            .map(|y| boojum::DirichletObservation::new(y.to_vec()))
            .collect::<Result<Vec<_>, _>>()?;
        let post = boojum::posterior(prior, &obs)?;
        write(out, Box::into_raw(Box::new(BoojumParams(post))), "out")
    })
}

/// Writes `E[x]` into `out` (holding `len >= dim` doubles).
///
/// # Safety
/// `p` must be a live handle, `cfg` readable and `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn boojum_mean(
    p: *const BoojumParams,
    cfg: *const BoojumEstimatorConfig,
    out: *mut f64,
    len: usize,
) -> BoojumStatus {
    guard(|| {
        let params = handle(p)?;
        let config = read_config(cfg)?;
        let mean = boojum::mean(params, &config)?;
        copy_out(&mean, out, len)
    })
}

/// Mixed moment `E[Π x_k^{order_k}]` for total order at most 2.
///
/// # Safety
/// `p` must be a live handle, `order` must hold `dim` entries, `cfg`
/// readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_moment(
    p: *const BoojumParams,
    order: *const u32,
    cfg: *const BoojumEstimatorConfig,
    out: *mut f64,
) -> BoojumStatus {
    guard(|| {
        let params = handle(p)?;
        if order.is_null() {
            return Err(null("order"));
        }
        let order = slice::from_raw_parts(order, params.dim()).to_vec();
        let req = MomentRequest::new(order)?;
        let config = read_config(cfg)?;
        write(out, boojum::moment(params, &req, &config)?, "out")
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_log_gamma(x: f64, out: *mut f64) -> BoojumStatus {
    guard(|| write(out, boojum::log_gamma(x)?, "out"))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn boojum_digamma(x: f64, out: *mut f64) -> BoojumStatus {
    guard(|| write(out, boojum::digamma(x)?, "out"))
}
