//! C ABI for the `bopert` toolkit.
//!
//! Objects are exposed as opaque handles created by `bopert_*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`BopertStatus`]; on failure a description is available from
//! [`bopert_last_error`] on the same thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bopert::evolution::{standard_initial_data, SolverConfig};
use bopert::lax::{beta, beta_s, build_lax, dbeta, eigen_gaps, kappa_threshold};
use bopert::multipliers::{ilw_boosted_symbol, ilw_full_symbol, rayleigh_symbol, smith_symbol, zero_symbol};
use bopert::spectral::{analyze, sobolev_norm, synthesize};
use bopert::{Complex64, Error, MultiplierSymbol, TorusField, Trajectory};

/// Real field on the torus, Fourier modes `0..=N`.
pub struct BopertField(TorusField);

/// Fourier multiplier symbol.
pub struct BopertSymbol(MultiplierSymbol);

/// Sampled solution of an evolution.
pub struct BopertTrajectory(Trajectory);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BopertStatus {
    Ok = 0,
    NullPointer,
    InvalidArgument,
    BufferTooSmall,
    SampleCountTooSmall,
    RealnessViolation,
    KappaOutOfRange,
    NonpositiveDepth,
    AsymmetricSymbol,
    MeanResidual,
    BlowupDetected,
    NotPositiveDefinite,
    ThresholdNotFound,
    QuadratureNotConverged,
    CountExceedsDim,
    Format,
    Config,
    Io,
    Panic,
}

impl From<&Error> for BopertStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::SampleCountTooSmall { .. } => BopertStatus::SampleCountTooSmall,
            Error::RealnessViolation { .. } => BopertStatus::RealnessViolation,
            Error::KappaOutOfRange(_) => BopertStatus::KappaOutOfRange,
            Error::NonpositiveDepth(_) => BopertStatus::NonpositiveDepth,
            Error::AsymmetricSymbol { .. } => BopertStatus::AsymmetricSymbol,
            Error::MeanResidual(_) => BopertStatus::MeanResidual,
            Error::BlowupDetected { .. } => BopertStatus::BlowupDetected,
            Error::NotPositiveDefinite(_) => BopertStatus::NotPositiveDefinite,
            Error::ThresholdNotFound(_) => BopertStatus::ThresholdNotFound,
            Error::QuadratureNotConverged(_) => BopertStatus::QuadratureNotConverged,
            Error::CountExceedsDim { .. } => BopertStatus::CountExceedsDim,
            Error::InvalidArgument(_) => BopertStatus::InvalidArgument,
            Error::Format(_) | Error::Json(_) | Error::Csv(_) => BopertStatus::Format,
            Error::Config(_) => BopertStatus::Config,
            Error::Io(_) => BopertStatus::Io,
        }
    }
}

/// Solver settings; start from [`bopert_solver_params_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct BopertSolverParams {
    pub modes: usize,
    pub dt: f64,
    pub horizon: f64,
    pub dealias_fraction: f64,
    pub sample_every: usize,
    pub nonlinear: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

enum Failure {
    Status(BopertStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn fail(status: BopertStatus, msg: &str) -> Failure {
    Failure::Status(status, msg.to_string())
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> BopertStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            BopertStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            BopertStatus::from(&e)
        }
        Ok(Err(Failure::Status(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            BopertStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(BopertStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| fail(BopertStatus::NullPointer, &format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(BopertStatus::NullPointer, &format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len < need {
        return Err(fail(
            BopertStatus::BufferTooSmall,
            &format!("{what} holds {len} values, {need} needed"),
        ));
    }
    if p.is_null() {
        return Err(fail(BopertStatus::NullPointer, &format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bopert_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next `bopert_*` call on the same thread.
#[no_mangle]
pub extern "C" fn bopert_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds a field from coefficients `re[n] + i im[n]`, `n = 0..len`, with `len >= 2`.
///
/// # Safety
/// `re` and `im` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_new(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut BopertField,
) -> BopertStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (re, im) = (slice(re, len, "re")?, slice(im, len, "im")?);
        let coeffs = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        *out = boxed(BopertField(TorusField::from_coeffs(coeffs)?));
        Ok(())
    })
}

/// Analyzes `len` uniform samples on `[0, 2π)` into modes `0..=modes`.
///
/// # Safety
/// `samples` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_from_samples(
    samples: *const f64,
    len: usize,
    modes: usize,
    out: *mut *mut BopertField,
) -> BopertStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed(BopertField(analyze(slice(samples, len, "samples")?, modes)?));
        Ok(())
    })
}

/// `2cos x + 0.5 sin 2x` on `modes >= 2` modes.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_standard(modes: usize, out: *mut *mut BopertField) -> BopertStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if modes < 2 {
            return Err(fail(BopertStatus::InvalidArgument, "modes must be at least 2"));
        }
        *out = boxed(BopertField(standard_initial_data(modes)));
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_free(field: *mut BopertField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Highest retained mode `N`, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_modes(field: *const BopertField) -> usize {
    field.as_ref().map_or(0, |f| f.0.modes())
}

/// Copies coefficients `0..=N` into `re`/`im`, each of capacity `len >= N + 1`.
///
/// # Safety
/// `field` must be live; `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_coeffs(
    field: *const BopertField,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> BopertStatus {
    guard(|| {
        let f = &deref(field, "field")?.0;
        let need = f.modes() + 1;
        let re = slice_mut(re, len, need, "re")?;
        let im = slice_mut(im, len, need, "im")?;
        for (i, c) in f.coeffs().iter().enumerate() {
            re[i] = c.re;
            im[i] = c.im;
        }
        Ok(())
    })
}

/// Samples the field on `points >= 2N + 1` uniform points into `out`.
///
/// # Safety
/// `field` must be live; `out` must point to `len >= points` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_synthesize(
    field: *const BopertField,
    points: usize,
    out: *mut f64,
    len: usize,
) -> BopertStatus {
    guard(|| {
        let f = &deref(field, "field")?.0;
        let out = slice_mut(out, len, points, "out")?;
        out[..points].copy_from_slice(&synthesize(f, points)?);
        Ok(())
    })
}

/// `(Σ |f̂(n)|² (|n| + κ)^{2r})^{1/2}`.
///
/// # Safety
/// `field` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_field_sobolev_norm(
    field: *const BopertField,
    r: f64,
    kappa: f64,
    out: *mut f64,
) -> BopertStatus {
    guard(|| {
        let f = &deref(field, "field")?.0;
        *out_ref(out, "out")? = sobolev_norm(f, r, kappa)?;
        Ok(())
    })
}

unsafe fn new_symbol(
    out: *mut *mut BopertSymbol,
    make: impl FnOnce() -> bopert::Result<MultiplierSymbol>,
) -> BopertStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = boxed(BopertSymbol(make()?));
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_symbol_zero(out: *mut *mut BopertSymbol) -> BopertStatus {
    new_symbol(out, || Ok(zero_symbol()))
}

/// Constant symbol `a(n) = gamma`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_symbol_rayleigh(gamma: f64, out: *mut *mut BopertSymbol) -> BopertStatus {
    new_symbol(out, || Ok(rayleigh_symbol(gamma)))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_symbol_ilw_full(delta: f64, out: *mut *mut BopertSymbol) -> BopertStatus {
    new_symbol(out, || ilw_full_symbol(delta))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_symbol_ilw_boosted(delta: f64, out: *mut *mut BopertSymbol) -> BopertStatus {
    new_symbol(out, || ilw_boosted_symbol(delta))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_symbol_smith(out: *mut *mut BopertSymbol) -> BopertStatus {
    new_symbol(out, || Ok(smith_symbol()))
}

/// # Safety
/// `symbol` must be live; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_symbol_eval(
    symbol: *const BopertSymbol,
    n: i64,
    re: *mut f64,
    im: *mut f64,
) -> BopertStatus {
    guard(|| {
        let a = deref(symbol, "symbol")?.0.eval(n);
        *out_ref(re, "re")? = a.re;
        *out_ref(im, "im")? = a.im;
        Ok(())
    })
}

/// # Safety
/// `symbol` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bopert_symbol_free(symbol: *mut BopertSymbol) {
    if !symbol.is_null() {
        drop(Box::from_raw(symbol));
    }
}

/// Defaults for `modes`: dt 1e-3, horizon 1, 2/3 dealiasing, every step sampled.
#[no_mangle]
pub extern "C" fn bopert_solver_params_default(modes: usize) -> BopertSolverParams {
    let cfg = SolverConfig::new(modes, zero_symbol());
    BopertSolverParams {
        modes,
        dt: cfg.dt,
        horizon: cfg.horizon,
        dealias_fraction: cfg.dealias_fraction,
        sample_every: cfg.sample_every,
        nonlinear: cfg.nonlinearity_enabled,
    }
}

/// Integrates `u_t = H u_xx - 2 u u_x + A u` from `u0`.
///
/// # Safety
/// `u0`, `symbol` and `params` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_evolve(
    u0: *const BopertField,
    symbol: *const BopertSymbol,
    params: *const BopertSolverParams,
    out: *mut *mut BopertTrajectory,
) -> BopertStatus {
    guard(|| {
        let u0 = &deref(u0, "u0")?.0;
        let sym = &deref(symbol, "symbol")?.0;
        let p = deref(params, "params")?;
        let out = out_ref(out, "out")?;
        let mut cfg = SolverConfig::new(p.modes, sym.clone());
        cfg.dt = p.dt;
        cfg.horizon = p.horizon;
        cfg.dealias_fraction = p.dealias_fraction;
        cfg.sample_every = p.sample_every;
        cfg.nonlinearity_enabled = p.nonlinear;
        *out = boxed(BopertTrajectory(bopert::evolve(u0, &cfg)?));
        Ok(())
    })
}

/// Number of stored samples, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bopert_trajectory_len(traj: *const BopertTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `traj` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_trajectory_time(
    traj: *const BopertTrajectory,
    index: usize,
    out: *mut f64,
) -> BopertStatus {
    guard(|| {
        let t = &deref(traj, "traj")?.0;
        let time = *t
            .times
            .get(index)
            .ok_or_else(|| fail(BopertStatus::InvalidArgument, "sample index out of range"))?;
        *out_ref(out, "out")? = time;
        Ok(())
    })
}

/// Copies sample `index` into a new field handle owned by the caller.
///
/// # Safety
/// `traj` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_trajectory_state(
    traj: *const BopertTrajectory,
    index: usize,
    out: *mut *mut BopertField,
) -> BopertStatus {
    guard(|| {
        let t = &deref(traj, "traj")?.0;
        let state = t
            .states
            .get(index)
            .ok_or_else(|| fail(BopertStatus::InvalidArgument, "sample index out of range"))?;
        *out_ref(out, "out")? = boxed(BopertField(state.clone()));
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bopert_trajectory_free(traj: *mut BopertTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// `β(κ; u)` with Lax truncation `dim`.
///
/// # Safety
/// `u` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_beta(u: *const BopertField, kappa: f64, dim: usize, out: *mut f64) -> BopertStatus {
    guard(|| {
        *out_ref(out, "out")? = beta(&deref(u, "u")?.0, kappa, dim)?;
        Ok(())
    })
}

/// `β_s(κ; u)` for `-1/2 < s < 0`.
///
/// # Safety
/// `u` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_beta_s(
    u: *const BopertField,
    s: f64,
    kappa: f64,
    dim: usize,
    out: *mut f64,
) -> BopertStatus {
    guard(|| {
        *out_ref(out, "out")? = beta_s(&deref(u, "u")?.0, s, kappa, dim)?;
        Ok(())
    })
}

/// Derivative of `β(κ; ·)` at `u` in direction `f`.
///
/// # Safety
/// `u` and `f` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_dbeta(
    u: *const BopertField,
    kappa: f64,
    f: *const BopertField,
    dim: usize,
    out: *mut f64,
) -> BopertStatus {
    guard(|| {
        *out_ref(out, "out")? = dbeta(&deref(u, "u")?.0, kappa, &deref(f, "f")?.0, dim)?;
        Ok(())
    })
}

/// Smallest `κ` in `1, 2, 4, ...` with `L_u + κ > 1/2`.
///
/// # Safety
/// `u` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bopert_kappa_threshold(
    u: *const BopertField,
    s: f64,
    dim: usize,
    out: *mut f64,
) -> BopertStatus {
    guard(|| {
        *out_ref(out, "out")? = kappa_threshold(&deref(u, "u")?.0, s, dim)?;
        Ok(())
    })
}

/// Writes `γ_n = λ_n - λ_{n-1} - 1`, `n = 1..=count`, of the zero-mean Lax matrix.
///
/// # Safety
/// `u` must be live; `out` must point to `len >= count` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bopert_eigen_gaps(
    u: *const BopertField,
    dim: usize,
    count: usize,
    out: *mut f64,
    len: usize,
) -> BopertStatus {
    guard(|| {
        let u = &deref(u, "u")?.0;
        let out = slice_mut(out, len, count, "out")?;
        let gaps = eigen_gaps(&build_lax(&u.zero_mean(), dim)?, count)?;
        out[..count].copy_from_slice(&gaps);
        Ok(())
    })
}
