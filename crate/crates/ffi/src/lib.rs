//! C ABI over `tfrotor`.
//!
//! Objects are opaque handles created by `tfr_*_new`/`tfr_*_generate` and
//! released by the matching `tfr_*_free`. Every fallible call returns a
//! [`TfrStatus`]; on failure [`tfr_last_error`] gives a message for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use tfrotor::measure::{psi_eps, PsiMode};
use tfrotor::metaplectic::apply_torus;
use tfrotor::norms::{self, NormReport};
use tfrotor::sampling::{Group, SamplerConfig};
use tfrotor::symplectic::TorusElement;
use tfrotor::{Error, Grid, Signal, SignalSpec};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    InvalidSignal = 4,
    NumericalFailure = 5,
    Panic = 6,
}

/// M^p characterization used by [`tfr_mp_norm`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfrMethod {
    Stft = 0,
    Rotation = 1,
    RotationFreq = 2,
    Torus = 3,
    TorusFreq = 4,
    SupRotation = 5,
    SupRotationFreq = 6,
    SupTorus = 7,
    SupTorusFreq = 8,
}

/// Averaging group for [`tfr_psi_eps`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfrGroup {
    Rotation = 0,
    Torus = 1,
}

/// Estimator for [`tfr_psi_eps`]. `Auto` picks the exact route when one exists.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfrPsiMode {
    Auto = 0,
    MonteCarlo = 1,
    ClosedForm = 2,
    Quadrature = 3,
}

/// Result of a norm or Ψ_ε evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfrEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Opaque sampling grid.
pub struct TfrGrid {
    inner: Grid,
}

/// Opaque sampled signal.
pub struct TfrSignal {
    inner: Signal,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TfrStatus {
    match e {
        Error::InvalidGrid(_) | Error::GridMismatch => TfrStatus::InvalidGrid,
        Error::InvalidSignal(_) | Error::SupportViolation(_) | Error::Parse(_) | Error::Io(_) => TfrStatus::InvalidSignal,
        Error::NonUnitary(_) | Error::SingularB(_) | Error::SingularL(_) | Error::FactorizationFailed(_) => TfrStatus::NumericalFailure,
        _ => TfrStatus::InvalidArgument,
    }
}

struct Failure(TfrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(TfrStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> TfrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TfrStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TfrStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Message for the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn tfr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Grid with `n` axes, `size` points per axis and side length `side`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tfr_grid_new(n: usize, size: usize, side: f64, out_grid: *mut *mut TfrGrid) -> TfrStatus {
    guard(|| {
        let slot = out(out_grid, "out_grid")?;
        let grid = Grid::new(n, size, side)?;
        *slot = Box::into_raw(Box::new(TfrGrid { inner: grid }));
        Ok(())
    })
}

/// Default self-dual grid for dimension `n` (1 or 2).
///
/// # Safety
/// `out_grid` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tfr_grid_default(n: usize, out_grid: *mut *mut TfrGrid) -> TfrStatus {
    guard(|| {
        let slot = out(out_grid, "out_grid")?;
        *slot = Box::into_raw(Box::new(TfrGrid { inner: Grid::default_for(n)? }));
        Ok(())
    })
}

/// # Safety
/// `grid` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn tfr_grid_free(grid: *mut TfrGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of samples of a signal on this grid (N^n), 0 for NULL.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tfr_grid_len(grid: *const TfrGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.inner.len())
}

/// Sample a named test signal such as `"hermite(1)"` or `"chirped-gaussian(0.5)"`.
///
/// # Safety
/// `grid` must be a live handle, `spec` a NUL-terminated string, `out_signal` valid.
#[no_mangle]
pub unsafe extern "C" fn tfr_signal_generate(grid: *const TfrGrid, spec: *const c_char, out_signal: *mut *mut TfrSignal) -> TfrStatus {
    guard(|| {
        let grid = grid.as_ref().ok_or_else(|| null("grid"))?;
        if spec.is_null() {
            return Err(null("spec"));
        }
        let text = CStr::from_ptr(spec).to_str().map_err(|_| Failure(TfrStatus::InvalidArgument, "spec is not UTF-8".into()))?;
        let slot = out(out_signal, "out_signal")?;
        let spec: SignalSpec = text.parse()?;
        *slot = Box::into_raw(Box::new(TfrSignal { inner: spec.generate(&grid.inner)? }));
        Ok(())
    })
}

/// Signal from `len` = N^n samples given as separate real and imaginary arrays, row-major.
///
/// # Safety
/// `re` and `im` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tfr_signal_from_values(
    grid: *const TfrGrid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out_signal: *mut *mut TfrSignal,
) -> TfrStatus {
    guard(|| {
        let grid = grid.as_ref().ok_or_else(|| null("grid"))?;
        let (re, im) = (slice(re, len, "re")?, slice(im, len, "im")?);
        let slot = out(out_signal, "out_signal")?;
        let values = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        *slot = Box::into_raw(Box::new(TfrSignal { inner: Signal::new(grid.inner, values)? }));
        Ok(())
    })
}

/// # Safety
/// `signal` must come from this library and not be freed twice. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn tfr_signal_free(signal: *mut TfrSignal) {
    if !signal.is_null() {
        drop(Box::from_raw(signal));
    }
}

/// Number of samples, 0 for NULL.
///
/// # Safety
/// `signal` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tfr_signal_len(signal: *const TfrSignal) -> usize {
    signal.as_ref().map_or(0, |s| s.inner.values().len())
}

/// Copy samples into caller buffers of length `len`, which must equal [`tfr_signal_len`].
///
/// # Safety
/// `re` and `im` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tfr_signal_copy_values(signal: *const TfrSignal, re: *mut f64, im: *mut f64, len: usize) -> TfrStatus {
    guard(|| {
        let s = signal.as_ref().ok_or_else(|| null("signal"))?;
        let values = s.inner.values();
        if len != values.len() {
            return Err(Failure(TfrStatus::InvalidArgument, format!("buffer length {len}, signal has {}", values.len())));
        }
        if re.is_null() || im.is_null() {
            return Err(null("output buffer"));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len));
        for (k, v) in values.iter().enumerate() {
            re[k] = v.re;
            im[k] = v.im;
        }
        Ok(())
    })
}

/// L² norm of a signal, NaN for NULL.
///
/// # Safety
/// `signal` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tfr_signal_l2_norm(signal: *const TfrSignal) -> f64 {
    signal.as_ref().map_or(f64::NAN, |s| s.inner.l2_norm())
}

/// Partial fractional Fourier transform with one angle per axis (`count` = n).
///
/// # Safety
/// `thetas` must point to `count` doubles.
#[no_mangle]
pub unsafe extern "C" fn tfr_frft(signal: *const TfrSignal, thetas: *const f64, count: usize, out_signal: *mut *mut TfrSignal) -> TfrStatus {
    guard(|| {
        let s = signal.as_ref().ok_or_else(|| null("signal"))?;
        let thetas = slice(thetas, count, "thetas")?;
        let slot = out(out_signal, "out_signal")?;
        if count != s.inner.grid().n() {
            return Err(Failure(TfrStatus::InvalidArgument, format!("expected {} angles, got {count}", s.inner.grid().n())));
        }
        let t = TorusElement::new(thetas.to_vec())?;
        *slot = Box::into_raw(Box::new(TfrSignal { inner: apply_torus(&t, &s.inner)? }));
        Ok(())
    })
}

/// p-th power of the M^p norm (or the sup for p = ∞ / sup methods).
/// `seed` and `samples` only matter for rotation methods; `samples` = 0 picks the default.
///
/// # Safety
/// `out_estimate` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfr_mp_norm(
    signal: *const TfrSignal,
    method: TfrMethod,
    p: f64,
    seed: u64,
    samples: usize,
    out_estimate: *mut TfrEstimate,
) -> TfrStatus {
    guard(|| {
        let f = &signal.as_ref().ok_or_else(|| null("signal"))?.inner;
        let slot = out(out_estimate, "out_estimate")?;
        let cfg = |default: usize| SamplerConfig::new(seed, if samples == 0 { default } else { samples });
        let r: NormReport = match method {
            TfrMethod::Stft => norms::mp_norm_stft(f, p)?,
            TfrMethod::Rotation => norms::rotation_functional(f, p, &cfg(200)?)?,
            TfrMethod::RotationFreq => norms::rotation_functional_freq(f, p, &cfg(200)?)?,
            TfrMethod::Torus => norms::torus_functional(f, p)?,
            TfrMethod::TorusFreq => norms::torus_functional_freq(f, p)?,
            TfrMethod::SupRotation => norms::sup_rotation(f, &cfg(500)?)?,
            TfrMethod::SupRotationFreq => norms::sup_rotation_freq(f, &cfg(500)?)?,
            TfrMethod::SupTorus => norms::sup_torus(f)?,
            TfrMethod::SupTorusFreq => norms::sup_torus_freq(f)?,
        };
        *slot = TfrEstimate { value: r.value, std_error: r.stderr };
        Ok(())
    })
}

/// Ψ_ε at the phase-space point `z` (length 2n, ordered x then ξ).
///
/// # Safety
/// `z` must point to `len` doubles and `out_estimate` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfr_psi_eps(
    z: *const f64,
    len: usize,
    eps: f64,
    group: TfrGroup,
    mode: TfrPsiMode,
    seed: u64,
    samples: usize,
    out_estimate: *mut TfrEstimate,
) -> TfrStatus {
    guard(|| {
        let z = slice(z, len, "z")?;
        let slot = out(out_estimate, "out_estimate")?;
        let group = match group {
            TfrGroup::Rotation => Group::Rotation,
            TfrGroup::Torus => Group::Torus,
        };
        let mode = match (mode, group) {
            (TfrPsiMode::Auto, Group::Torus) => PsiMode::TorusClosedForm,
            (TfrPsiMode::Auto, Group::Rotation) if len == 2 => PsiMode::Quadrature,
            (TfrPsiMode::Auto, Group::Rotation) | (TfrPsiMode::MonteCarlo, _) => PsiMode::MonteCarlo,
            (TfrPsiMode::ClosedForm, _) => PsiMode::TorusClosedForm,
            (TfrPsiMode::Quadrature, _) => PsiMode::Quadrature,
        };
        let cfg = SamplerConfig::new(seed, if samples == 0 { 20_000 } else { samples })?;
        let e = psi_eps(z, eps, group, mode, &cfg)?;
        *slot = TfrEstimate { value: e.value, std_error: e.stderr };
        Ok(())
    })
}
