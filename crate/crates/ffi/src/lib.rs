//! C ABI for `arwmass`.
//!
//! Objects are opaque handles created by `arw_*_new`-style constructors and
//! released with the matching `*_free`. Every fallible call returns an
//! [`ArwStatus`]; on failure [`arw_last_error`] describes the cause. Results
//! are written through out-pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use arwmass::expr::parse;
use arwmass::geometry::{ARWSpec, QuadratureGrid};
use arwmass::imcf::{imcf_run, Trajectory};
use arwmass::limits::geometric_schedule;
use arwmass::mass::{mass_limit, slab_balance, slice_mass_integral, MassReport};
use arwmass::sads::{as_arw_spec, SAdSParams};
use arwmass::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidSpec = 4,
    InvalidArgument = 5,
    Unsupported = 6,
    Numerical = 7,
    IndexOutOfRange = 8,
    Panic = 9,
}

/// An ARW spacetime.
pub struct ArwSpec(ARWSpec);

/// Samples and extrapolated limit of the mass integral.
pub struct ArwMassReport(MassReport);

/// An inverse mean curvature flow trajectory.
pub struct ArwTrajectory(Trajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ArwFlowState {
    pub t: f64,
    pub u: f64,
    pub mean_curvature: f64,
    pub f_of_u: f64,
    pub dfdt: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ArwSlabBalance {
    pub tau1: f64,
    pub tau2: f64,
    pub b1: f64,
    pub b2: f64,
    pub volume: f64,
    pub residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ArwStatus {
    match e {
        Error::Parse(_) => ArwStatus::Parse,
        Error::InvalidSpec(_) => ArwStatus::InvalidSpec,
        Error::InvalidArgument(_) | Error::InsufficientSamples { .. } => ArwStatus::InvalidArgument,
        Error::Unsupported(_) => ArwStatus::Unsupported,
        _ => ArwStatus::Numerical,
    }
}

struct Failure(ArwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ArwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ArwStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {message}"));
            ArwStatus::Panic
        }
    }
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(ArwStatus::NullPointer, format!("{what} is null")))
}

unsafe fn output<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(ArwStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(ArwStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(ArwStatus::InvalidUtf8, format!("{what}: {e}")))
}

fn grid(spec: &ARWSpec, nodes: usize) -> Result<QuadratureGrid, Failure> {
    Ok(QuadratureGrid::axisymmetric(spec.n(), nodes)?)
}

fn boxed<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    let slot = unsafe { output(out, "out")? };
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread, or null after a
/// success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn arw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn arw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The family `f = (1/γ̃) log(−kτ)` on `[a, 0) × S^n`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn arw_spec_rw_family(n: usize, omega: f64, k: f64, a: f64, out: *mut *mut ArwSpec) -> ArwStatus {
    guard(|| boxed(out, ArwSpec(ARWSpec::rw_family(n, omega, k, a)?)))
}

/// A spec from expressions: `f` in `tau`, `psi` and `lambda` in `tau`, `theta`.
///
/// # Safety
/// String arguments must be nul-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn arw_spec_custom(
    n: usize,
    omega: f64,
    f: *const c_char,
    psi: *const c_char,
    lambda: *const c_char,
    a: f64,
    out: *mut *mut ArwSpec,
) -> ArwStatus {
    guard(|| {
        let f = parse(text(f, "f")?).map_err(Error::from)?;
        let psi = parse(text(psi, "psi")?).map_err(Error::from)?;
        let lambda = parse(text(lambda, "lambda")?).map_err(Error::from)?;
        boxed(out, ArwSpec(ARWSpec::new(n, omega, f, psi, lambda, a)?))
    })
}

/// The Schwarzschild–anti-de Sitter brane in its ARW presentation.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn arw_spec_sads(n: usize, lambda: f64, mass: f64, out: *mut *mut ArwSpec) -> ArwStatus {
    guard(|| boxed(out, ArwSpec(as_arw_spec(&SAdSParams::new(n, lambda, mass)?)?)))
}

/// # Safety
/// `spec` must come from an `arw_spec_*` constructor and not be used after.
#[no_mangle]
pub unsafe extern "C" fn arw_spec_free(spec: *mut ArwSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Start `a` of the time domain `[a, 0)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_spec_domain_start(spec: *const ArwSpec, out: *mut f64) -> ArwStatus {
    guard(|| {
        *output(out, "out")? = reference(spec, "spec")?.0.domain_start();
        Ok(())
    })
}

/// `I(τ)` over the coordinate slice with `nodes` Gauss–Legendre nodes per axis.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_slice_mass_integral(spec: *const ArwSpec, tau: f64, nodes: usize, out: *mut f64) -> ArwStatus {
    guard(|| {
        let spec = &reference(spec, "spec")?.0;
        let value = slice_mass_integral(spec, tau, &grid(spec, nodes)?)?;
        *output(out, "out")? = value;
        Ok(())
    })
}

/// Mass limit on the schedule `a·2^{−k}`, `k = 0..=count`.
///
/// # Safety
/// Pointers must be valid; release the report with [`arw_mass_report_free`].
#[no_mangle]
pub unsafe extern "C" fn arw_mass_limit(
    spec: *const ArwSpec,
    nodes: usize,
    count: usize,
    out: *mut *mut ArwMassReport,
) -> ArwStatus {
    guard(|| {
        let spec = &reference(spec, "spec")?.0;
        let schedule = geometric_schedule(spec.domain_start(), count);
        boxed(out, ArwMassReport(mass_limit(spec, &grid(spec, nodes)?, &schedule)?))
    })
}

/// # Safety
/// `report` must come from [`arw_mass_limit`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn arw_mass_report_free(report: *mut ArwMassReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Recovered mass, extrapolation error and monotone flag.
///
/// # Safety
/// Pointers must be valid; any output may be null to skip it.
#[no_mangle]
pub unsafe extern "C" fn arw_mass_report_summary(
    report: *const ArwMassReport,
    m_hat: *mut f64,
    error: *mut f64,
    monotone: *mut bool,
) -> ArwStatus {
    guard(|| {
        let r = &reference(report, "report")?.0;
        if let Some(p) = m_hat.as_mut() {
            *p = r.m_hat;
        }
        if let Some(p) = error.as_mut() {
            *p = r.error;
        }
        if let Some(p) = monotone.as_mut() {
            *p = r.monotone;
        }
        Ok(())
    })
}

/// Number of samples in the report.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_mass_report_len(report: *const ArwMassReport, out: *mut usize) -> ArwStatus {
    guard(|| {
        *output(out, "out")? = reference(report, "report")?.0.integrals.len();
        Ok(())
    })
}

/// Sample `index`: slice time and integral.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_mass_report_sample(
    report: *const ArwMassReport,
    index: usize,
    tau: *mut f64,
    integral: *mut f64,
) -> ArwStatus {
    guard(|| {
        let r = &reference(report, "report")?.0;
        if index >= r.integrals.len() {
            return Err(Failure(ArwStatus::IndexOutOfRange, format!("index {index} >= {}", r.integrals.len())));
        }
        *output(tau, "tau")? = r.sample_times[index];
        *output(integral, "integral")? = r.integrals[index];
        Ok(())
    })
}

/// Divergence-theorem balance over `[tau1, tau2]`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_slab_balance(
    spec: *const ArwSpec,
    tau1: f64,
    tau2: f64,
    nodes: usize,
    out: *mut ArwSlabBalance,
) -> ArwStatus {
    guard(|| {
        let spec = &reference(spec, "spec")?.0;
        let b = slab_balance(spec, tau1, tau2, &grid(spec, nodes)?)?;
        *output(out, "out")? = ArwSlabBalance {
            tau1: b.tau1,
            tau2: b.tau2,
            b1: b.b1,
            b2: b.b2,
            volume: b.volume,
            residual: b.residual,
        };
        Ok(())
    })
}

/// Inverse mean curvature flow of the slice `{τ = u0}` up to `t_end`.
///
/// # Safety
/// Pointers must be valid; release with [`arw_trajectory_free`].
#[no_mangle]
pub unsafe extern "C" fn arw_imcf_run(
    spec: *const ArwSpec,
    u0: f64,
    t_end: f64,
    tolerance: f64,
    out: *mut *mut ArwTrajectory,
) -> ArwStatus {
    guard(|| {
        let spec = &reference(spec, "spec")?.0;
        boxed(out, ArwTrajectory(imcf_run(spec, u0, t_end, tolerance)?))
    })
}

/// # Safety
/// `trajectory` must come from [`arw_imcf_run`] and not be used after.
#[no_mangle]
pub unsafe extern "C" fn arw_trajectory_free(trajectory: *mut ArwTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Number of accepted states.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_trajectory_len(trajectory: *const ArwTrajectory, out: *mut usize) -> ArwStatus {
    guard(|| {
        *output(out, "out")? = reference(trajectory, "trajectory")?.0.states.len();
        Ok(())
    })
}

/// State `index` of the trajectory.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_trajectory_state(
    trajectory: *const ArwTrajectory,
    index: usize,
    out: *mut ArwFlowState,
) -> ArwStatus {
    guard(|| {
        let states = &reference(trajectory, "trajectory")?.0.states;
        let s = states
            .get(index)
            .ok_or_else(|| Failure(ArwStatus::IndexOutOfRange, format!("index {index} >= {}", states.len())))?;
        *output(out, "out")? =
            ArwFlowState { t: s.t, u: s.u, mean_curvature: s.mean_curvature, f_of_u: s.f_of_u, dfdt: s.dfdt };
        Ok(())
    })
}

/// Whether the flow stopped at the singularity before `t_end`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn arw_trajectory_reached_singularity(
    trajectory: *const ArwTrajectory,
    out: *mut bool,
) -> ArwStatus {
    guard(|| {
        *output(out, "out")? = reference(trajectory, "trajectory")?.0.reached_singularity;
        Ok(())
    })
}
