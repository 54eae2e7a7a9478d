//! C ABI for `trialalloc`.
//!
//! Designs are parsed once from their JSON encoding into an opaque
//! [`TaDesign`] handle and released with [`ta_design_free`]. Every fallible
//! call returns a [`TaStatus`]; on failure the thread-local message from
//! [`ta_last_error_message`] says why. Results are written through caller
//! provided out-pointers and are left untouched on failure.
//!
//! Optional floating-point arguments take NaN to mean "use the default".

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use trialalloc::oracle::{self, Truth};
use trialalloc::survival::{self, SurvivalMethod};
use trialalloc::{allocation, model, report, sample_size, DesignSpec, Error, ErrorRates};

/// Parsed and validated design.
pub struct TaDesign {
    spec: DesignSpec,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Json = 3,
    Validation = 4,
    Domain = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaTruth {
    NullBoundary = 0,
    Alternative = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaSurvivalMethod {
    Jung = 0,
    Chow = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TaAllocation {
    pub control_fraction: f64,
    /// Treatment:control ratio for two arms; the first treatment arm otherwise.
    pub ratio_treatment_to_control: f64,
    pub are_vs_balanced: f64,
    /// Number of arms, control included.
    pub n_arms: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TaSampleSize {
    pub n_control: u64,
    pub n_treatment: u64,
    pub n_total: u64,
    pub n_total_unrounded: f64,
    pub h_used: f64,
    pub are_vs_balanced: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TaEvents {
    pub d_events: u64,
    pub p: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TaSimulation {
    pub estimate: f64,
    pub standard_error: f64,
    pub rejections: u64,
    pub replications: u64,
}

struct Failure {
    status: TaStatus,
    message: String,
}

impl Failure {
    fn new(status: TaStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation { .. } => TaStatus::Validation,
            Error::Domain(_) => TaStatus::Domain,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TaStatus {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            clear_error();
            TaStatus::Ok
        }
        Ok(Err(failure)) => {
            set_error(&failure.message);
            failure.status
        }
        Err(_) => {
            set_error("internal error: panic caught at the FFI boundary");
            TaStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::new(TaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn spec_of<'a>(handle: *const TaDesign) -> Result<&'a DesignSpec, Failure> {
    handle
        .as_ref()
        .map(|d| &d.spec)
        .ok_or_else(|| null("design"))
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn optional(x: f64) -> Option<f64> {
    (!x.is_nan()).then_some(x)
}

fn rates(alpha: f64, power: f64) -> Result<ErrorRates, Failure> {
    let defaults = ErrorRates::default();
    Ok(ErrorRates::new(
        optional(alpha).unwrap_or(defaults.alpha),
        optional(power).unwrap_or(defaults.power),
    )?)
}

/// Parses and validates a design from NUL-terminated UTF-8 JSON.
///
/// # Safety
/// `json` must be a valid C string and `out` a valid pointer. On success the
/// caller owns `*out` and must release it with [`ta_design_free`].
#[no_mangle]
pub unsafe extern "C" fn ta_design_from_json(
    json: *const c_char,
    out: *mut *mut TaDesign,
) -> TaStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Failure::new(TaStatus::InvalidUtf8, e.to_string()))?;
        let spec: DesignSpec =
            serde_json::from_str(text).map_err(|e| Failure::new(TaStatus::Json, e.to_string()))?;
        let spec = model::validate(&spec)?;
        out.write(Box::into_raw(Box::new(TaDesign { spec })));
        Ok(())
    })
}

/// Releases a design. Null is ignored.
///
/// # Safety
/// `design` must come from [`ta_design_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ta_design_free(design: *mut TaDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// Optimal allocation summary.
///
/// # Safety
/// `handle` must be a live design and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_allocate(handle: *const TaDesign, out: *mut TaAllocation) -> TaStatus {
    guard(|| {
        let plan = allocation::allocate(spec_of(handle)?)?;
        write(
            out,
            TaAllocation {
                control_fraction: plan.control_fraction,
                ratio_treatment_to_control: plan.ratio_treatment_to_control,
                are_vs_balanced: plan.are_vs_balanced,
                n_arms: plan.fractions.len(),
            },
        )
    })
}

/// Copies the per-arm optimal fractions (control first) into `buf`.
///
/// `*written` receives the number of arms. If `len` is too small nothing is
/// copied and `TA_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `buf` must point to `len` writable doubles; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ta_allocate_fractions(
    handle: *const TaDesign,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> TaStatus {
    guard(|| {
        let plan = allocation::allocate(spec_of(handle)?)?;
        let n = plan.fractions.len();
        write(written, n)?;
        if len < n {
            return Err(Failure::new(
                TaStatus::BufferTooSmall,
                format!("buffer holds {len} values, {n} needed"),
            ));
        }
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(plan.fractions.as_ptr(), buf, n);
        Ok(())
    })
}

/// Per-arm sample sizes at control fraction `h` (NaN: optimal).
///
/// # Safety
/// `handle` must be a live design and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_sample_size(
    handle: *const TaDesign,
    h: f64,
    out: *mut TaSampleSize,
) -> TaStatus {
    guard(|| {
        let n = sample_size::sample_size_ni(spec_of(handle)?, optional(h))?;
        write(
            out,
            TaSampleSize {
                n_control: n.n_control,
                n_treatment: n.n_treatment,
                n_total: n.n_total,
                n_total_unrounded: n.n_total_unrounded,
                h_used: n.h_used,
                are_vs_balanced: n.are_vs_balanced,
            },
        )
    })
}

/// Analytic power of the design at the given arm sizes.
///
/// # Safety
/// `handle` must be a live design and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_achieved_power(
    handle: *const TaDesign,
    n_control: u64,
    n_treatment: u64,
    out: *mut f64,
) -> TaStatus {
    guard(|| {
        write(
            out,
            sample_size::achieved_power(spec_of(handle)?, n_control, n_treatment)?,
        )
    })
}

/// Variance at treatment:control ratio `r` relative to the optimum.
///
/// # Safety
/// `handle` must be a live design and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_efficiency_at_ratio(
    handle: *const TaDesign,
    r: f64,
    out: *mut f64,
) -> TaStatus {
    guard(|| write(out, report::efficiency_at_ratio(spec_of(handle)?, r)?))
}

/// Event-count-minimizing control fraction for hazard-ratio margin `delta0`.
/// NaN `alpha`/`power` select 0.025 and 0.9.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_optimal_event_fraction(
    delta0: f64,
    alpha: f64,
    power: f64,
    out: *mut f64,
) -> TaStatus {
    guard(|| {
        write(
            out,
            survival::optimal_event_fraction(delta0, &rates(alpha, power)?)?,
        )
    })
}

/// Required number of events. NaN `p` selects the method's optimal fraction.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_events(
    delta0: f64,
    alpha: f64,
    power: f64,
    method: TaSurvivalMethod,
    p: f64,
    out: *mut TaEvents,
) -> TaStatus {
    guard(|| {
        let method = match method {
            TaSurvivalMethod::Jung => SurvivalMethod::Jung,
            TaSurvivalMethod::Chow => SurvivalMethod::Chow,
        };
        let d = survival::design_events(delta0, &rates(alpha, power)?, method, optional(p))?;
        write(
            out,
            TaEvents {
                d_events: d.d_events,
                p: d.p,
            },
        )
    })
}

/// Monte-Carlo rejection rate. `workers` = 0 uses all cores; the result does
/// not depend on it.
///
/// # Safety
/// `handle` must be a live design and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ta_simulate(
    handle: *const TaDesign,
    n_control: u64,
    n_treatment: u64,
    truth: TaTruth,
    reps: u64,
    seed: u64,
    workers: usize,
    out: *mut TaSimulation,
) -> TaStatus {
    guard(|| {
        let truth = match truth {
            TaTruth::NullBoundary => Truth::NullBoundary,
            TaTruth::Alternative => Truth::Alternative,
        };
        let workers = (workers > 0).then_some(workers);
        let r = oracle::simulate_with_workers(
            spec_of(handle)?,
            n_control,
            n_treatment,
            truth,
            reps,
            seed,
            workers,
        )?;
        write(
            out,
            TaSimulation {
                estimate: r.estimate,
                standard_error: r.standard_error,
                rejections: r.rejections,
                replications: r.replications,
            },
        )
    })
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ta_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn ta_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
