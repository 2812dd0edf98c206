//! C ABI for the radmhd solver and the lifespan-bound formulas.
//!
//! Every function returns an `int32_t` code, `RMHD_OK` on success, and
//! writes results through out-pointers. The message of the last failure on
//! the calling thread is available from [`rmhd_last_error_message`]. Runs are
//! opaque handles owned by the caller and released with [`rmhd_run_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use radmhd::diagnostics::{lifespan_bound, optimize_alpha, BoundInputs, DiagnosticsRecord};
use radmhd::params::Geometry;
use radmhd::presets::preset;
use radmhd::{parse_config, Error, RunStatus, Runner};

pub const RMHD_OK: i32 = 0;
pub const RMHD_ERR_NULL: i32 = -1;
pub const RMHD_ERR_UTF8: i32 = -2;
pub const RMHD_ERR_CONFIG: i32 = -3;
pub const RMHD_ERR_DOMAIN: i32 = -4;
pub const RMHD_ERR_NUMERICAL: i32 = -5;
pub const RMHD_ERR_INVARIANT: i32 = -6;
pub const RMHD_ERR_IO: i32 = -7;
pub const RMHD_ERR_BUFFER: i32 = -8;
pub const RMHD_ERR_PANIC: i32 = -9;

pub const RMHD_STATUS_RUNNING: i32 = 0;
pub const RMHD_STATUS_COMPLETED: i32 = 1;
pub const RMHD_STATUS_BLOWUP_DETECTED: i32 = 2;
pub const RMHD_STATUS_INVALIDATED: i32 = 3;
pub const RMHD_STATUS_ERROR: i32 = 4;

pub const RMHD_GEOMETRY_DISK2D: i32 = 0;
pub const RMHD_GEOMETRY_CYLINDER3D: i32 = 1;
pub const RMHD_GEOMETRY_DISK2D_FREE: i32 = 2;

/// Opaque run handle.
pub struct RmhdRun {
    runner: Runner,
}

/// One diagnostics record. Quantities that do not apply to the run are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmhdRecord {
    pub t: f64,
    pub energy: f64,
    pub dissipation_cum: f64,
    pub flux_vacuum: f64,
    pub r_front: f64,
    pub a_boundary: f64,
    pub div_l2: f64,
    pub div_lower_bound: f64,
    pub max_gradu: f64,
    pub dt: f64,
}

/// Inputs of the lifespan bound. `r_ref` is the wall radius, or the envelope
/// constant for the free surface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmhdBoundInputs {
    pub mu: f64,
    pub lambda: f64,
    pub r_ref: f64,
    pub c0: f64,
    pub e0: f64,
    pub alpha: f64,
    pub geometry: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Syntax { .. } => RMHD_ERR_CONFIG,
        Error::Domain(_) | Error::LengthMismatch { .. } => RMHD_ERR_DOMAIN,
        Error::Numerical { .. }
        | Error::Singular(_)
        | Error::Tracking(_)
        | Error::GeometryCollapse(_)
        | Error::DtCollapse(_) => RMHD_ERR_NUMERICAL,
        Error::Invariant(_) | Error::InsufficientHistory(_) => RMHD_ERR_INVARIANT,
        Error::Io(_) => RMHD_ERR_IO,
    }
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(error_code(&e), e.to_string())
    }
}

/// Run `f`, turning errors and panics into codes and the thread's message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RMHD_OK,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("panic inside radmhd".into());
            RMHD_ERR_PANIC
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RMHD_ERR_NULL, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(RMHD_ERR_UTF8, format!("{what} is not UTF-8")))
}

unsafe fn run_mut<'a>(run: *mut RmhdRun) -> Result<&'a mut RmhdRun, Failure> {
    run.as_mut().ok_or_else(|| null("run"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn status_code(s: RunStatus) -> i32 {
    match s {
        RunStatus::Running => RMHD_STATUS_RUNNING,
        RunStatus::Completed => RMHD_STATUS_COMPLETED,
        RunStatus::BlowupDetected => RMHD_STATUS_BLOWUP_DETECTED,
        RunStatus::Invalidated => RMHD_STATUS_INVALIDATED,
        RunStatus::Error => RMHD_STATUS_ERROR,
    }
}

fn geometry(code: i32) -> Result<Geometry, Failure> {
    match code {
        RMHD_GEOMETRY_DISK2D => Ok(Geometry::Disk2D),
        RMHD_GEOMETRY_CYLINDER3D => Ok(Geometry::Cylinder3D),
        RMHD_GEOMETRY_DISK2D_FREE => Ok(Geometry::Disk2DFree),
        other => Err(Failure(RMHD_ERR_DOMAIN, format!("unknown geometry code {other}"))),
    }
}

fn bound_inputs(b: &RmhdBoundInputs) -> Result<BoundInputs, Failure> {
    Ok(BoundInputs {
        mu: b.mu,
        lam: b.lambda,
        r_ref: b.r_ref,
        c0: b.c0,
        e0: b.e0,
        alpha: b.alpha,
        geometry: geometry(b.geometry)?,
    })
}

fn record(r: &DiagnosticsRecord) -> RmhdRecord {
    let opt = |x: Option<f64>| x.unwrap_or(f64::NAN);
    RmhdRecord {
        t: r.t,
        energy: r.energy,
        dissipation_cum: r.dissipation_cum,
        flux_vacuum: opt(r.flux_vacuum),
        r_front: opt(r.r_front),
        a_boundary: opt(r.a_boundary),
        div_l2: r.div_l2,
        div_lower_bound: opt(r.div_lower_bound),
        max_gradu: r.max_gradu,
        dt: r.dt,
    }
}

fn boxed(runner: Runner) -> *mut RmhdRun {
    Box::into_raw(Box::new(RmhdRun { runner }))
}

/// Create a run from configuration text (`section.key = value` lines).
///
/// # Safety
/// `config` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_new(config: *const c_char, out: *mut *mut RmhdRun) -> i32 {
    guard(|| {
        let cfg = parse_config(text(config, "config")?)?;
        let runner = Runner::new(cfg)?;
        write(out, boxed(runner), "out")
    })
}

/// Create a run from a built-in preset.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_from_preset(name: *const c_char, out: *mut *mut RmhdRun) -> i32 {
    guard(|| {
        let runner = Runner::new(preset(text(name, "name")?)?)?;
        write(out, boxed(runner), "out")
    })
}

/// Apply a `key=value` override and rebuild the run from its initial data.
///
/// # Safety
/// `run` must come from this library and `assignment` be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_override(run: *mut RmhdRun, assignment: *const c_char) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        let mut cfg = run.runner.config().clone();
        cfg.apply_override(text(assignment, "assignment")?)?;
        run.runner = Runner::new(cfg)?;
        Ok(())
    })
}

/// Release a run. Null is ignored.
///
/// # Safety
/// `run` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_free(run: *mut RmhdRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Advance by one step and report the run status.
///
/// # Safety
/// `run` must come from this library and `status` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_step(run: *mut RmhdRun, status: *mut i32) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        run.runner.advance();
        write(status, status_code(run.runner.status()), "status")
    })
}

/// Advance until the run ends and report the final status.
///
/// # Safety
/// `run` must come from this library and `status` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_to_end(run: *mut RmhdRun, status: *mut i32) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        run.runner.run_to_end()?;
        write(status, status_code(run.runner.status()), "status")
    })
}

/// Current simulation time.
///
/// # Safety
/// `run` must come from this library and `t` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_time(run: *mut RmhdRun, t: *mut f64) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        write(t, run.runner.time(), "t")
    })
}

/// Most recent diagnostics record.
///
/// # Safety
/// `run` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_latest(run: *mut RmhdRun, out: *mut RmhdRecord) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        write(out, record(run.runner.latest()), "out")
    })
}

/// Number of records in the run history.
///
/// # Safety
/// `run` must come from this library and `len` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_history_len(run: *mut RmhdRun, len: *mut usize) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        write(len, run.runner.history().len(), "len")
    })
}

/// Record `index` of the run history.
///
/// # Safety
/// `run` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_record(run: *mut RmhdRun, index: usize, out: *mut RmhdRecord) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        let h = run.runner.history();
        let r = h
            .get(index)
            .ok_or_else(|| Failure(RMHD_ERR_DOMAIN, format!("record {index} out of range 0..{}", h.len())))?;
        write(out, record(r), "out")
    })
}

/// Copy `src` with a terminating NUL into `buf` of capacity `cap`. `needed`
/// receives the full size including the NUL; a short buffer gives
/// `RMHD_ERR_BUFFER` and is left untouched.
unsafe fn copy_out(src: &str, buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), Failure> {
    let size = src.len() + 1;
    if !needed.is_null() {
        needed.write(size);
    }
    if buf.is_null() || cap < size {
        return Err(Failure(RMHD_ERR_BUFFER, format!("buffer of {cap} bytes, need {size}")));
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf.cast::<u8>(), src.len());
    buf.add(src.len()).write(0);
    Ok(())
}

/// Run summary as JSON.
///
/// # Safety
/// `run` must come from this library; `buf` must hold `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn rmhd_run_json(run: *mut RmhdRun, buf: *mut c_char, cap: usize, needed: *mut usize) -> i32 {
    guard(|| {
        let run = run_mut(run)?;
        copy_out(&run.runner.json().to_string(), buf, cap, needed)
    })
}

/// Lifespan bound at the given exponent; `+inf` without flux.
///
/// # Safety
/// `inputs` and `t` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rmhd_lifespan_bound(inputs: *const RmhdBoundInputs, t: *mut f64) -> i32 {
    guard(|| {
        let b = bound_inputs(inputs.as_ref().ok_or_else(|| null("inputs"))?)?;
        write(t, lifespan_bound(&b)?, "t")
    })
}

/// Minimize the lifespan bound over the admissible exponents. The `alpha`
/// field of `inputs` is ignored.
///
/// # Safety
/// `inputs`, `alpha` and `t` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn rmhd_optimize_alpha(inputs: *const RmhdBoundInputs, alpha: *mut f64, t: *mut f64) -> i32 {
    guard(|| {
        let mut b = bound_inputs(inputs.as_ref().ok_or_else(|| null("inputs"))?)?;
        b.alpha = 1.5;
        let (a, bound) = optimize_alpha(&b)?;
        write(alpha, a, "alpha")?;
        write(t, bound, "t")
    })
}

/// Message of the last failure on this thread, with the same buffer
/// protocol as [`rmhd_run_json`]. Empty before any failure.
///
/// # Safety
/// `buf` must hold `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn rmhd_last_error_message(buf: *mut c_char, cap: usize, needed: *mut usize) -> i32 {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    match copy_out(&msg, buf, cap, needed) {
        Ok(()) => RMHD_OK,
        Err(Failure(code, _)) => code,
    }
}
