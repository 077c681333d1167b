//! C ABI for the simulator.
//!
//! Workloads and simulation outcomes live behind opaque handles that the
//! caller releases with the matching `_free` function. Fallible calls return
//! a `SizeschedStatus`; on failure `sizesched_last_error` describes what went
//! wrong on the calling thread. Panics never cross the boundary.

// Pointer contracts are stated in plain prose so they read naturally in the
// generated C header.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::OnceLock;

use sizesched::metrics::mean_sojourn_time;
use sizesched::model::validate_workload;
use sizesched::workload::{generate, load_trace, TraceError};
use sizesched::{run, GenParams, Job, JobOutcome, PolicyKind, SimError, Workload};

/// Result of a fallible call.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SizeschedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownPolicy = 3,
    InvalidWorkload = 4,
    SimulationFailed = 5,
    Io = 6,
    Panic = 7,
}

/// Opaque validated workload.
pub struct SizeschedWorkload(Workload);

/// Opaque per-job results of one simulation, in workload order.
pub struct SizeschedOutcomes(Vec<JobOutcome>);

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SizeschedJob {
    pub id: u64,
    pub arrival: f64,
    pub size: f64,
    pub estimate: f64,
}

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct SizeschedOutcome {
    pub job_id: u64,
    pub arrival: f64,
    pub size: f64,
    pub completion: f64,
    pub sojourn: f64,
    pub slowdown: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(SizeschedStatus, String);

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let status = match e {
            SimError::InvalidWorkload(_) => SizeschedStatus::InvalidWorkload,
            _ => SizeschedStatus::SimulationFailed,
        };
        Failure(status, e.to_string())
    }
}

impl From<TraceError> for Failure {
    fn from(e: TraceError) -> Self {
        let status = match e {
            TraceError::Io { .. } => SizeschedStatus::Io,
            _ => SizeschedStatus::InvalidWorkload,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let message = message.map(|m| CString::new(m.replace('\0', " ")).expect("NULs removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

/// Runs `body`, recording the failure message and turning panics into
/// `Panic`.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> SizeschedStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(None);
            SizeschedStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(Some(message));
            status
        }
        Err(panic) => {
            let what = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(Some(format!("internal panic: {what}")));
            SizeschedStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SizeschedStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SizeschedStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call into this library.
#[no_mangle]
pub extern "C" fn sizesched_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sizesched_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn policy_names() -> &'static [CString] {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    NAMES.get_or_init(|| {
        PolicyKind::ALL
            .iter()
            .map(|k| CString::new(k.name()).expect("policy names have no NUL"))
            .collect()
    })
}

#[no_mangle]
pub extern "C" fn sizesched_policy_count() -> usize {
    PolicyKind::ALL.len()
}

/// Name of the `index`-th policy (static string), or NULL when out of range.
#[no_mangle]
pub extern "C" fn sizesched_policy_name(index: usize) -> *const c_char {
    policy_names().get(index).map_or(ptr::null(), |n| n.as_ptr())
}

/// Draws a synthetic workload. Same parameters and seed give the same jobs.
///
/// `out` must be valid for writing a handle pointer.
#[no_mangle]
pub unsafe extern "C" fn sizesched_workload_generate(
    shape: f64,
    timeshape: f64,
    sigma: f64,
    load: f64,
    njobs: usize,
    seed: u64,
    out: *mut *mut SizeschedWorkload,
) -> SizeschedStatus {
    guard(|| {
        let params = GenParams {
            shape,
            timeshape,
            sigma,
            load,
            njobs,
            seed,
        };
        let w = generate(&params).map_err(|e| Failure(SizeschedStatus::InvalidArgument, e.to_string()))?;
        emit(out, SizeschedWorkload(w))
    })
}

/// Builds a workload from `len` caller-supplied jobs, validating and sorting
/// them by (arrival, id).
///
/// `jobs` must point to `len` readable jobs (it may be NULL when `len` is
/// 0) and `out` must be valid for writing a handle pointer.
#[no_mangle]
pub unsafe extern "C" fn sizesched_workload_from_jobs(
    jobs: *const SizeschedJob,
    len: usize,
    out: *mut *mut SizeschedWorkload,
) -> SizeschedStatus {
    guard(|| {
        let rows = match len {
            0 => &[][..],
            _ if jobs.is_null() => return Err(null("jobs")),
            _ => std::slice::from_raw_parts(jobs, len),
        };
        let jobs = rows
            .iter()
            .map(|j| Job::new(j.id, j.arrival, j.size, j.estimate))
            .collect();
        let w = validate_workload(Workload::manual(jobs))
            .map_err(|e| Failure(SizeschedStatus::InvalidWorkload, e.to_string()))?;
        emit(out, SizeschedWorkload(w))
    })
}

/// Loads a trace CSV (`job_id,arrival,size[,estimate]`); missing estimates
/// are drawn with log-normal error `sigma` from `seed`.
///
/// `path` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sizesched_workload_load_trace(
    path: *const c_char,
    sigma: f64,
    seed: u64,
    out: *mut *mut SizeschedWorkload,
) -> SizeschedStatus {
    guard(|| {
        let path = c_str(path, "path")?;
        let w = load_trace(Path::new(path), sigma, seed)?;
        emit(out, SizeschedWorkload(w))
    })
}

/// Number of jobs, or 0 for a NULL handle.
///
/// `workload` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sizesched_workload_len(workload: *const SizeschedWorkload) -> usize {
    workload.as_ref().map_or(0, |w| w.0.len())
}

/// Copies the `index`-th job (in (arrival, id) order) into `out`.
///
/// `workload` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sizesched_workload_job(
    workload: *const SizeschedWorkload,
    index: usize,
    out: *mut SizeschedJob,
) -> SizeschedStatus {
    guard(|| {
        let w = deref(workload, "workload")?;
        let job = w.0.jobs.get(index).ok_or_else(|| {
            Failure(
                SizeschedStatus::InvalidArgument,
                format!("job index {index} out of range ({} jobs)", w.0.len()),
            )
        })?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = SizeschedJob {
            id: job.id.0,
            arrival: job.arrival,
            size: job.size,
            estimate: job.estimate,
        };
        Ok(())
    })
}

/// Releases a workload handle. NULL is ignored.
///
/// `workload` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sizesched_workload_free(workload: *mut SizeschedWorkload) {
    if !workload.is_null() {
        drop(Box::from_raw(workload));
    }
}

/// Simulates `workload` under the named policy (case-insensitive, see
/// `sizesched_policy_name`).
///
/// `workload` must be a live handle, `policy` a NUL-terminated string and
/// `out` valid for writing a handle pointer.
#[no_mangle]
pub unsafe extern "C" fn sizesched_simulate(
    workload: *const SizeschedWorkload,
    policy: *const c_char,
    out: *mut *mut SizeschedOutcomes,
) -> SizeschedStatus {
    guard(|| {
        let w = deref(workload, "workload")?;
        let name = c_str(policy, "policy")?;
        let kind: PolicyKind = name
            .parse()
            .map_err(|e: sizesched::policies::UnknownPolicy| Failure(SizeschedStatus::UnknownPolicy, e.to_string()))?;
        let outcomes = run(&w.0, &mut kind.build())?;
        emit(out, SizeschedOutcomes(outcomes))
    })
}

/// Number of outcomes, or 0 for a NULL handle.
///
/// `outcomes` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sizesched_outcomes_len(outcomes: *const SizeschedOutcomes) -> usize {
    outcomes.as_ref().map_or(0, |o| o.0.len())
}

/// Copies the `index`-th outcome (same order as the workload's jobs).
///
/// `outcomes` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sizesched_outcomes_get(
    outcomes: *const SizeschedOutcomes,
    index: usize,
    out: *mut SizeschedOutcome,
) -> SizeschedStatus {
    guard(|| {
        let o = deref(outcomes, "outcomes")?;
        let x = o.0.get(index).ok_or_else(|| {
            Failure(
                SizeschedStatus::InvalidArgument,
                format!("outcome index {index} out of range ({} outcomes)", o.0.len()),
            )
        })?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = SizeschedOutcome {
            job_id: x.job_id.0,
            arrival: x.arrival,
            size: x.size,
            completion: x.completion,
            sojourn: x.sojourn,
            slowdown: x.slowdown,
        };
        Ok(())
    })
}

/// Mean sojourn time over all jobs.
///
/// `outcomes` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn sizesched_outcomes_mean_sojourn(
    outcomes: *const SizeschedOutcomes,
    out: *mut f64,
) -> SizeschedStatus {
    guard(|| {
        let o = deref(outcomes, "outcomes")?;
        let mst = mean_sojourn_time(&o.0).map_err(|e| Failure(SizeschedStatus::InvalidArgument, e.to_string()))?;
        *out.as_mut().ok_or_else(|| null("out"))? = mst;
        Ok(())
    })
}

/// Releases an outcomes handle. NULL is ignored.
///
/// `outcomes` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sizesched_outcomes_free(outcomes: *mut SizeschedOutcomes) {
    if !outcomes.is_null() {
        drop(Box::from_raw(outcomes));
    }
}
