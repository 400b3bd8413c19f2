//! C ABI for `rsum-core`.
//!
//! Instances and reports are opaque handles created by `rsum_*` functions and
//! released with the matching `*_free`. Fallible calls return an
//! [`RsumStatus`]; the message of the last failure on the calling thread is
//! available from [`rsum_last_error_message`]. Panics never cross the
//! boundary: they are reported as [`RsumStatus::Panic`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Instant;

use rsum_core::instance::generate;
use rsum_core::{
    brute_force_rsum, meet_in_the_middle_rsum_with, solve, Fallback, Family, Instance, RsumError,
    SelectionKey, SolverConfig, SolverReport, ThresholdPolicy,
};

/// Result of a fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsumStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Invalid argument: bad arity, magnitude out of range, malformed string.
    Domain = 2,
    /// The candidate count exceeded the threshold and no fallback was set. A
    /// partial report is still returned.
    Capacity = 3,
    /// Internal inconsistency between filter structures.
    Consistency = 4,
    /// The generator could not build the requested instance.
    Generation = 5,
    /// Malformed instance file.
    Parse = 6,
    Io = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsumFamily {
    Uniform = 0,
    Planted = 1,
    NoSolution = 2,
    Adversarial = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsumThreshold {
    /// `n^(3/2r)`.
    Auto = 0,
    /// `n^(1/2) / (log2 n)^(1/r)`.
    Secondary = 1,
    /// Always enumerate the filtered candidates.
    Unlimited = 2,
    /// Use `threshold_value`.
    Fixed = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsumFallback {
    MeetInTheMiddle = 0,
    BruteForce = 1,
    None = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsumSelection {
    Tables = 0,
    Variants = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsumOracle {
    Brute = 0,
    Mitm = 1,
}

/// Solver settings. Start from [`rsum_solver_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RsumSolverOptions {
    pub r: usize,
    pub allow_repeats: bool,
    pub threshold: RsumThreshold,
    pub threshold_value: u64,
    pub fallback: RsumFallback,
    pub selection: RsumSelection,
    /// 0 keeps the default.
    pub confluence_count: usize,
    /// 0 keeps the default.
    pub block_width: usize,
}

/// Opaque instance handle.
pub struct RsumInstance {
    inner: Instance,
}

enum ReportKind {
    Solver(Box<SolverReport>),
    Oracle {
        n: usize,
        r: usize,
        algo: &'static str,
        solutions: Vec<Vec<u32>>,
        values: Vec<Vec<i64>>,
        total_ms: f64,
    },
}

/// Opaque report handle.
pub struct RsumReport {
    kind: ReportKind,
}

impl RsumReport {
    fn solutions(&self) -> &[Vec<u32>] {
        match &self.kind {
            ReportKind::Solver(r) => &r.solutions,
            ReportKind::Oracle { solutions, .. } => solutions,
        }
    }

    fn arity(&self) -> usize {
        match &self.kind {
            ReportKind::Solver(r) => r.r,
            ReportKind::Oracle { r, .. } => *r,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).ok());
}

fn status_of(err: &RsumError) -> RsumStatus {
    match err {
        RsumError::Domain(_) => RsumStatus::Domain,
        RsumError::Capacity { .. } => RsumStatus::Capacity,
        RsumError::Consistency(_) => RsumStatus::Consistency,
        RsumError::Generation(_) => RsumStatus::Generation,
        RsumError::Parse { .. } => RsumStatus::Parse,
        RsumError::Io(_) => RsumStatus::Io,
    }
}

fn fail(err: RsumError) -> RsumStatus {
    set_error(err.to_string());
    status_of(&err)
}

/// Runs `f`, turning a panic into [`RsumStatus::Panic`].
fn guard(f: impl FnOnce() -> RsumStatus) -> RsumStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(format!("internal panic: {msg}"));
            RsumStatus::Panic
        }
    }
}

fn null(name: &str) -> RsumStatus {
    set_error(format!("{name} is null"));
    RsumStatus::NullPointer
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, RsumStatus> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path).to_str().map_err(|_| {
        set_error("path is not valid UTF-8");
        RsumStatus::Domain
    })
}

fn put<T>(out: *mut *mut T, value: T) {
    // SAFETY: callers check `out` for null before calling
    unsafe { *out = Box::into_raw(Box::new(value)) };
}

/// Message describing the last failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rsum_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rsum_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `len` values into a new instance.
#[no_mangle]
pub unsafe extern "C" fn rsum_instance_from_values(
    values: *const i64,
    len: usize,
    out: *mut *mut RsumInstance,
) -> RsumStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if values.is_null() && len > 0 {
            return null("values");
        }
        let values = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(values, len).to_vec() };
        put(out, RsumInstance { inner: Instance::from_values(values) });
        RsumStatus::Ok
    })
}

/// Reads an instance file.
#[no_mangle]
pub unsafe extern "C" fn rsum_instance_read(path: *const c_char, out: *mut *mut RsumInstance) -> RsumStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match Instance::read(path) {
            Ok(inner) => {
                put(out, RsumInstance { inner });
                RsumStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Writes an instance file.
#[no_mangle]
pub unsafe extern "C" fn rsum_instance_write(instance: *const RsumInstance, path: *const c_char) -> RsumStatus {
    guard(|| {
        let Some(instance) = instance.as_ref() else {
            return null("instance");
        };
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(status) => return status,
        };
        match instance.inner.write(path) {
            Ok(()) => RsumStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Generates a seeded instance. `r` is used by the planted and adversarial
/// families.
#[no_mangle]
pub unsafe extern "C" fn rsum_instance_generate(
    family: RsumFamily,
    n: usize,
    bound: u64,
    r: usize,
    seed: u64,
    out: *mut *mut RsumInstance,
) -> RsumStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let family = match family {
            RsumFamily::Uniform => Family::Uniform,
            RsumFamily::Planted => Family::Planted,
            RsumFamily::NoSolution => Family::NoSolution,
            RsumFamily::Adversarial => Family::Adversarial,
        };
        match generate(&family, n, bound, r, seed) {
            Ok(inner) => {
                put(out, RsumInstance { inner });
                RsumStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of values; 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn rsum_instance_len(instance: *const RsumInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.len())
}

/// Borrowed pointer to the values, valid while the instance lives.
#[no_mangle]
pub unsafe extern "C" fn rsum_instance_values(instance: *const RsumInstance) -> *const i64 {
    instance.as_ref().map_or(ptr::null(), |i| i.inner.values.as_ptr())
}

/// Number of planted ordinals (0 if none). Copies up to `capacity` of them
/// into `out` when `out` is not null.
#[no_mangle]
pub unsafe extern "C" fn rsum_instance_planted(
    instance: *const RsumInstance,
    out: *mut u32,
    capacity: usize,
) -> usize {
    let Some(planted) = instance.as_ref().and_then(|i| i.inner.planted.as_ref()) else {
        return 0;
    };
    if !out.is_null() {
        let k = planted.len().min(capacity);
        ptr::copy_nonoverlapping(planted.as_ptr(), out, k);
    }
    planted.len()
}

#[no_mangle]
pub unsafe extern "C" fn rsum_instance_free(instance: *mut RsumInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Default settings for arity `r`.
#[no_mangle]
pub extern "C" fn rsum_solver_options_default(r: usize) -> RsumSolverOptions {
    RsumSolverOptions {
        r,
        allow_repeats: false,
        threshold: RsumThreshold::Auto,
        threshold_value: 0,
        fallback: RsumFallback::MeetInTheMiddle,
        selection: RsumSelection::Tables,
        confluence_count: 0,
        block_width: 0,
    }
}

fn solver_config(o: &RsumSolverOptions) -> SolverConfig {
    SolverConfig {
        r: o.r,
        allow_repeated_ordinals: o.allow_repeats,
        threshold: match o.threshold {
            RsumThreshold::Auto => ThresholdPolicy::Primary,
            RsumThreshold::Secondary => ThresholdPolicy::Secondary,
            RsumThreshold::Unlimited => ThresholdPolicy::Unlimited,
            RsumThreshold::Fixed => ThresholdPolicy::Fixed(o.threshold_value),
        },
        fallback: match o.fallback {
            RsumFallback::MeetInTheMiddle => Fallback::MeetInTheMiddle,
            RsumFallback::BruteForce => Fallback::BruteForce,
            RsumFallback::None => Fallback::None,
        },
        selection: match o.selection {
            RsumSelection::Tables => SelectionKey::Tables,
            RsumSelection::Variants => SelectionKey::Variants,
        },
        confluence_count: (o.confluence_count > 0).then_some(o.confluence_count),
        block_width: (o.block_width > 0).then_some(o.block_width),
    }
}

/// Solves `instance`. On [`RsumStatus::Ok`] and [`RsumStatus::Capacity`],
/// `*out` receives a report (partial and without solutions for the
/// latter); otherwise `*out` is set to null.
#[no_mangle]
pub unsafe extern "C" fn rsum_solve(
    instance: *const RsumInstance,
    options: *const RsumSolverOptions,
    out: *mut *mut RsumReport,
) -> RsumStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let Some(instance) = instance.as_ref() else {
            return null("instance");
        };
        let Some(options) = options.as_ref() else {
            return null("options");
        };
        let config = solver_config(options);
        if let Err(e) = instance.inner.validate(config.r) {
            return fail(e);
        }
        match solve(&instance.inner.values, &config) {
            Ok(report) => {
                put(out, RsumReport { kind: ReportKind::Solver(Box::new(report)) });
                RsumStatus::Ok
            }
            Err(RsumError::Capacity { variants, threshold, report }) => {
                set_error(format!("capacity exceeded: {variants} candidate variants above threshold {threshold}"));
                put(out, RsumReport { kind: ReportKind::Solver(report) });
                RsumStatus::Capacity
            }
            Err(e) => fail(e),
        }
    })
}

/// Solves with a baseline algorithm.
#[no_mangle]
pub unsafe extern "C" fn rsum_oracle(
    instance: *const RsumInstance,
    r: usize,
    algo: RsumOracle,
    allow_repeats: bool,
    out: *mut *mut RsumReport,
) -> RsumStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let Some(instance) = instance.as_ref() else {
            return null("instance");
        };
        let omega = &instance.inner.values;
        let start = Instant::now();
        let found = match algo {
            RsumOracle::Brute => brute_force_rsum(omega, r, allow_repeats).map(|s| ("brute", s)),
            RsumOracle::Mitm => meet_in_the_middle_rsum_with(omega, r, allow_repeats).map(|s| ("mitm", s)),
        };
        let total_ms = start.elapsed().as_secs_f64() * 1e3;
        match found {
            Ok((algo, solutions)) => {
                let values = solutions
                    .iter()
                    .map(|s| s.iter().map(|&o| omega[o as usize]).collect())
                    .collect();
                let n = omega.len();
                put(out, RsumReport { kind: ReportKind::Oracle { n, r, algo, solutions, values, total_ms } });
                RsumStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn rsum_report_solution_count(report: *const RsumReport) -> usize {
    report.as_ref().map_or(0, |r| r.solutions().len())
}

/// Ordinals per solution.
#[no_mangle]
pub unsafe extern "C" fn rsum_report_arity(report: *const RsumReport) -> usize {
    report.as_ref().map_or(0, RsumReport::arity)
}

/// Copies solution `index` (arity-many sorted ordinals) into `out`, which
/// must have room for [`rsum_report_arity`] entries.
#[no_mangle]
pub unsafe extern "C" fn rsum_report_solution(report: *const RsumReport, index: usize, out: *mut u32) -> RsumStatus {
    guard(|| {
        let Some(report) = report.as_ref() else {
            return null("report");
        };
        if out.is_null() {
            return null("out");
        }
        let Some(solution) = report.solutions().get(index) else {
            set_error(format!("solution index {index} out of range"));
            return RsumStatus::Domain;
        };
        ptr::copy_nonoverlapping(solution.as_ptr(), out, solution.len());
        RsumStatus::Ok
    })
}

/// Whether a baseline produced the solutions. False for oracle reports.
#[no_mangle]
pub unsafe extern "C" fn rsum_report_fallback_used(report: *const RsumReport) -> bool {
    match report.as_ref().map(|r| &r.kind) {
        Some(ReportKind::Solver(r)) => r.fallback_used,
        _ => false,
    }
}

/// Candidate variants left after filtering. 0 for oracle reports.
#[no_mangle]
pub unsafe extern "C" fn rsum_report_variant_count(report: *const RsumReport) -> u64 {
    match report.as_ref().map(|r| &r.kind) {
        Some(ReportKind::Solver(r)) => r.variant_count,
        _ => 0,
    }
}

/// Tables in the filtered candidate set. 0 for oracle reports.
#[no_mangle]
pub unsafe extern "C" fn rsum_report_theta_size(report: *const RsumReport) -> usize {
    match report.as_ref().map(|r| &r.kind) {
        Some(ReportKind::Solver(r)) => r.theta_size,
        _ => 0,
    }
}

/// Ordinals stored across all ordinal indexes. 0 for oracle reports.
#[no_mangle]
pub unsafe extern "C" fn rsum_report_stored_ordinals(report: *const RsumReport) -> usize {
    match report.as_ref().map(|r| &r.kind) {
        Some(ReportKind::Solver(r)) => r.stored_ordinals,
        _ => 0,
    }
}

/// The report as JSON, in the same shape the `rsum` CLI prints. Free the
/// result with [`rsum_string_free`]. Returns null on failure.
#[no_mangle]
pub unsafe extern "C" fn rsum_report_to_json(report: *const RsumReport) -> *mut c_char {
    let Some(report) = report.as_ref() else {
        null("report");
        return ptr::null_mut();
    };
    let json = match &report.kind {
        ReportKind::Solver(r) => serde_json::to_string(r),
        ReportKind::Oracle { n, r, algo, solutions, values, total_ms } => serde_json::to_string(&serde_json::json!({
            "n": n,
            "r": r,
            "algo": algo,
            "solutions": solutions,
            "values": values,
            "timings_ms": { "total": total_ms },
        })),
    };
    match json.map(CString::new) {
        Ok(Ok(s)) => s.into_raw(),
        _ => {
            set_error("report serialization failed");
            ptr::null_mut()
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn rsum_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[no_mangle]
pub unsafe extern "C" fn rsum_report_free(report: *mut RsumReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
