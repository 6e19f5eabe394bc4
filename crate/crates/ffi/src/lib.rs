//! C ABI over `gi-core`.
//!
//! Instances and walks are opaque handles created by `gi_*` constructors and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`GiStatus`]; on failure, `gi_last_error()` describes the problem until
//! the next call on the same thread. Strings returned to the caller must be
//! released with `gi_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use gi_core::bounds::algorithm_st;
use gi_core::config::RunConfig;
use gi_core::dp::solve_dp;
use gi_core::gen::{generate_instance, Profile};
use gi_core::graph::{InspectionInstance, MetricClosure, Walk};
use gi_core::ilp::{lp_lower_bound, solve_ilp, HighsBackend};
use gi_core::io::{parse_instance, write_instance};
use gi_core::pipeline::run_pipeline;
use gi_core::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GiStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Infeasible = 5,
    Timeout = 6,
    Backend = 7,
    Limit = 8,
    Io = 9,
    Internal = 10,
}

/// Opaque instance handle.
pub struct GiInstance(InspectionInstance);

/// Opaque walk handle; vertices refer to the instance it was solved on.
pub struct GiWalk {
    walk: Walk,
    coverage: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GiStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => GiStatus::Parse,
        Error::Infeasible | Error::InfeasibleQuota { .. } | Error::DegenerateInstance => {
            GiStatus::Infeasible
        }
        Error::Timeout => GiStatus::Timeout,
        Error::BackendUnavailable(_) | Error::ModelRejected(_) => GiStatus::Backend,
        Error::TooManyColors { .. } | Error::LimitExceeded(_) => GiStatus::Limit,
        Error::Io { .. } => GiStatus::Io,
        _ => GiStatus::InvalidInput,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (GiStatus, String)>) -> GiStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GiStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GiStatus::Internal
        }
    }
}

fn core(e: Error) -> (GiStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (GiStatus, String) {
    (GiStatus::NullArgument, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GiStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (GiStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn instance<'a>(p: *const GiInstance) -> Result<&'a InspectionInstance, (GiStatus, String)> {
    p.as_ref().map(|i| &i.0).ok_or_else(|| null("instance"))
}

/// Normalizes `inst` and sets its quota to `quota` original colors, start
/// colors included; a negative quota keeps the instance's own.
fn normalized(inst: &InspectionInstance, quota: i64) -> Result<InspectionInstance, Error> {
    let norm = inst.normalize()?;
    let t = if quota < 0 {
        inst.quota()
    } else {
        quota as usize
    };
    norm.instance
        .with_quota(t.saturating_sub(norm.start_colors.len()))
}

unsafe fn put_walk(
    out: *mut *mut GiWalk,
    inst: &InspectionInstance,
    walk: Walk,
) -> Result<(), (GiStatus, String)> {
    let walk = Walk::from_vertices(inst, walk.vertices).map_err(core)?;
    let coverage = walk.coverage(inst);
    *out = Box::into_raw(Box::new(GiWalk { walk, coverage }));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next `gi_*` call on the same thread.
#[no_mangle]
pub extern "C" fn gi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses an instance from NUL-terminated text.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_instance_parse(
    text: *const c_char,
    out: *mut *mut GiInstance,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inst = parse_instance(c_str(text, "text")?).map_err(core)?;
        *out = Box::into_raw(Box::new(GiInstance(inst)));
        Ok(())
    })
}

/// Generates a synthetic instance. `profile` is `crisp-like`, `drone-like`
/// or `uniform`.
///
/// # Safety
/// `profile` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_instance_generate(
    profile: *const c_char,
    n: usize,
    seed: u64,
    out: *mut *mut GiInstance,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p: Profile = c_str(profile, "profile")?.parse().map_err(core)?;
        let inst = generate_instance(p, n, seed).map_err(core)?;
        *out = Box::into_raw(Box::new(GiInstance(inst)));
        Ok(())
    })
}

/// Serializes an instance; release the result with `gi_string_free`.
///
/// # Safety
/// `inst` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_instance_write(
    inst: *const GiInstance,
    out: *mut *mut c_char,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = write_instance(instance(inst)?);
        *out = CString::new(s).expect("no NUL in output").into_raw();
        Ok(())
    })
}

/// # Safety
/// `inst` must be NULL or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gi_instance_free(inst: *mut GiInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of vertices, or 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gi_instance_vertex_count(inst: *const GiInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.vertex_count())
}

/// Size of the color universe, or 0 for NULL.
///
/// # Safety
/// `inst` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gi_instance_color_count(inst: *const GiInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.num_colors())
}

/// Optimal walk by dynamic programming. `quota` counts original colors
/// (start colors included); pass -1 for the instance's quota.
///
/// # Safety
/// `inst` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_solve_dp(
    inst: *const GiInstance,
    quota: i64,
    out: *mut *mut GiWalk,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let raw = instance(inst)?;
        let at = normalized(raw, quota).map_err(core)?;
        let mc = MetricClosure::new(&at).map_err(core)?;
        let walk = solve_dp(&at, &mc).map_err(core)?;
        put_walk(out, raw, walk)
    })
}

/// Optimal walk through the integer program solved by HiGHS. A
/// non-positive `time_limit` means no limit.
///
/// # Safety
/// `inst` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_solve_ilp(
    inst: *const GiInstance,
    quota: i64,
    time_limit: f64,
    out: *mut *mut GiWalk,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let raw = instance(inst)?;
        let at = normalized(raw, quota).map_err(core)?;
        let limit = (time_limit > 0.0).then(|| Duration::from_secs_f64(time_limit));
        let (walk, _) = solve_ilp(&at, &HighsBackend, limit).map_err(core)?;
        put_walk(out, raw, walk)
    })
}

/// Steiner-tree walk, an upper bound within a factor of the quota.
///
/// # Safety
/// `inst` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_upper_bound_walk(
    inst: *const GiInstance,
    quota: i64,
    out: *mut *mut GiWalk,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let raw = instance(inst)?;
        let at = normalized(raw, quota).map_err(core)?;
        let walk = if at.quota() == 0 {
            Walk::trivial(&at, at.start())
        } else {
            let mc = MetricClosure::new(&at).map_err(core)?;
            algorithm_st(&at, &mc).map_err(core)?
        };
        put_walk(out, raw, walk)
    })
}

/// LP-relaxation lower bound on the optimal walk weight.
///
/// # Safety
/// `inst` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_lower_bound(
    inst: *const GiInstance,
    quota: i64,
    out: *mut f64,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let at = normalized(instance(inst)?, quota).map_err(core)?;
        *out = lp_lower_bound(&at, &HighsBackend).map_err(core)?;
        Ok(())
    })
}

/// Runs the reduce, solve and merge pipeline with a TOML configuration
/// (NULL or empty for defaults) and returns the JSON report.
///
/// # Safety
/// `inst` must come from this library, `config` be NULL or a valid C
/// string, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gi_run_pipeline(
    inst: *const GiInstance,
    config: *const c_char,
    out: *mut *mut c_char,
) -> GiStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let raw = instance(inst)?;
        let mut cfg = if config.is_null() {
            RunConfig::default()
        } else {
            RunConfig::from_toml(c_str(config, "config")?).map_err(core)?
        };
        cfg.apply_env();
        let report = run_pipeline(raw, "ffi", &cfg).map_err(core)?;
        let json = serde_json::to_string(&report).map_err(|e| core(e.into()))?;
        *out = CString::new(json).expect("no NUL in JSON").into_raw();
        Ok(())
    })
}

/// # Safety
/// `walk` must be NULL or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gi_walk_free(walk: *mut GiWalk) {
    if !walk.is_null() {
        drop(Box::from_raw(walk));
    }
}

/// Total edge weight, or NaN for NULL.
///
/// # Safety
/// `walk` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gi_walk_weight(walk: *const GiWalk) -> f64 {
    walk.as_ref().map_or(f64::NAN, |w| w.walk.weight)
}

/// Collected colors over all colors, start colors included; NaN for NULL.
///
/// # Safety
/// `walk` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gi_walk_coverage(walk: *const GiWalk) -> f64 {
    walk.as_ref().map_or(f64::NAN, |w| w.coverage)
}

/// Number of vertices in the closed sequence (edges + 1), or 0 for NULL.
///
/// # Safety
/// `walk` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gi_walk_len(walk: *const GiWalk) -> usize {
    walk.as_ref().map_or(0, |w| w.walk.vertices.len())
}

/// Copies up to `cap` vertex ids into `buf` and returns the full length.
///
/// # Safety
/// `walk` must be NULL or come from this library; `buf` must hold `cap`
/// elements unless `cap` is 0.
#[no_mangle]
pub unsafe extern "C" fn gi_walk_vertices(
    walk: *const GiWalk,
    buf: *mut usize,
    cap: usize,
) -> usize {
    let Some(w) = walk.as_ref() else {
        return 0;
    };
    let v = &w.walk.vertices;
    if !buf.is_null() {
        let n = v.len().min(cap);
        ptr::copy_nonoverlapping(v.as_ptr(), buf, n);
    }
    v.len()
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn gi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
