//! C interface to the simulator.
//!
//! Configurations and run results are opaque heap handles created and freed
//! through this API. Fallible functions return an [`EmlsrStatus`]; the
//! message of the most recent failure on the calling thread is available from
//! [`emlsr_last_error`]. No function unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use emlsr_isac::config::{ConfigError, Mode, Scheme, SimConfig};
use emlsr_isac::policy::min_durations;
use emlsr_isac::sched::jain_index;
use emlsr_isac::sim::{self, RunMetrics, RunOptions, SimError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmlsrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    Io = 3,
    Parse = 4,
    InvalidArgument = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmlsrScheme {
    Original = 0,
    RsmsS = 1,
    RsmsC = 2,
    RsmsSc = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmlsrMode {
    NonCooperative = 0,
    Cooperative = 1,
}

/// Opaque simulation configuration.
pub struct EmlsrConfig(SimConfig);

/// Opaque result of one simulation run.
pub struct EmlsrRun {
    metrics: RunMetrics,
    trace: String,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: EmlsrStatus, msg: impl Into<String>) -> EmlsrStatus {
    set_error(msg);
    status
}

fn config_status(e: &ConfigError) -> EmlsrStatus {
    match e {
        ConfigError::Io { .. } => EmlsrStatus::Io,
        ConfigError::Parse(_) | ConfigError::Serialize(_) => EmlsrStatus::Parse,
        ConfigError::Invalid(_) => EmlsrStatus::InvalidConfig,
    }
}

fn guard(f: impl FnOnce() -> EmlsrStatus) -> EmlsrStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(EmlsrStatus::Internal, "internal panic"))
}

/// # Safety
/// `s` must be null or a NUL-terminated string.
unsafe fn str_arg<'a>(s: *const c_char) -> Result<&'a str, EmlsrStatus> {
    if s.is_null() {
        return Err(fail(EmlsrStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(EmlsrStatus::InvalidArgument, "string argument is not UTF-8"))
}

/// Copies `text` plus a NUL into `buf` when it fits and returns the size
/// needed including the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
unsafe fn copy_out(text: &str, buf: *mut c_char, len: usize) -> usize {
    let needed = text.len() + 1;
    if !buf.is_null() && len >= needed {
        ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
    }
    needed
}

/// Writes the last error message of this thread into `buf` (NUL-terminated)
/// if `len` is large enough. Returns the buffer size the message needs.
///
/// # Safety
/// `buf` must be null or valid for writes of `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn emlsr_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| copy_out(&e.borrow(), buf, len))
}

/// New configuration with the default three-link, twelve-station scenario.
#[no_mangle]
pub extern "C" fn emlsr_config_default() -> *mut EmlsrConfig {
    Box::into_raw(Box::new(EmlsrConfig(SimConfig::default())))
}

/// Parses a configuration from TOML text into `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_from_toml(text: *const c_char, out: *mut *mut EmlsrConfig) -> EmlsrStatus {
    guard(|| {
        if out.is_null() {
            return fail(EmlsrStatus::NullPointer, "out is null");
        }
        let text = match str_arg(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match SimConfig::from_toml_str(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(EmlsrConfig(cfg)));
                EmlsrStatus::Ok
            }
            Err(e) => fail(config_status(&e), e.to_string()),
        }
    })
}

/// Reads a TOML configuration file into `*out`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_load(path: *const c_char, out: *mut *mut EmlsrConfig) -> EmlsrStatus {
    guard(|| {
        if out.is_null() {
            return fail(EmlsrStatus::NullPointer, "out is null");
        }
        let path = match str_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match SimConfig::load(path) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(EmlsrConfig(cfg)));
                EmlsrStatus::Ok
            }
            Err(e) => fail(config_status(&e), e.to_string()),
        }
    })
}

/// Serializes the configuration to TOML. Follows the [`emlsr_last_error`]
/// buffer convention; `*needed` receives the size including the NUL.
///
/// # Safety
/// `cfg` must come from this library; `buf` must be null or valid for `len`
/// bytes; `needed` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_to_toml(
    cfg: *const EmlsrConfig,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> EmlsrStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(EmlsrStatus::NullPointer, "config is null");
        };
        match cfg.0.to_toml_string() {
            Ok(text) => {
                let n = copy_out(&text, buf, len);
                if !needed.is_null() {
                    *needed = n;
                }
                EmlsrStatus::Ok
            }
            Err(e) => fail(config_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `cfg` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_free(cfg: *mut EmlsrConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn with_config(cfg: *mut EmlsrConfig, f: impl FnOnce(&mut SimConfig)) -> EmlsrStatus {
    match cfg.as_mut() {
        Some(c) => {
            f(&mut c.0);
            EmlsrStatus::Ok
        }
        None => fail(EmlsrStatus::NullPointer, "config is null"),
    }
}

/// Setters store the value as given; [`emlsr_config_validate`] reports
/// out-of-range values.
///
/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_set_alpha(cfg: *mut EmlsrConfig, alpha: f64) -> EmlsrStatus {
    with_config(cfg, |c| c.network.alpha = alpha)
}

/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_set_k(cfg: *mut EmlsrConfig, k: usize) -> EmlsrStatus {
    with_config(cfg, |c| c.network.k = k)
}

/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_set_n_stas(cfg: *mut EmlsrConfig, n_stas: usize) -> EmlsrStatus {
    with_config(cfg, |c| c.network.n_stas = n_stas)
}

/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_set_seed(cfg: *mut EmlsrConfig, seed: u64) -> EmlsrStatus {
    with_config(cfg, |c| c.network.seed = seed)
}

/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_set_n_windows(cfg: *mut EmlsrConfig, n_windows: u32) -> EmlsrStatus {
    with_config(cfg, |c| c.timing.n_windows = n_windows)
}

/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_set_scheme(cfg: *mut EmlsrConfig, scheme: EmlsrScheme) -> EmlsrStatus {
    let scheme = match scheme {
        EmlsrScheme::Original => Scheme::Original,
        EmlsrScheme::RsmsS => Scheme::RsmsS,
        EmlsrScheme::RsmsC => Scheme::RsmsC,
        EmlsrScheme::RsmsSc => Scheme::RsmsSC,
    };
    with_config(cfg, |c| c.network.scheme = scheme)
}

/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_set_mode(cfg: *mut EmlsrConfig, mode: EmlsrMode) -> EmlsrStatus {
    let mode = match mode {
        EmlsrMode::NonCooperative => Mode::NonCooperative,
        EmlsrMode::Cooperative => Mode::Cooperative,
    };
    with_config(cfg, |c| c.network.mode = mode)
}

/// `Ok` when the configuration is runnable; otherwise `InvalidConfig` with
/// every violation in the error message.
///
/// # Safety
/// `cfg` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_config_validate(cfg: *const EmlsrConfig) -> EmlsrStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(EmlsrStatus::NullPointer, "config is null");
        };
        let violations = cfg.0.validate();
        if violations.is_empty() {
            EmlsrStatus::Ok
        } else {
            let msg = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
            fail(EmlsrStatus::InvalidConfig, msg)
        }
    })
}

/// Minimum sensing, communications and overall exchange durations in ns.
///
/// # Safety
/// `cfg` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn emlsr_min_durations_ns(
    cfg: *const EmlsrConfig,
    sensing: *mut u64,
    comm: *mut u64,
    any: *mut u64,
) -> EmlsrStatus {
    let Some(cfg) = cfg.as_ref() else {
        return fail(EmlsrStatus::NullPointer, "config is null");
    };
    if sensing.is_null() || comm.is_null() || any.is_null() {
        return fail(EmlsrStatus::NullPointer, "output pointer is null");
    }
    let d = min_durations(&cfg.0.timing);
    *sensing = d.sensing;
    *comm = d.comm;
    *any = d.any;
    EmlsrStatus::Ok
}

/// Jain's fairness index of `n` values; 1 for an all-zero or empty input.
///
/// # Safety
/// `values` must be valid for `n` reads (or null when `n` is 0).
#[no_mangle]
pub unsafe extern "C" fn emlsr_jain_index(values: *const f64, n: usize) -> f64 {
    if values.is_null() || n == 0 {
        return 1.0;
    }
    jain_index(std::slice::from_raw_parts(values, n))
}

/// Runs the simulation described by `cfg` and stores the result in `*out`.
/// With `trace` set the per-event trace is kept for [`emlsr_run_trace`].
///
/// # Safety
/// `cfg` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run(cfg: *const EmlsrConfig, trace: bool, out: *mut *mut EmlsrRun) -> EmlsrStatus {
    guard(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(EmlsrStatus::NullPointer, "config is null");
        };
        if out.is_null() {
            return fail(EmlsrStatus::NullPointer, "out is null");
        }
        match sim::run(&cfg.0, RunOptions { trace, record_decisions: false }) {
            Ok(metrics) => {
                let trace = if trace { metrics.trace_text() } else { String::new() };
                *out = Box::into_raw(Box::new(EmlsrRun { metrics, trace }));
                EmlsrStatus::Ok
            }
            Err(e @ SimError::Config(_)) => fail(EmlsrStatus::InvalidConfig, e.to_string()),
            Err(e) => fail(EmlsrStatus::Internal, e.to_string()),
        }
    })
}

/// # Safety
/// `run` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_free(run: *mut EmlsrRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

fn metric<T>(run: *const EmlsrRun, null: T, f: impl FnOnce(&RunMetrics) -> T) -> T {
    // SAFETY: callers pass null or a live handle.
    match unsafe { run.as_ref() } {
        Some(r) => f(&r.metrics),
        None => null,
    }
}

/// Mean squared tracking error in m²; NaN for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_mse_mean(run: *const EmlsrRun) -> f64 {
    metric(run, f64::NAN, |m| m.mse_mean)
}

/// DL throughput in bit/s; NaN for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_throughput(run: *const EmlsrRun) -> f64 {
    metric(run, f64::NAN, |m| m.throughput)
}

/// Jain's index of delivered bytes; NaN for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_jain(run: *const EmlsrRun) -> f64 {
    metric(run, f64::NAN, |m| m.jain)
}

/// Simulated time in seconds; NaN for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_sim_time(run: *const EmlsrRun) -> f64 {
    metric(run, f64::NAN, |m| m.sim_time)
}

/// Sensing exchanges performed; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_sensing_count(run: *const EmlsrRun) -> u64 {
    metric(run, 0, |m| m.sensing_count)
}

/// Communications exchanges performed; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_comm_count(run: *const EmlsrRun) -> u64 {
    metric(run, 0, |m| m.comm_count)
}

/// TXOPs forfeited; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_skip_count(run: *const EmlsrRun) -> u64 {
    metric(run, 0, |m| m.skip_count)
}

/// Number of stations (length of the delivered-bytes array).
///
/// # Safety
/// `run` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_n_stas(run: *const EmlsrRun) -> usize {
    metric(run, 0, |m| m.delivered_bytes.len())
}

/// Copies per-station delivered bytes into `buf`, which must hold
/// [`emlsr_run_n_stas`] entries.
///
/// # Safety
/// `run` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_delivered_bytes(run: *const EmlsrRun, buf: *mut u64, len: usize) -> EmlsrStatus {
    let Some(run) = run.as_ref() else {
        return fail(EmlsrStatus::NullPointer, "run is null");
    };
    if buf.is_null() {
        return fail(EmlsrStatus::NullPointer, "buffer is null");
    }
    let src = &run.metrics.delivered_bytes;
    if len < src.len() {
        return fail(EmlsrStatus::InvalidArgument, format!("buffer holds {len} entries, {} needed", src.len()));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    EmlsrStatus::Ok
}

/// Copies the event trace (CSV with header) using the [`emlsr_last_error`]
/// buffer convention and returns the size needed. Empty unless the run was
/// started with tracing.
///
/// # Safety
/// `run` must be null or a live handle; `buf` must be null or valid for `len`
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn emlsr_run_trace(run: *const EmlsrRun, buf: *mut c_char, len: usize) -> usize {
    match run.as_ref() {
        Some(r) => copy_out(&r.trace, buf, len),
        None => 0,
    }
}
