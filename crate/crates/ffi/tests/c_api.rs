use std::ffi::{c_char, CStr, CString};
use std::ptr;

use emlsr_isac_ffi::*;

fn last_error() -> String {
    unsafe {
        let n = emlsr_last_error(ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; n];
        assert_eq!(emlsr_last_error(buf.as_mut_ptr(), buf.len()), n);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn short_config() -> *mut EmlsrConfig {
    let cfg = emlsr_config_default();
    unsafe {
        assert_eq!(emlsr_config_set_n_windows(cfg, 3), EmlsrStatus::Ok);
    }
    cfg
}

#[test]
fn run_round_trip() {
    unsafe {
        let cfg = short_config();
        assert_eq!(emlsr_config_set_seed(cfg, 9), EmlsrStatus::Ok);
        assert_eq!(emlsr_config_set_mode(cfg, EmlsrMode::Cooperative), EmlsrStatus::Ok);
        assert_eq!(emlsr_config_validate(cfg), EmlsrStatus::Ok);
        let mut run = ptr::null_mut();
        assert_eq!(emlsr_run(cfg, true, &mut run), EmlsrStatus::Ok);
        assert!(!run.is_null());

        let n = emlsr_run_n_stas(run);
        assert_eq!(n, 12);
        let mut delivered = vec![0u64; n];
        assert_eq!(emlsr_run_delivered_bytes(run, delivered.as_mut_ptr(), n), EmlsrStatus::Ok);
        let total: u64 = delivered.iter().sum();
        let thr = emlsr_run_throughput(run);
        assert!((thr - 8.0 * total as f64 / emlsr_run_sim_time(run)).abs() <= 1e-9 * thr);
        assert!(emlsr_run_mse_mean(run).is_finite());
        assert!(emlsr_run_jain(run) > 0.0 && emlsr_run_jain(run) <= 1.0);
        assert!(emlsr_run_sensing_count(run) + emlsr_run_comm_count(run) > 0);
        let _ = emlsr_run_skip_count(run);

        let len = emlsr_run_trace(run, ptr::null_mut(), 0);
        let mut buf = vec![0 as c_char; len];
        emlsr_run_trace(run, buf.as_mut_ptr(), len);
        let text = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        assert!(text.starts_with("time_ns,kind,interface,beta,selection,metric\n"));

        let mut short = vec![0u64; n - 1];
        assert_eq!(emlsr_run_delivered_bytes(run, short.as_mut_ptr(), n - 1), EmlsrStatus::InvalidArgument);

        emlsr_run_free(run);
        emlsr_config_free(cfg);
    }
}

#[test]
fn same_seed_same_result_through_the_abi() {
    unsafe {
        let cfg = short_config();
        emlsr_config_set_scheme(cfg, EmlsrScheme::RsmsSc);
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(emlsr_run(cfg, false, &mut a), EmlsrStatus::Ok);
        assert_eq!(emlsr_run(cfg, false, &mut b), EmlsrStatus::Ok);
        assert_eq!(emlsr_run_mse_mean(a).to_bits(), emlsr_run_mse_mean(b).to_bits());
        assert_eq!(emlsr_run_throughput(a).to_bits(), emlsr_run_throughput(b).to_bits());
        assert_eq!(emlsr_run_trace(a, ptr::null_mut(), 0), 1);
        emlsr_run_free(a);
        emlsr_run_free(b);
        emlsr_config_free(cfg);
    }
}

#[test]
fn invalid_config_reports_violations() {
    unsafe {
        let cfg = short_config();
        emlsr_config_set_alpha(cfg, 1.0);
        emlsr_config_set_k(cfg, 2);
        assert_eq!(emlsr_config_validate(cfg), EmlsrStatus::InvalidConfig);
        let msg = last_error();
        assert!(msg.contains("alpha must lie in open interval (0,1)"), "{msg}");
        assert!(msg.contains("k must allow a trilateration triple"), "{msg}");
        let mut run = ptr::null_mut();
        assert_eq!(emlsr_run(cfg, false, &mut run), EmlsrStatus::InvalidConfig);
        assert!(run.is_null());
        emlsr_config_free(cfg);
    }
}

#[test]
fn toml_parse_and_serialize() {
    unsafe {
        let cfg = emlsr_config_default();
        let mut needed = 0usize;
        assert_eq!(emlsr_config_to_toml(cfg, ptr::null_mut(), 0, &mut needed), EmlsrStatus::Ok);
        let mut buf = vec![0 as c_char; needed];
        assert_eq!(emlsr_config_to_toml(cfg, buf.as_mut_ptr(), needed, &mut needed), EmlsrStatus::Ok);
        let mut parsed = ptr::null_mut();
        assert_eq!(emlsr_config_from_toml(buf.as_ptr(), &mut parsed), EmlsrStatus::Ok);
        assert_eq!(emlsr_config_validate(parsed), EmlsrStatus::Ok);
        emlsr_config_free(parsed);
        emlsr_config_free(cfg);

        let bad = CString::new("[network]\nbogus = 1\n").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(emlsr_config_from_toml(bad.as_ptr(), &mut out), EmlsrStatus::Parse);
        assert!(out.is_null());
        assert!(!last_error().is_empty());

        let missing = CString::new("/nonexistent/config.toml").unwrap();
        assert_eq!(emlsr_config_load(missing.as_ptr(), &mut out), EmlsrStatus::Io);
    }
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        assert_eq!(emlsr_config_validate(ptr::null()), EmlsrStatus::NullPointer);
        assert_eq!(emlsr_config_set_alpha(ptr::null_mut(), 0.5), EmlsrStatus::NullPointer);
        assert_eq!(emlsr_run(ptr::null(), false, ptr::null_mut()), EmlsrStatus::NullPointer);
        assert_eq!(emlsr_config_from_toml(ptr::null(), ptr::null_mut()), EmlsrStatus::NullPointer);
        assert!(emlsr_run_mse_mean(ptr::null()).is_nan());
        assert_eq!(emlsr_run_comm_count(ptr::null()), 0);
        emlsr_run_free(ptr::null_mut());
        emlsr_config_free(ptr::null_mut());
    }
}

#[test]
fn helpers() {
    unsafe {
        let cfg = emlsr_config_default();
        let (mut s, mut c, mut a) = (0, 0, 0);
        assert_eq!(emlsr_min_durations_ns(cfg, &mut s, &mut c, &mut a), EmlsrStatus::Ok);
        assert_eq!((s, c, a), (246_200, 240_000, 246_200));
        emlsr_config_free(cfg);
        let xs = [1.0, 2.0, 3.0];
        assert!((emlsr_jain_index(xs.as_ptr(), 3) - 36.0 / 42.0).abs() < 1e-15);
        assert_eq!(emlsr_jain_index(ptr::null(), 0), 1.0);
    }
}
