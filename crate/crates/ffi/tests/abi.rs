use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use rsum_ffi::*;

fn instance(values: &[i64]) -> *mut RsumInstance {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rsum_instance_from_values(values.as_ptr(), values.len(), &mut out) }, RsumStatus::Ok);
    out
}

fn solutions(report: *const RsumReport) -> Vec<Vec<u32>> {
    unsafe {
        let r = rsum_report_arity(report);
        (0..rsum_report_solution_count(report))
            .map(|i| {
                let mut s = vec![0u32; r];
                assert_eq!(rsum_report_solution(report, i, s.as_mut_ptr()), RsumStatus::Ok);
                s
            })
            .collect()
    }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rsum_last_error_message()).to_string_lossy().into_owned() }
}

#[test]
fn solve_round_trip() {
    let inst = instance(&[8, -5, -3, 11]);
    let opts = rsum_solver_options_default(3);
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(rsum_solve(inst, &opts, &mut report), RsumStatus::Ok);
        assert_eq!(solutions(report), vec![vec![0, 1, 2]]);
        let json = rsum_report_to_json(report);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        rsum_string_free(json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["solutions"], serde_json::json!([[0, 1, 2]]));
        assert_eq!(v["values"], serde_json::json!([[8, -5, -3]]));
        rsum_report_free(report);
        rsum_instance_free(inst);
    }
}

#[test]
fn capacity_returns_partial_report() {
    let inst = instance(&[0, 0, 0, 0]);
    let mut opts = rsum_solver_options_default(3);
    opts.threshold = RsumThreshold::Fixed;
    opts.threshold_value = 1;
    opts.fallback = RsumFallback::None;
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(rsum_solve(inst, &opts, &mut report), RsumStatus::Capacity);
        assert!(!report.is_null());
        assert_eq!(rsum_report_solution_count(report), 0);
        assert_eq!(rsum_report_variant_count(report), 64);
        assert_eq!(rsum_report_stored_ordinals(report), 12);
        assert!(last_error().contains("capacity"));
        rsum_report_free(report);

        opts.fallback = RsumFallback::MeetInTheMiddle;
        assert_eq!(rsum_solve(inst, &opts, &mut report), RsumStatus::Ok);
        assert!(rsum_report_fallback_used(report));
        assert_eq!(solutions(report).len(), 4);
        rsum_report_free(report);
        rsum_instance_free(inst);
    }
}

#[test]
fn oracle_matches_solver() {
    let mut inst = ptr::null_mut();
    unsafe {
        assert_eq!(rsum_instance_generate(RsumFamily::Uniform, 18, 30, 3, 4, &mut inst), RsumStatus::Ok);
        assert_eq!(rsum_instance_len(inst), 18);
        let mut opts = rsum_solver_options_default(3);
        opts.threshold = RsumThreshold::Unlimited;
        let (mut a, mut b, mut c) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(rsum_solve(inst, &opts, &mut a), RsumStatus::Ok);
        assert_eq!(rsum_oracle(inst, 3, RsumOracle::Brute, false, &mut b), RsumStatus::Ok);
        assert_eq!(rsum_oracle(inst, 3, RsumOracle::Mitm, false, &mut c), RsumStatus::Ok);
        assert!(!solutions(b).is_empty());
        assert_eq!(solutions(a), solutions(b));
        assert_eq!(solutions(b), solutions(c));
        for report in [a, b, c] {
            rsum_report_free(report);
        }
        rsum_instance_free(inst);
    }
}

#[test]
fn planted_instances_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("p.rsum").to_str().unwrap()).unwrap();
    let mut inst = ptr::null_mut();
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(rsum_instance_generate(RsumFamily::Planted, 40, 1 << 16, 3, 9, &mut inst), RsumStatus::Ok);
        assert_eq!(rsum_instance_write(inst, path.as_ptr()), RsumStatus::Ok);
        assert_eq!(rsum_instance_read(path.as_ptr(), &mut back), RsumStatus::Ok);
        let mut planted = [0u32; 3];
        assert_eq!(rsum_instance_planted(back, planted.as_mut_ptr(), 3), 3);
        let values = std::slice::from_raw_parts(rsum_instance_values(back), rsum_instance_len(back));
        assert_eq!(planted.iter().map(|&o| values[o as usize]).sum::<i64>(), 0);
        assert_eq!(rsum_instance_planted(back, ptr::null_mut(), 0), 3);
        rsum_instance_free(inst);
        rsum_instance_free(back);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut inst = ptr::null_mut();
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(rsum_instance_from_values(ptr::null(), 3, &mut inst), RsumStatus::NullPointer);
        assert_eq!(rsum_solve(ptr::null(), ptr::null(), &mut report), RsumStatus::NullPointer);
        assert!(report.is_null());

        let missing = CString::new("/nonexistent/x.rsum").unwrap();
        assert_eq!(rsum_instance_read(missing.as_ptr(), &mut inst), RsumStatus::Io);

        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.rsum");
        std::fs::write(&bad, "1\nnot-a-number\n").unwrap();
        let bad = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(rsum_instance_read(bad.as_ptr(), &mut inst), RsumStatus::Parse);
        assert!(last_error().contains("line 2"));

        let small = instance(&[1, 2]);
        let opts = rsum_solver_options_default(3);
        assert_eq!(rsum_solve(small, &opts, &mut report), RsumStatus::Domain);
        let huge = instance(&[i64::MAX, 0, 0]);
        assert_eq!(rsum_solve(huge, &opts, &mut report), RsumStatus::Domain);
        assert_eq!(rsum_oracle(small, 3, RsumOracle::Brute, false, &mut report), RsumStatus::Domain);
        assert_eq!(
            rsum_instance_generate(RsumFamily::Planted, 2, 100, 3, 0, &mut inst),
            RsumStatus::Domain
        );
        rsum_instance_free(small);
        rsum_instance_free(huge);

        // null handles are tolerated by accessors and destructors
        assert_eq!(rsum_instance_len(ptr::null()), 0);
        assert_eq!(rsum_report_solution_count(ptr::null()), 0);
        rsum_instance_free(ptr::null_mut());
        rsum_report_free(ptr::null_mut());
        rsum_string_free(ptr::null_mut());
    }
}

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// Directory holding the built libraries (`target/<profile>`).
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let header_dir = manifest().join("include");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(header_dir.join("rsum.h"))
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success(), "header does not compile as C");

    let lib = artifact_dir().join("librsum_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Wextra", "-Werror"])
        .arg("-I")
        .arg(&header_dir)
        .arg(manifest().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C smoke test failed to build");
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
