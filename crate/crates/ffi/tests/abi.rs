use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sbproj_ffi::*;

fn last_error() -> String {
    let p = sbp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn new_projector(model: SbpModel, d: usize, m: usize, p: f64, c: usize, seed: u64) -> *mut SbpProjector {
    let mut h = ptr::null_mut();
    let st = unsafe { sbp_projector_new(model, d, m, p, c, seed, &mut h) };
    assert_eq!(st, SbpStatus::Ok, "{}", if st == SbpStatus::Ok { String::new() } else { last_error() });
    assert!(!h.is_null());
    h
}

#[test]
fn project_matches_library() {
    let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
    for (model, kind) in [
        (SbpModel::Bernoulli, sbproj::ModelKind::Bernoulli { p: 0.3 }),
        (SbpModel::Fixed, sbproj::ModelKind::FixedSparsity { c: 4 }),
        (SbpModel::Gaussian, sbproj::ModelKind::Gaussian),
        (SbpModel::Achlioptas, sbproj::ModelKind::Achlioptas),
        (SbpModel::Ping, sbproj::ModelKind::Ping),
        (SbpModel::Bourgain, sbproj::ModelKind::Bourgain { c: 4 }),
    ] {
        let h = new_projector(model, 20, 6, 0.3, 4, 17);
        let (mut d, mut m) = (0, 0);
        assert_eq!(unsafe { sbp_projector_dims(h, &mut d, &mut m) }, SbpStatus::Ok);
        assert_eq!((d, m), (20, 6));
        let mut out = vec![0.0; 6];
        assert_eq!(unsafe { sbp_project(h, x.as_ptr(), 20, out.as_mut_ptr(), 6) }, SbpStatus::Ok);
        let want = sbproj::ProjectionModel::new(kind, 20, 6, 17).unwrap().materialize().unwrap().project(&x).unwrap();
        assert_eq!(out, want, "{model:?}");
        unsafe { sbp_projector_free(h) };
    }
}

#[test]
fn batch_matches_single() {
    let h = new_projector(SbpModel::Fixed, 10, 3, 0.0, 2, 5);
    let xs: Vec<f64> = (0..40).map(|i| i as f64 - 13.0).collect();
    let mut batch = vec![0.0; 12];
    assert_eq!(unsafe { sbp_project_batch(h, xs.as_ptr(), 4, batch.as_mut_ptr(), 12) }, SbpStatus::Ok);
    for i in 0..4 {
        let mut one = vec![0.0; 3];
        assert_eq!(unsafe { sbp_project(h, xs[i * 10..].as_ptr(), 10, one.as_mut_ptr(), 3) }, SbpStatus::Ok);
        assert_eq!(&batch[i * 3..i * 3 + 3], &one[..]);
    }
    let st = unsafe { sbp_project_batch(h, xs.as_ptr(), 4, batch.as_mut_ptr(), 11) };
    assert_eq!(st, SbpStatus::DimensionMismatch);
    unsafe { sbp_projector_free(h) };
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    let st = unsafe { sbp_projector_new(SbpModel::Bernoulli, 10, 3, 0.9, 0, 0, &mut h) };
    assert_eq!(st, SbpStatus::InvalidParameter);
    assert!(h.is_null());
    assert!(last_error().contains("p must lie"));

    let st = unsafe { sbp_projector_new(SbpModel::Fixed, 10, 3, 0.0, 6, 0, &mut h) };
    assert_eq!(st, SbpStatus::InvalidParameter);
    let st = unsafe { sbp_projector_new(SbpModel::Gaussian, 10, 3, 0.0, 0, 0, ptr::null_mut()) };
    assert_eq!(st, SbpStatus::NullPointer);

    let h = new_projector(SbpModel::Gaussian, 4, 2, 0.0, 0, 1);
    let x = [1.0, 2.0, 3.0];
    let mut out = [0.0; 2];
    assert_eq!(unsafe { sbp_project(h, x.as_ptr(), 3, out.as_mut_ptr(), 2) }, SbpStatus::DimensionMismatch);
    let x = [1.0, f64::NAN, 3.0, 4.0];
    assert_eq!(unsafe { sbp_project(h, x.as_ptr(), 4, out.as_mut_ptr(), 2) }, SbpStatus::NonFinite);
    assert_eq!(unsafe { sbp_project(h, ptr::null(), 4, out.as_mut_ptr(), 2) }, SbpStatus::NullPointer);
    assert_eq!(unsafe { sbp_project(ptr::null(), x.as_ptr(), 4, out.as_mut_ptr(), 2) }, SbpStatus::NullPointer);
    unsafe { sbp_projector_free(h) };
    unsafe { sbp_projector_free(ptr::null_mut()) };

    let mut v = 0.0;
    assert_eq!(unsafe { sbp_fixed_two_sided(0.1, 10, 100, 4, &mut v) }, SbpStatus::OutOfDomain);
    assert_eq!(unsafe { sbp_bernoulli_two_sided(1.0, 10, 100, 0.5, &mut v) }, SbpStatus::OutOfDomain);
    assert_eq!(v, 0.0, "out untouched on failure");
}

#[test]
fn moments_and_bounds() {
    let x = [1.0, 0.0, 0.0, 0.0];
    let mut v = 0.0;
    assert_eq!(unsafe { sbp_var_fixed(x.as_ptr(), 4, 1, 2, &mut v) }, SbpStatus::Ok);
    assert!((v - 0.75).abs() < 1e-12);
    assert_eq!(unsafe { sbp_var_gaussian(x.as_ptr(), 4, 2, &mut v) }, SbpStatus::Ok);
    assert!((v - 1.0).abs() < 1e-15);
    assert_eq!(unsafe { sbp_var_bernoulli(x.as_ptr(), 4, 1, 0.5, &mut v) }, SbpStatus::Ok);
    assert!((v - 0.0).abs() < 1e-12);
    assert_eq!(unsafe { sbp_fixed_q(4, 2, &mut v) }, SbpStatus::Ok);
    assert!((v - (1.0 + (1.0f64 / 3.0).sqrt()) / 4.0).abs() < 1e-15);

    let mut m = 0u64;
    assert_eq!(unsafe { sbp_min_m_bernoulli(10_000, 0.1, 0.5, &mut m) }, SbpStatus::Ok);
    assert_eq!(m, 29_474);
    assert_eq!(unsafe { sbp_min_m_fixed(10_000, 0.1, 100, 50, &mut m) }, SbpStatus::Ok);
    assert_eq!(m, 294_731);
    assert_eq!(unsafe { sbp_bernoulli_two_sided(0.1, 10_000, 100, 0.5, &mut v) }, SbpStatus::Ok);
    assert!((v - 2.0 * (-6.25f64).exp()).abs() < 1e-15);
    assert_eq!(unsafe { sbp_fixed_two_sided(0.1, 100_000, 100, 50, &mut v) }, SbpStatus::Ok);
    assert!((v - 2.0 * (-6.25f64).exp()).abs() < 1e-15);
}

#[test]
fn errors_are_per_thread() {
    let mut v = 0.0;
    assert_eq!(unsafe { sbp_fixed_q(1, 1, &mut v) }, SbpStatus::InvalidParameter);
    let here = last_error();
    std::thread::spawn(|| assert!(sbp_last_error_message().is_null())).join().unwrap();
    assert_eq!(last_error(), here);
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("sbproj.h")
}

#[test]
fn header_declares_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct SbpProjector SbpProjector;",
        "SBP_STATUS_OK = 0",
        "SBP_STATUS_OUT_OF_DOMAIN = 3",
        "SBP_MODEL_FIXED = 1",
        "sbp_projector_new(",
        "sbp_projector_free(",
        "sbp_project(",
        "sbp_project_batch(",
        "sbp_var_bernoulli(",
        "sbp_var_fixed(",
        "sbp_var_gaussian(",
        "sbp_fixed_q(",
        "sbp_min_m_bernoulli(",
        "sbp_min_m_fixed(",
        "sbp_bernoulli_two_sided(",
        "sbp_fixed_two_sided(",
        "sbp_last_error_message(",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
}

/// Compiles a small C client against the header when a C compiler is present.
#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(
        &src,
        r#"#include "sbproj.h"
int run(void) {
    SbpProjector *h = 0;
    double x[4] = {1, 2, 3, 4}, y[2];
    if (sbp_projector_new(SBP_MODEL_FIXED, 4, 2, 0.0, 2, 7, &h) != SBP_STATUS_OK) return 1;
    SbpStatus st = sbp_project(h, x, 4, y, 2);
    sbp_projector_free(h);
    return st == SBP_STATUS_OK ? 0 : 2;
}
"#,
    )
    .unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success());
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc);
        }
    }
    Err(())
}
