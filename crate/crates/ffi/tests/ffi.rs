use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use canard_ffi::*;

fn last_error() -> String {
    let n = canard_last_error_length();
    let mut buf = vec![0 as c_char; n];
    assert_eq!(unsafe { canard_last_error_message(buf.as_mut_ptr(), n) }, CanardStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn cz(re: f64, im: f64) -> CanardComplex {
    CanardComplex { re, im }
}

#[test]
fn series_handle_round_trip() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { canard_vdp_series_new(3, &mut s) }, CanardStatus::Ok);
    let mut n = 0usize;
    assert_eq!(unsafe { canard_vdp_series_order(s, &mut n) }, CanardStatus::Ok);
    assert_eq!(n, 3);
    let mut needed = 0usize;
    assert_eq!(unsafe { canard_vdp_series_coefficient(s, 1, ptr::null_mut(), 0, &mut needed) }, CanardStatus::Ok);
    assert_eq!(needed, "-1/8".len() + 1);
    let mut small = [0 as c_char; 3];
    assert_eq!(unsafe { canard_vdp_series_coefficient(s, 1, small.as_mut_ptr(), 3, ptr::null_mut()) }, CanardStatus::BufferTooSmall);
    let mut buf = [0 as c_char; 16];
    assert_eq!(unsafe { canard_vdp_series_coefficient(s, 1, buf.as_mut_ptr(), 16, ptr::null_mut()) }, CanardStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(), "-1/8");
    let mut b1 = 0.0;
    assert_eq!(unsafe { canard_vdp_series_bn(s, 1, &mut b1) }, CanardStatus::Ok);
    assert!((b1 + std::f64::consts::E / 6.0).abs() < 1e-15);
    assert_eq!(unsafe { canard_vdp_series_bn(s, 0, &mut b1) }, CanardStatus::ComputationFailed);
    assert!(!last_error().is_empty());
    unsafe { canard_vdp_series_free(s) };
    unsafe { canard_vdp_series_free(ptr::null_mut()) };
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { canard_vdp_series_new(2, ptr::null_mut()) }, CanardStatus::NullPointer);
    assert!(last_error().contains("null"));
    let mut v = 0.0;
    assert_eq!(unsafe { canard_relief_value(ptr::null(), cz(0.0, 0.0), &mut v) }, CanardStatus::NullPointer);
    assert_eq!(unsafe { canard_shoot_vdp(0.2, 16, ptr::null_mut()) }, CanardStatus::NullPointer);
}

#[test]
fn relief_and_descent() {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { canard_relief_new(CanardReliefKind::Brusselator, 0.0, &mut r) }, CanardStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { canard_relief_value(r, cz(-1.0, 0.0), &mut v) }, CanardStatus::Ok);
    assert!((v - 1.0 / 3.0).abs() < 1e-14);
    unsafe { canard_relief_free(r) };

    let mut r = ptr::null_mut();
    assert_eq!(unsafe { canard_relief_new(CanardReliefKind::Vdp, 0.0, &mut r) }, CanardStatus::Ok);
    let east = [cz(9.0, 0.0), cz(1.0, 0.0)];
    let (mut c, mut d) = (0.0, false);
    assert_eq!(unsafe { canard_relief_descent_check(r, east.as_ptr(), 2, &mut c, &mut d) }, CanardStatus::Ok);
    assert!(d && c > 0.0);
    let one = [cz(1.0, 0.0)];
    assert_eq!(unsafe { canard_relief_descent_check(r, one.as_ptr(), 1, &mut c, &mut d) }, CanardStatus::InvalidArgument);
    unsafe { canard_relief_free(r) };
    assert_eq!(unsafe { canard_relief_new(CanardReliefKind::Vdp, f64::NAN, &mut r) }, CanardStatus::InvalidArgument);
    assert!(r.is_null());
}

#[test]
fn integrate_linear_field() {
    let field = CString::new("linear-test").unwrap();
    let path = [cz(0.0, 0.0), cz(1.0, 0.0)];
    let mut end = cz(0.0, 0.0);
    let st = unsafe { canard_integrate(field.as_ptr(), cz(0.1, 0.0), cz(-1.0, 0.0), path.as_ptr(), 2, cz(1.0, 0.0), 1e-10, 16, &mut end) };
    assert_eq!(st, CanardStatus::Ok, "{}", last_error());
    assert!((end.re / (-10.0f64).exp() - 1.0).abs() < 1e-6, "{end:?}");
    let bad = CString::new("nope").unwrap();
    let st = unsafe { canard_integrate(bad.as_ptr(), cz(0.1, 0.0), cz(-1.0, 0.0), path.as_ptr(), 2, cz(1.0, 0.0), 1e-10, 16, &mut end) };
    assert_eq!(st, CanardStatus::InvalidArgument);
    assert!(last_error().contains("nope"));
}

#[test]
fn shooting_and_stokes() {
    let mut r = CanardShootResult::default();
    assert_eq!(unsafe { canard_shoot_vdp(0.14, 16, &mut r) }, CanardStatus::Ok);
    assert!((r.parameter.re - 0.9800).abs() < 5e-4 && (r.observable - 1.23).abs() < 0.05, "{r:?}");
    assert_eq!(r.precision_digits, 16);
    assert_eq!(unsafe { canard_shoot_brusselator(0.9, 16, &mut r) }, CanardStatus::ComputationFailed);
    assert!(last_error().contains("eps"));
    let mut d = CanardStokesDiff::default();
    assert_eq!(unsafe { canard_vdp_stokes_diff(3.5, 0, &mut d) }, CanardStatus::Ok);
    assert!(d.ratio > 0.85 && d.ratio < 1.15, "{d:?}");
    assert_eq!(unsafe { canard_brusselator_stokes_diff(-1.0, 0, &mut d) }, CanardStatus::ComputationFailed);
}

#[test]
fn success_clears_the_error() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { canard_vdp_series_new(1, ptr::null_mut()) }, CanardStatus::NullPointer);
    assert_eq!(unsafe { canard_vdp_series_new(1, &mut s) }, CanardStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { canard_vdp_series_free(s) };
    let v = unsafe { CStr::from_ptr(canard_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/canard.h")).unwrap();
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let names: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(names.len() >= 15, "{names:?}");
    for n in names {
        assert!(header.contains(&format!(" {n}(")) || header.contains(&format!("*{n}(")), "{n} missing from canard.h");
    }
}

/// Compiles and runs a C program against the header and the static library.
#[test]
fn c_program_links_against_the_static_library() {
    let Ok(cc) = std::env::var("CC").or_else(|_| which("cc").ok_or(())) else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcanard_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let out = tempfile_path("canard_smoke");
    let status = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("alpha = 0.9684"));
}

fn which(name: &str) -> Option<String> {
    std::env::var_os("PATH")?
        .to_str()?
        .split(':')
        .map(|d| PathBuf::from(d).join(name))
        .find(|p| p.is_file())
        .map(|p| p.to_string_lossy().into_owned())
}

fn tempfile_path(stem: &str) -> PathBuf {
    std::env::temp_dir().join(format!("{stem}_{}", std::process::id()))
}
