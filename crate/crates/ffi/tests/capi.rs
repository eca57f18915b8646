use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use edagger_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(ed_last_error()) }.to_string_lossy().into_owned()
}

fn new_lattice(a: &str, b: &str) -> (EdStatus, *mut EdLattice) {
    let (a, b) = (CString::new(a).unwrap(), CString::new(b).unwrap());
    let mut h = ptr::null_mut();
    let st = unsafe { ed_lattice_new(a.as_ptr(), b.as_ptr(), 1e-10, &mut h) };
    (st, h)
}

#[test]
fn lattice_lifecycle_and_functions() {
    let (st, h) = new_lattice("4", "0");
    assert_eq!(st, EdStatus::Ok);
    assert!(!h.is_null());
    let mut p = EdPeriods::default();
    assert_eq!(unsafe { ed_lattice_periods(h, &mut p) }, EdStatus::Ok);
    assert!(p.tau.re.abs() < 1e-9 && (p.tau.im - 1.0).abs() < 1e-9);
    let legendre = c64(p.eta1) * c64(p.omega2) - c64(p.eta2) * c64(p.omega1);
    assert!((legendre.norm() - 2.0 * std::f64::consts::PI).abs() < 1e-9);

    let z = EdComplex { re: 0.3, im: 0.2 };
    let (mut wp, mut dwp, mut zeta, mut sigma) = Default::default();
    assert_eq!(unsafe { ed_wp(h, z, &mut wp, &mut dwp) }, EdStatus::Ok);
    assert_eq!(unsafe { ed_zeta(h, z, &mut zeta) }, EdStatus::Ok);
    assert_eq!(unsafe { ed_sigma(h, z, &mut sigma) }, EdStatus::Ok);
    let (p_, d_) = (c64(wp), c64(dwp));
    assert!((d_ * d_ - (4.0 * p_ * p_ * p_ - 4.0 * p_)).norm() < 1e-9 * (d_ * d_).norm());

    let mut f = [EdComplex::default(); 4];
    assert_eq!(unsafe { ed_forms_f(h, 3, z, EdComplex::default(), f.as_mut_ptr()) }, EdStatus::Ok);
    assert_eq!(f[0], EdComplex { re: 1.0, im: 0.0 });
    // f⁽¹⁾(z, 0) = ζ(z)
    assert!((c64(f[1]) - c64(zeta)).norm() < 1e-12);

    let zero = EdComplex::default();
    assert_eq!(unsafe { ed_wp(h, zero, &mut wp, &mut dwp) }, EdStatus::NearPole);
    assert!(last_error().contains("guard"));
    unsafe { ed_lattice_free(h) };
    unsafe { ed_lattice_free(ptr::null_mut()) };
}

fn c64(z: EdComplex) -> edagger::C64 {
    z.into()
}

#[test]
fn error_statuses() {
    assert_eq!(new_lattice("3", "1").0, EdStatus::DegenerateCurve);
    assert!(last_error().contains("degenerate"));
    assert_eq!(new_lattice("1/0", "1").0, EdStatus::InvalidInput);
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { ed_lattice_new(ptr::null(), ptr::null(), 1e-10, &mut h) }, EdStatus::NullPointer);
    let mut out = EdComplex::default();
    assert_eq!(unsafe { ed_zeta(ptr::null(), out, &mut out) }, EdStatus::NullPointer);
    let mut dim = 0usize;
    assert_eq!(unsafe { ed_bar_kernel_dimension(EdModel::Edagger, 60, 3, &mut dim) }, EdStatus::DimensionBound);
    let (st, h) = new_lattice("5", "2");
    assert_eq!(st, EdStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { ed_lattice_free(h) };
}

#[test]
fn mzv_and_bar() {
    let k = [2u32, 1];
    let mut series = 0.0;
    let mut integral = EdComplex::default();
    assert_eq!(unsafe { ed_mzv(k.as_ptr(), 2, 1e-10, &mut series, &mut integral) }, EdStatus::Ok);
    assert!((series - 1.2020569031595942).abs() < 1e-9);
    assert!((integral.re - series).abs() < 1e-7);
    let bad = [1u32, 2];
    assert_eq!(unsafe { ed_mzv(bad.as_ptr(), 2, 1e-10, &mut series, ptr::null_mut()) }, EdStatus::InvalidInput);

    let mut dim = 0usize;
    assert_eq!(unsafe { ed_bar_kernel_dimension(EdModel::P1, 0, 4, &mut dim) }, EdStatus::Ok);
    assert_eq!(dim, 31);
}

#[test]
fn integrate_lattice_path() {
    let (_, h) = new_lattice("5", "2");
    let mut p = EdPeriods::default();
    unsafe { ed_lattice_periods(h, &mut p) };
    let z0 = (c64(p.omega1) + c64(p.omega2)) * 0.5;
    let z1 = z0 + c64(p.omega1);
    let json = format!(
        r#"{{"model": "edagger", "segments": [{{"kind": "line", "from": [{}, {}, 0, 0], "to": [{}, {}, {}, {}]}}]}}"#,
        z0.re, z0.im, z1.re, z1.im, -p.eta1.re, -p.eta1.im
    );
    let json = CString::new(json).unwrap();
    let mut out = EdComplex::default();
    let nu = [0usize];
    assert_eq!(unsafe { ed_integrate(h, json.as_ptr(), nu.as_ptr(), 1, 1e-10, &mut out) }, EdStatus::Ok);
    assert!((c64(out) + c64(p.eta1)).norm() < 1e-8);
    let w0 = [1usize];
    assert_eq!(unsafe { ed_integrate(h, json.as_ptr(), w0.as_ptr(), 1, 1e-10, &mut out) }, EdStatus::Ok);
    assert!((c64(out) - c64(p.omega1)).norm() < 1e-8);
    let garbage = CString::new("{").unwrap();
    assert_eq!(unsafe { ed_integrate(h, garbage.as_ptr(), w0.as_ptr(), 1, 1e-10, &mut out) }, EdStatus::InvalidInput);
    unsafe { ed_lattice_free(h) };
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/edagger.h")
}

#[test]
fn header_is_valid_c() {
    let st =
        Command::new("cc").args(["-std=c99", "-fsyntax-only", "-x", "c"]).arg(header()).status().expect("C compiler");
    assert!(st.success());
}

#[test]
fn c_program_links_and_runs() {
    // target/<profile>/deps/<test binary> -> target/<profile>/libedagger_ffi.a
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().parent().unwrap().join("libedagger_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include <math.h>
#include "edagger.h"
int main(void) {
    EdLattice *l = NULL;
    if (ed_lattice_new("4", "0", 1e-10, &l) != ED_STATUS_OK) return 1;
    EdPeriods p;
    if (ed_lattice_periods(l, &p) != ED_STATUS_OK) return 2;
    ed_lattice_free(l);
    if (fabs(p.tau.im - 1.0) > 1e-9) return 3;
    if (ed_lattice_new("3", "1", 1e-10, &l) != ED_STATUS_DEGENERATE_CURVE) return 4;
    printf("%s\n", ed_last_error());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("main");
    let st = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(st.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("degenerate"));
}
