//! C ABI over the `edagger` library. Every function returns an [`EdStatus`];
//! on failure, [`ed_last_error`] describes the most recent error on the
//! calling thread. Lattices are opaque handles released with
//! [`ed_lattice_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use edagger::barcx::{h0_basis_bounded, BarError, DEFAULT_DIMENSION_BOUND};
use edagger::chenint::{chen_transport, Ambient, ChenError, PathSpec};
use edagger::logforms::{self, ExtLattice, FormError};
use edagger::p1model::{self, MZVIndex, MzvError};
use edagger::wlattice::{lattice_from_curve, CurveSpec, LatticeData, LatticeError};
use edagger::C64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DegenerateCurve = 3,
    NearPole = 4,
    NumericalFailure = 5,
    DimensionBound = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for EdComplex {
    fn from(z: C64) -> Self {
        EdComplex { re: z.re, im: z.im }
    }
}

impl From<EdComplex> for C64 {
    fn from(z: EdComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdPeriods {
    pub omega1: EdComplex,
    pub omega2: EdComplex,
    pub eta1: EdComplex,
    pub eta2: EdComplex,
    pub tau: EdComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdModel {
    Edagger = 0,
    P1 = 1,
}

/// Opaque period lattice.
pub struct EdLattice {
    inner: LatticeData,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(EdStatus, String);

impl From<LatticeError> for Fail {
    fn from(e: LatticeError) -> Self {
        let st = match e {
            LatticeError::DegenerateCurve => EdStatus::DegenerateCurve,
            LatticeError::NearPole { .. } => EdStatus::NearPole,
            LatticeError::ConvergenceFailure(_) | LatticeError::ProbeInconsistency(_) => EdStatus::NumericalFailure,
            _ => EdStatus::InvalidInput,
        };
        Fail(st, e.to_string())
    }
}

impl From<FormError> for Fail {
    fn from(e: FormError) -> Self {
        match e {
            FormError::Lattice(l) => l.into(),
            _ => Fail(EdStatus::InvalidInput, e.to_string()),
        }
    }
}

impl From<ChenError> for Fail {
    fn from(e: ChenError) -> Self {
        match e {
            ChenError::GuardViolation { .. } => Fail(EdStatus::NearPole, e.to_string()),
            ChenError::QuadratureFailure(_) | ChenError::FitInstability { .. } => {
                Fail(EdStatus::NumericalFailure, e.to_string())
            }
            ChenError::Lattice(l) => l.into(),
            ChenError::Form(f) => f.into(),
            _ => Fail(EdStatus::InvalidInput, e.to_string()),
        }
    }
}

impl From<MzvError> for Fail {
    fn from(e: MzvError) -> Self {
        match e {
            MzvError::Integral(c) => c.into(),
            MzvError::ToleranceNotReached { .. } => Fail(EdStatus::NumericalFailure, e.to_string()),
            _ => Fail(EdStatus::InvalidInput, e.to_string()),
        }
    }
}

impl From<BarError> for Fail {
    fn from(e: BarError) -> Self {
        let st = match e {
            BarError::DimensionBound { .. } => EdStatus::DimensionBound,
            _ => EdStatus::InvalidInput,
        };
        Fail(st, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(EdStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EdStatus::Ok
        }
        Ok(Err(Fail(st, msg))) => {
            set_error(&msg);
            st
        }
        Err(_) => {
            set_error("internal panic");
            EdStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(EdStatus::InvalidInput, format!("{what} is not UTF-8")))
}

unsafe fn lattice<'a>(h: *const EdLattice) -> Result<&'a LatticeData, Fail> {
    h.as_ref().map(|l| &l.inner).ok_or_else(|| null("lattice"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn ed_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Lattice of `y² = 4x³ − ax − b`, with `a`, `b` given as rationals `"p/q"`.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_lattice_new(
    a: *const c_char,
    b: *const c_char,
    tol: f64,
    out: *mut *mut EdLattice,
) -> EdStatus {
    guard(|| {
        let parse =
            |s: &str| edagger::exact::parse_rational(s).map_err(|e| Fail(EdStatus::InvalidInput, e.to_string()));
        let (a, b) = (parse(text(a, "a")?)?, parse(text(b, "b")?)?);
        if out.is_null() {
            return Err(null("out"));
        }
        let l = lattice_from_curve(&CurveSpec::new(a, b)?, tol)?;
        write(out, Box::into_raw(Box::new(EdLattice { inner: l })), "out")
    })
}

/// Lattice spanned by `w1`, `w2`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_lattice_from_basis(w1: EdComplex, w2: EdComplex, out: *mut *mut EdLattice) -> EdStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let l = LatticeData::from_basis(w1.into(), w2.into())?;
        write(out, Box::into_raw(Box::new(EdLattice { inner: l })), "out")
    })
}

/// # Safety
/// `l` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ed_lattice_free(l: *mut EdLattice) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// # Safety
/// `l` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_lattice_periods(l: *const EdLattice, out: *mut EdPeriods) -> EdStatus {
    guard(|| {
        let l = lattice(l)?;
        let p = EdPeriods {
            omega1: l.omega1.into(),
            omega2: l.omega2.into(),
            eta1: l.eta1.into(),
            eta2: l.eta2.into(),
            tau: l.tau.into(),
        };
        write(out, p, "out")
    })
}

/// `℘(z)` and `℘′(z)`.
///
/// # Safety
/// `l` must be a live handle; `wp` and `wp_prime` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_wp(
    l: *const EdLattice,
    z: EdComplex,
    wp: *mut EdComplex,
    wp_prime: *mut EdComplex,
) -> EdStatus {
    guard(|| {
        let (p, dp) = lattice(l)?.wp(z.into())?;
        write(wp, p.into(), "wp")?;
        write(wp_prime, dp.into(), "wp_prime")
    })
}

/// # Safety
/// `l` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_zeta(l: *const EdLattice, z: EdComplex, out: *mut EdComplex) -> EdStatus {
    guard(|| write(out, lattice(l)?.wzeta(z.into())?.into(), "out"))
}

/// # Safety
/// `l` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_sigma(l: *const EdLattice, z: EdComplex, out: *mut EdComplex) -> EdStatus {
    guard(|| write(out, lattice(l)?.wsigma(z.into()).into(), "out"))
}

/// `f⁽⁰⁾(z, s), …, f⁽ⁿ⁾(z, s)` into `out[0..=n]`.
///
/// # Safety
/// `l` must be a live handle; `out` must have room for `n + 1` values.
#[no_mangle]
pub unsafe extern "C" fn ed_forms_f(
    l: *const EdLattice,
    n: usize,
    z: EdComplex,
    s: EdComplex,
    out: *mut EdComplex,
) -> EdStatus {
    guard(|| {
        let ext = ExtLattice::new(lattice(l)?.clone(), n);
        let f = ext.f_all(z.into(), s.into())?;
        if out.is_null() {
            return Err(null("out"));
        }
        for (k, v) in f.into_iter().enumerate() {
            out.add(k).write(v.into());
        }
        Ok(())
    })
}

/// `ζ(k₁, …, k_d)` by series, and the iterated integral of its word (equal
/// to `(−1)^d` times the series value).
///
/// # Safety
/// `k` must point to `depth` entries; `series` and `integral` must be
/// writable (either may be null to skip it).
#[no_mangle]
pub unsafe extern "C" fn ed_mzv(
    k: *const u32,
    depth: usize,
    tol: f64,
    series: *mut f64,
    integral: *mut EdComplex,
) -> EdStatus {
    guard(|| {
        if k.is_null() || depth == 0 {
            return Err(null("k"));
        }
        let idx = MZVIndex::new(std::slice::from_raw_parts(k, depth).to_vec())?;
        if !series.is_null() {
            series.write(p1model::mzv_series(&idx, tol.max(1e-13))?.re);
        }
        if !integral.is_null() {
            integral.write(p1model::mzv_integral(&idx, tol)?.into());
        }
        Ok(())
    })
}

/// Dimension of the closed degree-zero bar elements of length `≤ ell` for
/// the given model (`truncation` is ignored for `P1`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_bar_kernel_dimension(
    model: EdModel,
    truncation: usize,
    ell: usize,
    out: *mut usize,
) -> EdStatus {
    guard(|| {
        let p = match model {
            EdModel::Edagger => logforms::dga_presentation(truncation),
            EdModel::P1 => p1model::p1_dga(),
        };
        let basis = h0_basis_bounded(&p, ell, DEFAULT_DIMENSION_BOUND)?;
        write(out, basis.len(), "out")
    })
}

/// Iterated integral of the word `letters[0..len]` (basis indices: `0` is
/// `ν`, `i ≥ 1` is `ω⁽ⁱ⁻¹⁾`; for `P1`, `0` and `1`) along a path given as
/// JSON. `l` may be null for `P1` paths.
///
/// # Safety
/// `path_json` must be a NUL-terminated string, `letters` must point to `len`
/// entries and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ed_integrate(
    l: *const EdLattice,
    path_json: *const c_char,
    letters: *const usize,
    len: usize,
    tol: f64,
    out: *mut EdComplex,
) -> EdStatus {
    guard(|| {
        let path: PathSpec = serde_json::from_str(text(path_json, "path_json")?)
            .map_err(|e| Fail(EdStatus::InvalidInput, e.to_string()))?;
        if letters.is_null() || len == 0 {
            return Err(null("letters"));
        }
        let word = std::slice::from_raw_parts(letters, len);
        let mut alphabet: Vec<usize> = word.to_vec();
        alphabet.sort_unstable();
        alphabet.dedup();
        let pos: Vec<usize> = word.iter().map(|w| alphabet.binary_search(w).unwrap()).collect();
        let value = match path.model() {
            edagger::chenint::Model::P1 => {
                let a = Ambient::P1.alphabet(&alphabet)?;
                chen_transport(&a, &path, len, tol)?.get(&pos)
            }
            edagger::chenint::Model::Edagger => {
                let n = alphabet.iter().max().map_or(0, |m| m.saturating_sub(1));
                let ext = ExtLattice::new(lattice(l)?.clone(), n);
                let a = Ambient::Edagger(&ext).alphabet(&alphabet)?;
                chen_transport(&a, &path, len, tol)?.get(&pos)
            }
        };
        write(out, value.into(), "out")
    })
}
