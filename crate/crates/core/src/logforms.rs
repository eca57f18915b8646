//! Logarithmic one-forms `ν`, `ω⁽ⁿ⁾` on `E†`, realized on the universal cover
//! `ℂ²` with coordinates `(z, s)`.
//!
//! `ν` pulls back to `ds` and `ω⁽ⁿ⁾` to `f⁽ⁿ⁾(z,s) dz`, where
//!
//! ```text
//! e^{−sw} σ(z+w) / (σ(z) σ(w)) = Σ_{n≥0} f⁽ⁿ⁾(z,s) w^{n−1}.
//! ```
//!
//! The `w`-coefficients are computed from power series: `log σ(z+w) − log σ(z)
//! = Σ_{k≥1} ζ^{(k−1)}(z) wᵏ/k!` and `log(σ(w)/w) = −Σ_{k≥2} G_{2k} w^{2k}/2k`,
//! so everything reduces to `ζ`, `℘`, `℘′` and the Eisenstein numbers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcx::{BarError, DgaPresentation};
use crate::exact::{self, Q};
use crate::linalg::SparseVec;
use crate::wlattice::{self, LatticeData, LatticeError};

/// Default truncation order for `ω⁽ⁿ⁾`.
pub const DEFAULT_TRUNCATION: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("order {n} exceeds truncation N = {max}")]
    TruncationExceeded { n: usize, max: usize },
    #[error("unknown form symbol {0:?}")]
    UnknownSymbol(String),
    #[error("residue is only defined for n >= 1")]
    NoResidue,
}

impl From<FormError> for BarError {
    fn from(e: FormError) -> Self {
        BarError::UnknownSymbol(e.to_string())
    }
}

/// `E†` in the analytic model `ℂ²/L`, `L = {(λ, −η(λ))}`, together with the
/// truncation order of the `ω⁽ⁿ⁾` family.
#[derive(Debug, Clone)]
pub struct ExtLattice {
    base: LatticeData,
    truncation: usize,
    /// coefficients of `−log(σ(w)/w)`, index = power of `w`
    log_sigma_w: Vec<C64>,
    /// shortest period length `m` and `G_k·mᵏ` for even `k` (index `k`)
    unit: f64,
    scaled_eisenstein: Vec<C64>,
}

/// Below this fraction of the shortest period the kernel coefficients come
/// from the double expansion in `(z, w)`.
const NEAR_ORIGIN: f64 = 0.2;
/// Weights of Eisenstein series kept beyond the requested order.
const ORIGIN_WEIGHTS: usize = 120;

impl ExtLattice {
    pub fn new(base: LatticeData, truncation: usize) -> Self {
        let len = truncation + 2;
        let mut log_sigma_w = vec![C64::zero(); len];
        let laurent = base.laurent_coefficients(len / 2 + 1);
        // G_{2k} = c_{k−1}/(2k−1)
        for k in 2.. {
            if 2 * k >= len {
                break;
            }
            let g = laurent[k - 2] / (2 * k - 1) as f64;
            log_sigma_w[2 * k] = g / (2 * k) as f64;
        }
        let unit = [base.omega1, base.omega2, base.omega1 + base.omega2, base.omega1 - base.omega2]
            .iter()
            .map(|w| w.norm())
            .fold(f64::INFINITY, f64::min);
        let scaled_eisenstein = scaled_eisenstein(&base, unit, ORIGIN_WEIGHTS + truncation.max(16) + 2);
        ExtLattice { base, truncation, log_sigma_w, unit, scaled_eisenstein }
    }

    pub fn base(&self) -> &LatticeData {
        &self.base
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Deck transformation `(z, s) ↦ (z + λ, s − η(λ))` for `λ = mω₁ + nω₂`.
    pub fn act(&self, (m, n): (i64, i64), z: C64, s: C64) -> (C64, C64) {
        (z + self.base.lattice_point(m, n), s - self.base.eta_of(m, n))
    }

    /// Representative of `(z, s)` with `z` in the centred fundamental domain.
    pub fn reduce(&self, z: C64, s: C64) -> (C64, C64) {
        let (z0, (m, n)) = self.base.reduce_centered(z);
        (z0, s + self.base.eta_of(m, n))
    }

    /// `σ(z+w) / (σ(z) σ(w))`.
    pub fn kernel_f(&self, z: C64, w: C64) -> Result<C64, FormError> {
        let g = self.base.guard_radius();
        for p in [z, w, z + w] {
            let d = self.base.distance_to_lattice(p);
            if d <= g {
                return Err(LatticeError::NearPole { distance: d, guard: g }.into());
            }
        }
        let b = &self.base;
        Ok(b.wsigma(z + w) / (b.wsigma(z) * b.wsigma(w)))
    }

    /// `g_m(z)` for `m = 0..=order`, the coefficients of `w^{m−1}` in
    /// `σ(z+w)/(σ(z)σ(w))`.
    fn kernel_coefficients(&self, z: C64, order: usize) -> Result<Vec<C64>, FormError> {
        let (zeta, _) = self.base.wzeta_reduced(z)?;
        let (z0, _) = self.base.reduce_centered(z);
        let (p, dp) = self.base.wp(z0)?;
        let taylor = wlattice::wp_taylor_from(p, dp, self.base.g2, order.max(2));
        // P(w) = ζ w − Σ_{k≥2} p_{k−2} w^k/(k(k−1)) − log(σ(w)/w)
        let mut log = vec![C64::zero(); order + 1];
        if order >= 1 {
            log[1] = zeta;
        }
        for (k, slot) in log.iter_mut().enumerate().skip(2) {
            *slot = -taylor[k - 2] / (k * (k - 1)) as f64;
            if k < self.log_sigma_w.len() {
                *slot += self.log_sigma_w[k];
            }
        }
        Ok(series_exp(&log))
    }

    /// Same as `kernel_coefficients` for `|z|` well inside the period cell,
    /// from `(1/z + 1/w)·exp(−Σ_k G_k/k·((z+w)ᵏ − zᵏ − wᵏ))`.
    fn origin_coefficients(&self, z: C64, order: usize) -> Vec<C64> {
        let owned;
        let gk = if self.scaled_eisenstein.len() >= order + ORIGIN_WEIGHTS {
            &self.scaled_eisenstein
        } else {
            owned = scaled_eisenstein(&self.base, self.unit, order + ORIGIN_WEIGHTS + 2);
            &owned
        };
        let u = z / self.unit;
        let mut c = vec![C64::zero(); order + 1];
        for (j, slot) in c.iter_mut().enumerate().skip(1) {
            let mut acc = C64::zero();
            let mut binom = 1.0;
            let mut upow = C64::new(1.0, 0.0);
            // running binom(k, j) and u^{k−j} for k = j, j+1, …
            for k in j..gk.len() {
                if k > j {
                    binom *= k as f64 / (k - j) as f64;
                    upow *= u;
                }
                if k >= 4 && k % 2 == 0 && k > j {
                    acc += gk[k] / k as f64 * binom * upow;
                }
            }
            *slot = -acc * self.unit.powi(-(j as i32));
        }
        let e = series_exp(&c);
        (0..=order).map(|m| if m == 0 { e[0] } else { e[m - 1] / z + e[m] }).collect()
    }

    /// `f⁽ⁿ⁾(z, s)` for `n = 0..=N`.
    pub fn f_all(&self, z: C64, s: C64) -> Result<Vec<C64>, FormError> {
        self.f_range(z, s, self.truncation)
    }

    /// `f⁽⁰⁾, …, f⁽ᵒʳᵈᵉʳ⁾` at `(z, s)`, ignoring the truncation order.
    pub fn f_range(&self, z: C64, s: C64, order: usize) -> Result<Vec<C64>, FormError> {
        let (z0, s0) = self.reduce(z, s);
        let g = if z0.norm() < NEAR_ORIGIN * self.unit {
            let gd = self.base.guard_radius();
            if z0.norm() <= gd {
                return Err(LatticeError::NearPole { distance: z0.norm(), guard: gd }.into());
            }
            // one extra order: g_m needs e_m
            let mut g = self.origin_coefficients(z0, order + 1);
            g.truncate(order + 1);
            g
        } else {
            self.kernel_coefficients(z0, order)?
        };
        // multiply by e^{−sw}
        let mut e = vec![C64::new(1.0, 0.0); order + 1];
        for j in 1..=order {
            e[j] = e[j - 1] * (-s0) / j as f64;
        }
        Ok((0..=order).map(|n| (0..=n).map(|j| e[j] * g[n - j]).sum()).collect())
    }

    /// `f⁽ⁿ⁾(z, s)`, the `dz`-coefficient of `ω⁽ⁿ⁾`.
    pub fn f_n(&self, z: C64, s: C64, n: usize) -> Result<C64, FormError> {
        if n > self.truncation {
            return Err(FormError::TruncationExceeded { n, max: self.truncation });
        }
        Ok(self.f_range(z, s, n)?[n])
    }

    /// `(dz, ds)` coefficients of a combination of `ν`, `ω⁽ⁿ⁾` at `(z, s)`.
    pub fn pullback_coeff(&self, e: &FormElement, z: C64, s: C64) -> Result<(C64, C64), FormError> {
        let top = e.max_order();
        if top > self.truncation {
            return Err(FormError::TruncationExceeded { n: top, max: self.truncation });
        }
        let f = if e.has_omega() { self.f_range(z, s, top)? } else { Vec::new() };
        Ok(e.evaluate(&f))
    }

    /// `dz∧ds` coefficient of `ν∧ω⁽ⁿ⁾`, which is `−f⁽ⁿ⁾`.
    pub fn two_form_coeff(&self, n: usize, z: C64, s: C64) -> Result<C64, FormError> {
        Ok(-self.f_n(z, s, n)?)
    }
}

/// `G_k·mᵏ` for `k < len` (zero for odd `k` and `k < 4`), from the Laurent
/// recurrence of `℘` on the lattice rescaled to shortest period `1`.
fn scaled_eisenstein(base: &LatticeData, unit: f64, len: usize) -> Vec<C64> {
    let count = len / 2;
    let mut c = vec![C64::zero(); count + 1];
    if count >= 1 {
        c[1] = base.g2 * unit.powi(4) / 20.0;
    }
    if count >= 2 {
        c[2] = base.g3 * unit.powi(6) / 28.0;
    }
    for k in 3..=count {
        let mut s = C64::zero();
        for m in 1..=k - 2 {
            s += c[m] * c[k - 1 - m];
        }
        c[k] = 3.0 / ((2 * k + 3) as f64 * (k - 2) as f64) * s;
    }
    let mut g = vec![C64::zero(); len];
    // c_k = (2k+1) G_{2k+2}
    for (k, ck) in c.iter().enumerate().skip(1) {
        if 2 * k + 2 < len {
            g[2 * k + 2] = ck / (2 * k + 1) as f64;
        }
    }
    g
}

/// `exp` of a power series with zero constant term.
fn series_exp(p: &[C64]) -> Vec<C64> {
    let n = p.len();
    let mut e = vec![C64::zero(); n];
    e[0] = C64::new(1.0, 0.0);
    for m in 1..n {
        let mut acc = C64::zero();
        for k in 1..=m {
            acc += k as f64 * p[k] * e[m - k];
        }
        e[m] = acc / m as f64;
    }
    e
}

/// `(−s)^{n−1}/(n−1)!`, the residue of `ω⁽ⁿ⁾` along `z = 0` as a function of
/// the fiber coordinate.
pub fn residue_expected(n: usize, s: C64) -> Result<C64, FormError> {
    if n == 0 {
        return Err(FormError::NoResidue);
    }
    let mut r = C64::new(1.0, 0.0);
    for j in 1..n {
        r *= -s / j as f64;
    }
    Ok(r)
}

/// `ν` or `ω⁽ⁿ⁾`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormSymbol {
    Nu,
    Omega(usize),
}

impl FormSymbol {
    /// Index in the degree-1 basis of [`dga_presentation`].
    pub fn basis_index(self) -> usize {
        match self {
            FormSymbol::Nu => 0,
            FormSymbol::Omega(n) => n + 1,
        }
    }

    pub fn from_basis_index(i: usize) -> Self {
        if i == 0 {
            FormSymbol::Nu
        } else {
            FormSymbol::Omega(i - 1)
        }
    }
}

impl fmt::Display for FormSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormSymbol::Nu => write!(f, "nu"),
            FormSymbol::Omega(n) => write!(f, "w{n}"),
        }
    }
}

impl FromStr for FormSymbol {
    type Err = FormError;
    fn from_str(s: &str) -> Result<Self, FormError> {
        let t = s.trim();
        if t == "nu" {
            return Ok(FormSymbol::Nu);
        }
        t.strip_prefix('w')
            .and_then(|n| n.parse().ok())
            .map(FormSymbol::Omega)
            .ok_or_else(|| FormError::UnknownSymbol(s.to_string()))
    }
}

/// Exact rational combination of `ν`, `ω⁽⁰⁾, ω⁽¹⁾, …`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormElement {
    coeffs: BTreeMap<FormSymbol, Q>,
}

impl FormElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn symbol(s: FormSymbol) -> Self {
        let mut e = Self::zero();
        e.add(s, Q::one());
        e
    }

    pub fn nu() -> Self {
        Self::symbol(FormSymbol::Nu)
    }

    pub fn omega(n: usize) -> Self {
        Self::symbol(FormSymbol::Omega(n))
    }

    pub fn add(&mut self, s: FormSymbol, c: Q) {
        let e = self.coeffs.entry(s).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&s);
        }
    }

    pub fn with(mut self, s: FormSymbol, c: Q) -> Self {
        self.add(s, c);
        self
    }

    pub fn coeff(&self, s: FormSymbol) -> Q {
        self.coeffs.get(&s).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormSymbol, &Q)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn has_omega(&self) -> bool {
        self.coeffs.keys().any(|s| matches!(s, FormSymbol::Omega(_)))
    }

    fn max_order(&self) -> usize {
        self.coeffs
            .keys()
            .filter_map(|s| match s {
                FormSymbol::Omega(n) => Some(*n),
                FormSymbol::Nu => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// `(dz, ds)` coefficients given `f[n] = f⁽ⁿ⁾` at the point.
    pub fn evaluate(&self, f: &[C64]) -> (C64, C64) {
        let mut dz = C64::zero();
        let mut ds = C64::zero();
        for (s, c) in &self.coeffs {
            let c = exact::to_f64(c);
            match s {
                FormSymbol::Nu => ds += c,
                FormSymbol::Omega(n) => dz += c * f[*n],
            }
        }
        (dz, ds)
    }
}

/// Degree-1 basis names `nu, w0, …, wN`.
pub fn deg1_names(n: usize) -> Vec<String> {
    std::iter::once(FormSymbol::Nu).chain((0..=n).map(FormSymbol::Omega)).map(|s| s.to_string()).collect()
}

/// The truncated DGA: `A¹ = ⟨ν, ω⁽⁰⁾…ω⁽ᴺ⁾⟩`, `A² = ⟨ν∧ω⁽⁰⁾…ν∧ω⁽ᴺ⁾⟩`,
/// `dν = dω⁽⁰⁾ = 0`, `dω⁽ⁿ⁾ = −ν∧ω⁽ⁿ⁻¹⁾`, `ν∧ω⁽ⁿ⁾` a basis element and all
/// other products of one-forms zero.
pub fn dga_presentation(n: usize) -> DgaPresentation {
    let deg1 = deg1_names(n);
    let deg2: Vec<String> = (0..=n).map(|k| format!("nu^w{k}")).collect();
    let mut d1 = vec![SparseVec::new(); n + 2];
    for k in 1..=n {
        d1[k + 1].insert(k - 1, -Q::one());
    }
    let mut wedge = BTreeMap::new();
    for k in 0..=n {
        wedge.insert((0, k + 1), SparseVec::from([(k, Q::one())]));
    }
    DgaPresentation::new(deg1, deg2, d1, wedge).expect("well-formed presentation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcx::Letter;
    use crate::wlattice::{lattice_from_curve, CurveSpec};

    fn ext() -> ExtLattice {
        let l = lattice_from_curve(&CurveSpec::from_ints(5, 2).unwrap(), 1e-10).unwrap();
        ExtLattice::new(l, 6)
    }

    fn close(x: C64, y: C64, tol: f64) -> bool {
        (x - y).norm() <= tol * (1.0 + y.norm())
    }

    /// Cauchy coefficients of `e^{−sw}σ(z+w)/(σ(z)σ(w))` on `|w| = ρ`; the only
    /// singularities in `w` are the lattice points.
    fn cauchy(e: &ExtLattice, z: C64, s: C64, rho: f64, order: usize) -> Vec<C64> {
        let m = 256;
        let mut c = vec![C64::zero(); order + 1];
        for j in 0..m {
            let w = C64::from_polar(rho, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64);
            let k = (-s * w).exp() * e.kernel_f(z, w).unwrap();
            for (n, cn) in c.iter_mut().enumerate() {
                *cn += k * w.powi(1 - n as i32) / m as f64;
            }
        }
        c
    }

    #[test]
    fn coefficients_match_kernel_near_and_far() {
        let e = ext();
        let unit = e.base().omega1.norm().min(e.base().omega2.norm());
        let s = C64::new(0.3, -0.2);
        for frac in [0.05, 0.15, 0.199, 0.201, 0.3, 0.45] {
            let z = C64::from_polar(frac * unit, 1.1);
            let f = e.f_range(z, s, 7).unwrap();
            let c = cauchy(&e, z, s, 0.5 * unit, 7);
            for n in 0..=7 {
                assert!(close(f[n], c[n], 1e-9), "frac {frac}, n {n}: {} vs {}", f[n], c[n]);
            }
        }
    }

    #[test]
    fn low_orders_in_closed_form() {
        let x = ext();
        let b = x.base();
        for (z, s) in [(C64::new(0.3, 0.2), C64::new(0.7, -0.4)), (C64::new(-1.1, 0.9), C64::new(2.0, 1.0))] {
            let zeta = b.wzeta(z).unwrap();
            let (p, _) = b.wp(z).unwrap();
            assert!(close(x.f_n(z, s, 0).unwrap(), C64::new(1.0, 0.0), 1e-13));
            assert!(close(x.f_n(z, s, 1).unwrap(), zeta - s, 1e-12));
            let f2 = ((zeta - s) * (zeta - s) - p) / 2.0;
            assert!(close(x.f_n(z, s, 2).unwrap(), f2, 1e-11));
        }
    }

    #[test]
    fn truncation_is_enforced() {
        let x = ext();
        assert_eq!(x.f_n(C64::new(0.3, 0.2), C64::zero(), 7), Err(FormError::TruncationExceeded { n: 7, max: 6 }));
        let e = FormElement::omega(9);
        assert!(x.pullback_coeff(&e, C64::new(0.3, 0.2), C64::zero()).is_err());
    }

    #[test]
    fn kernel_symmetry_and_pole() {
        let x = ext();
        let (z, w) = (C64::new(0.31, 0.17), C64::new(-0.22, 0.4));
        assert!(close(x.kernel_f(z, w).unwrap(), x.kernel_f(w, z).unwrap(), 1e-12));
        let w = C64::new(1e-5, 0.0);
        assert!(close(w * x.kernel_f(z, w).unwrap(), C64::new(1.0, 0.0), 1e-4));
        assert!(x.kernel_f(z, C64::zero()).is_err());
    }

    #[test]
    fn residues() {
        assert_eq!(residue_expected(1, C64::new(3.0, 1.0)).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(residue_expected(2, C64::zero()).unwrap(), C64::zero());
        assert!(close(residue_expected(3, C64::new(2.0, 0.0)).unwrap(), C64::new(2.0, 0.0), 1e-15));
        assert_eq!(residue_expected(0, C64::zero()), Err(FormError::NoResidue));
    }

    #[test]
    fn pullback_examples() {
        let x = ext();
        let (z, s) = (C64::new(0.4, -0.3), C64::new(0.25, 0.5));
        let nu = x.pullback_coeff(&FormElement::nu(), z, s).unwrap();
        assert_eq!(nu, (C64::zero(), C64::new(1.0, 0.0)));
        let w0 = x.pullback_coeff(&FormElement::omega(0), z, s).unwrap();
        assert!(close(w0.0, C64::new(1.0, 0.0), 1e-13) && w0.1 == C64::zero());
        let e = FormElement::omega(1).with(FormSymbol::Nu, exact::q_int(2));
        let (dz, ds) = x.pullback_coeff(&e, z, s).unwrap();
        assert!(close(dz, x.base().wzeta(z).unwrap() - s, 1e-12));
        assert_eq!(ds, C64::new(2.0, 0.0));
    }

    #[test]
    fn presentation_structure() {
        let p = dga_presentation(3);
        assert_eq!(p.dim1(), 5);
        assert_eq!(p.dim2(), 4);
        // dω⁽¹⁾ = −ν∧ω⁽⁰⁾
        assert_eq!(p.differential(2), &SparseVec::from([(0, -Q::one())]));
        assert!(p.differential(0).is_empty() && p.differential(1).is_empty());
        assert_eq!(p.wedge(2, 3), SparseVec::new());
        assert_eq!(p.wedge(3, 0), SparseVec::from([(2, -Q::one())]));
        assert_eq!(p.wedge(0, 0), SparseVec::new());
        assert!(p.is_consistent());
        assert_eq!(p.letter_by_name("w2"), Some(Letter::one(3)));
    }

    #[test]
    fn symbols_parse() {
        assert_eq!("nu".parse::<FormSymbol>().unwrap(), FormSymbol::Nu);
        assert_eq!("w12".parse::<FormSymbol>().unwrap(), FormSymbol::Omega(12));
        assert!("x1".parse::<FormSymbol>().is_err());
        assert_eq!(FormSymbol::from_basis_index(FormSymbol::Omega(4).basis_index()), FormSymbol::Omega(4));
    }
}
