//! Period lattices of Weierstrass cubics and the Weierstrass functions.
//!
//! Curves are `y² = 4x³ − a·x − b`. The lattice is stored in a reduced basis
//! (`τ = ω₂/ω₁` in the standard fundamental domain) and all evaluation goes
//! through `q`-expansions in the normalized variable `u = z/ω₁`.
//!
//! Quasi-periods follow the sign `η(λ) = ζ(z) − ζ(z + λ)`, the negative of
//! the usual textbook constant. With `Im(ω₂/ω₁) > 0` this gives
//! `η₁ω₂ − η₂ω₁ = −2πi`; the sign actually observed is stored in
//! [`LatticeData::legendre_sign`].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{self, Q};

const I: C64 = C64::new(0.0, 1.0);

/// Points closer than this fraction of the shortest period to a lattice point
/// are rejected.
pub const GUARD_FRACTION: f64 = 1e-6;

/// Default construction tolerance for the Eisenstein round trip.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("degenerate curve: a^3 - 27 b^2 = 0")]
    DegenerateCurve,
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("tolerance {0:e} outside [1e-14, 1e-6]")]
    InvalidTolerance(f64),
    #[error("Eisenstein weight {0} not in {{4, 6, 8, 10, 12}}")]
    InvalidWeight(u32),
    #[error("point within guard radius of the lattice (distance {distance:e}, guard {guard:e})")]
    NearPole { distance: f64, guard: f64 },
    #[error("quasi-period probes disagree by {0:e}")]
    ProbeInconsistency(f64),
    #[error("{0} is not a lattice element")]
    NotLatticeElement(C64),
    #[error("invalid lattice basis: {0}")]
    InvalidBasis(String),
}

/// A Weierstrass model `y² = 4x³ − a x − b` with rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(with = "exact::serde_q")]
    a: Q,
    #[serde(with = "exact::serde_q")]
    b: Q,
}

impl CurveSpec {
    pub fn new(a: Q, b: Q) -> Result<Self, LatticeError> {
        let c = CurveSpec { a, b };
        if c.discriminant().is_zero() {
            return Err(LatticeError::DegenerateCurve);
        }
        Ok(c)
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self, LatticeError> {
        Self::new(exact::q_int(a), exact::q_int(b))
    }

    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &Q {
        &self.b
    }

    /// `a³ − 27 b²`.
    pub fn discriminant(&self) -> Q {
        &self.a * &self.a * &self.a - exact::q_int(27) * &self.b * &self.b
    }

    pub fn a_f64(&self) -> f64 {
        exact::to_f64(&self.a)
    }

    pub fn b_f64(&self) -> f64 {
        exact::to_f64(&self.b)
    }
}

/// A period lattice together with everything needed for fast evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeData {
    pub omega1: C64,
    pub omega2: C64,
    /// `η(ω₁)` in the `ζ(z) − ζ(z+λ)` convention.
    pub eta1: C64,
    /// `η(ω₂)` in the `ζ(z) − ζ(z+λ)` convention.
    pub eta2: C64,
    pub tau: C64,
    pub g2: C64,
    pub g3: C64,
    /// `s` with `η₁ω₂ − η₂ω₁ ≈ s·2πi`.
    pub legendre_sign: i8,
    /// Relative residuals of `60G₄ − g₂` and `140G₆ − g₃` at construction.
    pub eisenstein_residuals: [f64; 2],
    #[serde(skip)]
    cache: SeriesCache,
}

#[derive(Debug, Clone)]
struct SeriesCache {
    /// `e^{2πiτ}`
    q: C64,
    /// `q^n` for `n = 1..`, until negligible
    qpow: Vec<C64>,
    /// `G₂(τ)` for the normalized lattice `ℤ + τℤ` (Eisenstein summation).
    g2_tau: C64,
    guard: f64,
}

impl LatticeData {
    /// Builds lattice data from an arbitrary basis; `g₂`, `g₃` are computed
    /// from the Eisenstein series.
    pub fn from_basis(omega1: C64, omega2: C64) -> Result<Self, LatticeError> {
        if omega1.norm() == 0.0 || !omega1.is_finite() || !omega2.is_finite() {
            return Err(LatticeError::InvalidBasis("zero or non-finite period".into()));
        }
        let t = omega2 / omega1;
        if t.im.abs() < 1e-12 {
            return Err(LatticeError::InvalidBasis("periods are R-linearly dependent".into()));
        }
        let (w1, w2) = if t.im > 0.0 { (omega1, omega2) } else { (omega1, -omega2) };
        let (w1, w2) = reduce_basis(w1, w2)?;
        let mut lat = Self::assemble(w1, w2)?;
        lat.g2 = 60.0 * lat.eisenstein(4)?;
        lat.g3 = 140.0 * lat.eisenstein(6)?;
        Ok(lat)
    }

    fn assemble(omega1: C64, omega2: C64) -> Result<Self, LatticeError> {
        let tau = omega2 / omega1;
        let q = (2.0 * PI * I * tau).exp();
        let mut qpow = Vec::new();
        let mut p = q;
        while p.norm() > 1e-40 && qpow.len() < 200 {
            qpow.push(p);
            p *= q;
        }
        let mut lambert = C64::zero();
        for (k, qn) in qpow.iter().enumerate() {
            let n = (k + 1) as f64;
            lambert += n * qn / (1.0 - qn);
        }
        let g2_tau = PI * PI / 3.0 * (1.0 - 24.0 * lambert);
        let guard = GUARD_FRACTION * omega1.norm().min(omega2.norm());
        let mut lat = LatticeData {
            omega1,
            omega2,
            eta1: C64::zero(),
            eta2: C64::zero(),
            tau,
            g2: C64::zero(),
            g3: C64::zero(),
            legendre_sign: 0,
            eisenstein_residuals: [0.0; 2],
            cache: SeriesCache { q, qpow, g2_tau, guard },
        };
        lat.init_quasi_periods()?;
        Ok(lat)
    }

    /// Quasi-periods from raw (unreduced) series differences at two probes.
    fn init_quasi_periods(&mut self) -> Result<(), LatticeError> {
        let tau = self.tau;
        let g2 = self.cache.g2_tau;
        // ζ_raw(u + 1) − ζ_raw(u) = G₂ exactly in the q-expansion.
        let text1 = g2;
        let probes = [C64::new(0.1234, 0.0), C64::new(0.3217, 0.0) - 0.05 * tau];
        let mut vals = [C64::zero(); 2];
        for (v, d) in vals.iter_mut().zip(probes) {
            let u = -0.5 * tau + d;
            *v = self.zeta_raw(u + tau) - self.zeta_raw(u);
        }
        let disagreement = (vals[0] - vals[1]).norm();
        if disagreement > 1e-9 * (1.0 + vals[0].norm()) {
            return Err(LatticeError::ProbeInconsistency(disagreement));
        }
        let text2 = 0.5 * (vals[0] + vals[1]);
        self.eta1 = -text1 / self.omega1;
        self.eta2 = -text2 / self.omega1;
        let leg = (self.eta1 * self.omega2 - self.eta2 * self.omega1) / (2.0 * PI * I);
        self.legendre_sign = if leg.re >= 0.0 { 1 } else { -1 };
        Ok(())
    }

    pub fn guard_radius(&self) -> f64 {
        self.cache.guard
    }

    /// Nome `q = e^{2πiτ}`.
    pub fn nome(&self) -> C64 {
        self.cache.q
    }

    /// `η₁ω₂ − η₂ω₁`.
    pub fn legendre_value(&self) -> C64 {
        self.eta1 * self.omega2 - self.eta2 * self.omega1
    }

    pub fn lattice_point(&self, m: i64, n: i64) -> C64 {
        self.omega1 * m as f64 + self.omega2 * n as f64
    }

    /// Real coordinates `(α, β)` with `z = α ω₁ + β ω₂`.
    pub fn coordinates(&self, z: C64) -> (f64, f64) {
        let u = z / self.omega1;
        let beta = u.im / self.tau.im;
        let alpha = u.re - beta * self.tau.re;
        (alpha, beta)
    }

    /// Splits `z = z₀ + mω₁ + nω₂` with `z₀` in the half-open parallelogram
    /// `[0,1)ω₁ + [0,1)ω₂`. Coordinates within `1e-12` of an integer are
    /// snapped to it.
    pub fn reduce_mod_lattice(&self, z: C64) -> (C64, (i64, i64)) {
        let (a, b) = self.coordinates(z);
        let snap_floor = |x: f64| {
            let r = x.round();
            if (x - r).abs() < 1e-12 {
                r
            } else {
                x.floor()
            }
        };
        let m = snap_floor(a) as i64;
        let n = snap_floor(b) as i64;
        (z - self.lattice_point(m, n), (m, n))
    }

    /// Like [`reduce_mod_lattice`](Self::reduce_mod_lattice) but centred:
    /// coordinates of `z₀` lie in `[−½, ½]`.
    pub fn reduce_centered(&self, z: C64) -> (C64, (i64, i64)) {
        let (a, b) = self.coordinates(z);
        let m = a.round() as i64;
        let n = b.round() as i64;
        (z - self.lattice_point(m, n), (m, n))
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: C64) -> f64 {
        let (z0, _) = self.reduce_centered(z);
        let mut best = f64::INFINITY;
        for m in -1..=1 {
            for n in -1..=1 {
                best = best.min((z0 - self.lattice_point(m, n)).norm());
            }
        }
        best
    }

    /// If `lam` is (numerically) a lattice element, its coordinates.
    pub fn lattice_coordinates(&self, lam: C64) -> Result<(i64, i64), LatticeError> {
        let (a, b) = self.coordinates(lam);
        let (m, n) = (a.round(), b.round());
        let scale = 1.0 + a.abs().max(b.abs());
        if (a - m).abs() > 1e-8 * scale || (b - n).abs() > 1e-8 * scale {
            return Err(LatticeError::NotLatticeElement(lam));
        }
        Ok((m as i64, n as i64))
    }

    fn check_guard(&self, z: C64) -> Result<(), LatticeError> {
        let d = self.distance_to_lattice(z);
        if d <= self.cache.guard {
            return Err(LatticeError::NearPole { distance: d, guard: self.cache.guard });
        }
        Ok(())
    }

    /// `η(λ)` for `λ = mω₁ + nω₂`, from the cached quasi-periods.
    pub fn eta_of(&self, m: i64, n: i64) -> C64 {
        self.eta1 * m as f64 + self.eta2 * n as f64
    }

    /// `η(λ) = ζ(z) − ζ(z + λ)`, evaluated at two probe points that must
    /// agree.
    pub fn eta_lambda(&self, lam: C64) -> Result<C64, LatticeError> {
        let _ = self.lattice_coordinates(lam)?;
        let probes = [0.31 * self.omega1 + 0.27 * self.omega2, -0.19 * self.omega1 + 0.41 * self.omega2];
        let mut vals = [C64::zero(); 2];
        for (v, p) in vals.iter_mut().zip(probes) {
            *v = self.wzeta(p)? - self.wzeta(p + lam)?;
        }
        let disagreement = (vals[0] - vals[1]).norm();
        let scale = 1.0 + vals[0].norm();
        if disagreement > 1e-9 * scale {
            return Err(LatticeError::ProbeInconsistency(disagreement));
        }
        Ok(vals[0])
    }

    /// `G_k(Λ) = Σ' λ^{−k}` for `k ∈ {4, 6, 8, 10, 12}` via its Lambert
    /// series; the geometric tail is below `1e-18` relative.
    pub fn eisenstein(&self, k: u32) -> Result<C64, LatticeError> {
        let zeta_2k = match k {
            4 => PI.powi(4) / 90.0,
            6 => PI.powi(6) / 945.0,
            8 => PI.powi(8) / 9450.0,
            10 => PI.powi(10) / 93555.0,
            12 => 691.0 * PI.powi(12) / 638512875.0,
            _ => return Err(LatticeError::InvalidWeight(k)),
        };
        let mut fact = 1.0;
        for j in 1..k {
            fact *= j as f64;
        }
        let mut lambert = C64::zero();
        for (idx, qn) in self.cache.qpow.iter().enumerate() {
            let n = (idx + 1) as f64;
            let term = n.powi(k as i32 - 1) * qn / (1.0 - qn);
            lambert += term;
            if term.norm() < 1e-18 * lambert.norm() {
                break;
            }
        }
        let coeff = 2.0 * (2.0 * PI * I).powu(k) / fact;
        let g_tau = 2.0 * zeta_2k + coeff * lambert;
        Ok(g_tau / self.omega1.powu(k))
    }

    /// Unreduced `ζ(u; ℤ + τℤ)`.
    fn zeta_raw(&self, u: C64) -> C64 {
        let e = (2.0 * PI * I * u).exp();
        let mut acc = C64::zero();
        for qn in &self.cache.qpow {
            let x = qn * e;
            let y = qn / e;
            let t = -x / (1.0 - x) + y / (1.0 - y);
            acc += t;
            if t.norm() < 1e-18 && qn.norm() < 1e-18 {
                break;
            }
        }
        self.cache.g2_tau * u + PI * cot_pi(u) + 2.0 * PI * I * acc
    }

    /// `(℘, ℘′)` for the normalized lattice at centred `u`.
    fn wp_raw(&self, u: C64) -> (C64, C64) {
        let (csc2, cot_csc2) = csc2_pi(u);
        let mut s0 = C64::zero();
        let mut s1 = C64::zero();
        let e = (2.0 * PI * I * u).exp();
        for qn in &self.cache.qpow {
            let x = qn * e;
            let y = qn / e;
            let ox = 1.0 - x;
            let oy = 1.0 - y;
            let t0 = x / (ox * ox) + y / (oy * oy);
            let t1 = x * (1.0 + x) / (ox * ox * ox) - y * (1.0 + y) / (oy * oy * oy);
            s0 += t0;
            s1 += t1;
            if qn.norm() < 1e-18 {
                break;
            }
        }
        let p = -self.cache.g2_tau + PI * PI * csc2 - 4.0 * PI * PI * s0;
        let dp = -2.0 * PI.powi(3) * cot_csc2 - 8.0 * PI.powi(3) * I * s1;
        (p, dp)
    }

    fn sigma_raw(&self, u: C64) -> C64 {
        let e = (2.0 * PI * I * u).exp();
        let mut prod = C64::new(1.0, 0.0);
        for qn in &self.cache.qpow {
            let one = 1.0 - qn;
            prod *= (1.0 - qn * e) * (1.0 - qn / e) / (one * one);
            if qn.norm() < 1e-18 {
                break;
            }
        }
        (PI * u).sin() / PI * (0.5 * self.cache.g2_tau * u * u).exp() * prod
    }

    /// `(℘(z), ℘′(z))`.
    pub fn wp(&self, z: C64) -> Result<(C64, C64), LatticeError> {
        self.check_guard(z)?;
        let (z0, _) = self.reduce_centered(z);
        let (p, dp) = self.wp_raw(z0 / self.omega1);
        let w = self.omega1;
        Ok((p / (w * w), dp / (w * w * w)))
    }

    /// Weierstrass `ζ(z)`.
    pub fn wzeta(&self, z: C64) -> Result<C64, LatticeError> {
        self.check_guard(z)?;
        let (z0, (m, n)) = self.reduce_centered(z);
        Ok(self.zeta_raw(z0 / self.omega1) / self.omega1 - self.eta_of(m, n))
    }

    /// `ζ(z)` together with the reduction data, for callers that need to
    /// track `η` of the shift.
    pub fn wzeta_reduced(&self, z: C64) -> Result<(C64, (i64, i64)), LatticeError> {
        self.check_guard(z)?;
        let (z0, mn) = self.reduce_centered(z);
        Ok((self.zeta_raw(z0 / self.omega1) / self.omega1, mn))
    }

    /// Weierstrass `σ(z)`; entire, so no guard applies.
    pub fn wsigma(&self, z: C64) -> C64 {
        let (z0, (m, n)) = self.reduce_centered(z);
        let base = self.omega1 * self.sigma_raw(z0 / self.omega1);
        if m == 0 && n == 0 {
            return base;
        }
        let lam = self.lattice_point(m, n);
        let parity = (m + n + m * n).rem_euclid(2);
        let sign = if parity == 0 { 1.0 } else { -1.0 };
        // σ(z₀+λ) = ±e^{−η(λ)(z₀+λ/2)} σ(z₀)
        sign * (-self.eta_of(m, n) * (z0 + 0.5 * lam)).exp() * base
    }

    /// Taylor coefficients `℘^{(k)}(z)/k!` for `k = 0..len`, from
    /// `℘″ = 6℘² − g₂/2`.
    pub fn wp_taylor(&self, z: C64, len: usize) -> Result<Vec<C64>, LatticeError> {
        let (p, dp) = self.wp(z)?;
        Ok(wp_taylor_from(p, dp, self.g2, len))
    }

    /// Laurent coefficients `c_k = (2k+1) G_{2k+2}` of
    /// `℘(w) = 1/w² + Σ_{k≥1} c_k w^{2k}` for `k = 1..=count`.
    pub fn laurent_coefficients(&self, count: usize) -> Vec<C64> {
        let mut c = vec![C64::zero(); count + 1];
        if count >= 1 {
            c[1] = self.g2 / 20.0;
        }
        if count >= 2 {
            c[2] = self.g3 / 28.0;
        }
        for k in 3..=count {
            let mut s = C64::zero();
            for m in 1..=k - 2 {
                s += c[m] * c[k - 1 - m];
            }
            c[k] = 3.0 / ((2 * k + 3) as f64 * (k - 2) as f64) * s;
        }
        c.remove(0);
        c
    }
}

pub(crate) fn wp_taylor_from(p: C64, dp: C64, g2: C64, len: usize) -> Vec<C64> {
    let mut c = vec![C64::zero(); len.max(2)];
    c[0] = p;
    c[1] = dp;
    // (k+2)(k+1) c_{k+2} = 6 Σ_{j≤k} c_j c_{k−j} − (g₂/2) δ_{k0}
    for k in 0..len.saturating_sub(2) {
        let mut s = C64::zero();
        for j in 0..=k {
            s += c[j] * c[k - j];
        }
        s *= 6.0;
        if k == 0 {
            s -= 0.5 * g2;
        }
        c[k + 2] = s / ((k + 2) as f64 * (k + 1) as f64);
    }
    c.truncate(len);
    c
}

/// `π cot(πu)` without overflow for large `|Im u|`.
fn cot_pi(u: C64) -> C64 {
    if u.im >= 0.0 {
        let e = (2.0 * PI * I * u).exp(); // |e| ≤ 1
        I * (e + 1.0) / (e - 1.0)
    } else {
        let e = (-2.0 * PI * I * u).exp();
        -I * (e + 1.0) / (e - 1.0)
    }
}

/// `(1/sin²(πu), cos(πu)/sin³(πu))` without overflow.
fn csc2_pi(u: C64) -> (C64, C64) {
    let (e, flip) = if u.im >= 0.0 { ((2.0 * PI * I * u).exp(), 1.0) } else { ((-2.0 * PI * I * u).exp(), -1.0) };
    let d = e - 1.0;
    let csc2 = -4.0 * e / (d * d);
    let cot = I * (e + 1.0) / d;
    (csc2, flip * cot * csc2)
}

/// Moves `τ = ω₂/ω₁` into `{|Re τ| ≤ ½, |τ| ≥ 1}` with the boundary
/// normalized to `Re τ ≥ 0` on the unit arc and `Re τ > −½` on the sides.
fn reduce_basis(mut w1: C64, mut w2: C64) -> Result<(C64, C64), LatticeError> {
    for _ in 0..10_000 {
        let t = w2 / w1;
        // ties at |Re τ| = ½ are left to the normalization below
        let shift = if t.re.abs() > 0.5 + 1e-12 { t.re.round() } else { 0.0 };
        if shift != 0.0 {
            w2 -= shift * w1;
            continue;
        }
        if t.norm() < 1.0 - 1e-12 {
            let (a, b) = (w2, -w1);
            w1 = a;
            w2 = b;
            continue;
        }
        let mut t = w2 / w1;
        if t.re < -0.5 + 1e-12 {
            w2 += w1;
            t = w2 / w1;
        }
        if t.norm() < 1.0 + 1e-12 && t.re < -1e-12 {
            let (a, b) = (w2, -w1);
            w1 = a;
            w2 = b;
            let t2 = w2 / w1;
            if t2.re < -0.5 + 1e-12 {
                w2 += w1;
            }
        }
        return Ok((w1, w2));
    }
    Err(LatticeError::ConvergenceFailure("basis reduction did not terminate".into()))
}

/// Roots of `4x³ − a x − b` (Durand–Kerner, then Newton polishing).
pub fn cubic_roots(a: C64, b: C64) -> Result<[C64; 3], LatticeError> {
    let f = |x: C64| x * x * x - a / 4.0 * x - b / 4.0;
    let df = |x: C64| 3.0 * x * x - a / 4.0;
    let scale = 1.0 + a.norm().sqrt() + b.norm().cbrt();
    let seed = C64::new(0.4, 0.9) * scale;
    let mut r = [C64::new(1.0, 0.0) * scale, seed, seed * seed / scale];
    let mut converged = false;
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            let step = f(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-15 * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LatticeError::ConvergenceFailure("cubic roots did not converge".into()));
    }
    for x in r.iter_mut() {
        for _ in 0..3 {
            let d = df(*x);
            if d.norm() == 0.0 {
                break;
            }
            *x -= f(*x) / d;
        }
    }
    Ok(r)
}

/// Arithmetic–geometric mean with the optimal branch at every step.
pub fn agm(mut x: C64, mut y: C64) -> Result<C64, LatticeError> {
    for _ in 0..100 {
        if (x - y).norm() <= 1e-16 * x.norm() {
            return Ok(x);
        }
        let a = 0.5 * (x + y);
        let mut g = (x * y).sqrt();
        if (a - g).norm() > (a + g).norm() {
            g = -g;
        }
        x = a;
        y = g;
    }
    if (x - y).norm() <= 1e-13 * x.norm() {
        return Ok(x);
    }
    Err(LatticeError::ConvergenceFailure("AGM did not converge".into()))
}

/// Period `2∫ dx/y` around the straight cut `[p, r]`, where `o` is the third
/// root (which must not lie on the cut).
fn cut_period(p: C64, r: C64, o: C64) -> Result<C64, LatticeError> {
    let alpha = (o - p).sqrt();
    let mut beta = (o - r).sqrt();
    if (beta / alpha).re < 0.0 {
        beta = -beta;
    }
    Ok(C64::new(PI, 0.0) / agm(alpha, beta)?)
}

/// Period lattice of `y² = 4x³ − ax − b`.
pub fn lattice_from_curve(c: &CurveSpec, tol: f64) -> Result<LatticeData, LatticeError> {
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(LatticeError::InvalidTolerance(tol));
    }
    if c.discriminant().is_zero() {
        return Err(LatticeError::DegenerateCurve);
    }
    let a = C64::new(c.a_f64(), 0.0);
    let b = C64::new(c.b_f64(), 0.0);
    let roots = cubic_roots(a, b)?;
    // exclude the longest edge of the root triangle; the other two cuts share
    // a vertex and their cycles form a basis of H₁
    let edges = [(0usize, 1usize, 2usize), (1, 2, 0), (0, 2, 1)];
    let (i, j, k) = *edges
        .iter()
        .max_by(|x, y| {
            let dx = (roots[x.0] - roots[x.1]).norm();
            let dy = (roots[y.0] - roots[y.1]).norm();
            dx.partial_cmp(&dy).unwrap()
        })
        .unwrap();
    let p1 = cut_period(roots[k], roots[i], roots[j])?;
    let p2 = cut_period(roots[k], roots[j], roots[i])?;
    let mut lat = LatticeData::from_basis(p1, p2)?;
    let g4 = lat.eisenstein(4)?;
    let g6 = lat.eisenstein(6)?;
    let s4 = a.norm().max(b.norm().powf(2.0 / 3.0));
    let s6 = b.norm().max(a.norm().powf(1.5));
    let r4 = (60.0 * g4 - a).norm() / s4;
    let r6 = (140.0 * g6 - b).norm() / s6;
    if !(r4 <= tol && r6 <= tol) {
        return Err(LatticeError::ConvergenceFailure(format!(
            "Eisenstein round trip residuals {r4:e}, {r6:e} exceed {tol:e}"
        )));
    }
    lat.g2 = a;
    lat.g3 = b;
    lat.eisenstein_residuals = [r4, r6];
    Ok(lat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(a: i64, b: i64) -> LatticeData {
        lattice_from_curve(&CurveSpec::from_ints(a, b).unwrap(), 1e-10).unwrap()
    }

    fn close(x: C64, y: C64, tol: f64) -> bool {
        (x - y).norm() <= tol * (1.0 + y.norm())
    }

    #[test]
    fn hexagonal_lattices_reduce() {
        for b in [-8, -1, 1, 8] {
            let l = lattice_from_curve(&CurveSpec::from_ints(0, b).unwrap(), 1e-10).unwrap();
            let t = l.tau;
            assert!(t.re.abs() <= 0.5 + 1e-9 && t.norm() >= 1.0 - 1e-9, "b={b}: tau {t}");
        }
    }

    #[test]
    fn degenerate_curve_rejected() {
        assert_eq!(CurveSpec::from_ints(3, 1), Err(LatticeError::DegenerateCurve));
        assert_eq!(CurveSpec::from_ints(0, 0), Err(LatticeError::DegenerateCurve));
    }

    #[test]
    fn tolerance_range_enforced() {
        let c = CurveSpec::from_ints(4, 0).unwrap();
        assert!(matches!(lattice_from_curve(&c, 1e-3), Err(LatticeError::InvalidTolerance(_))));
        assert!(matches!(lattice_from_curve(&c, 1e-16), Err(LatticeError::InvalidTolerance(_))));
    }

    #[test]
    fn square_and_hexagonal_tau() {
        assert!(close(lat(4, 0).tau, I, 1e-12));
        let rho = C64::new(0.5, 3f64.sqrt() / 2.0);
        assert!(close(lat(0, 4).tau, rho, 1e-12));
    }

    #[test]
    fn symmetric_lattices_kill_eisenstein() {
        assert!(lat(4, 0).eisenstein(6).unwrap().norm() < 1e-12);
        assert!(lat(0, 4).eisenstein(4).unwrap().norm() < 1e-12);
        assert_eq!(lat(4, 0).eisenstein(5), Err(LatticeError::InvalidWeight(5)));
        assert_eq!(lat(4, 0).eisenstein(2), Err(LatticeError::InvalidWeight(2)));
    }

    #[test]
    fn legendre_sign_is_minus_in_this_convention() {
        for (a, b) in [(4, 0), (0, 4), (5, 2), (-3, 7)] {
            let l = lat(a, b);
            assert_eq!(l.legendre_sign, -1);
            assert!(close(l.legendre_value(), -2.0 * PI * I, 1e-10));
        }
    }

    #[test]
    fn parity_of_wp_and_zeta_and_sigma() {
        let l = lat(5, 2);
        let z = C64::new(0.37, 0.21);
        let (p, dp) = l.wp(z).unwrap();
        let (pm, dpm) = l.wp(-z).unwrap();
        assert!(close(p, pm, 1e-12) && close(dp, -dpm, 1e-12));
        assert!(close(l.wzeta(-z).unwrap(), -l.wzeta(z).unwrap(), 1e-12));
        assert!(close(l.wsigma(-z), -l.wsigma(z), 1e-12));
    }

    #[test]
    fn small_z_limits() {
        let l = lat(5, 2);
        let z = C64::new(1e-4, 0.5e-4);
        assert!((l.wzeta(z).unwrap() - 1.0 / z).norm() < 1e-8);
        assert!(close(l.wsigma(z) / z, C64::new(1.0, 0.0), 1e-8));
    }

    #[test]
    fn near_pole_is_an_error() {
        let l = lat(4, 0);
        let z = l.omega1 + C64::new(1e-9, 0.0);
        assert!(matches!(l.wp(z), Err(LatticeError::NearPole { .. })));
        assert!(matches!(l.wzeta(C64::zero()), Err(LatticeError::NearPole { .. })));
        // σ is entire
        assert!(l.wsigma(C64::zero()).norm() < 1e-300);
    }

    #[test]
    fn reduce_mod_lattice_examples() {
        let l = lat(5, 2);
        let z = 0.25 * l.omega1 + 0.5 * l.omega2;
        let (z0, mn) = l.reduce_mod_lattice(z);
        assert_eq!(mn, (0, 0));
        assert!((z0 - z).norm() < 1e-15);
        let (z0, mn) = l.reduce_mod_lattice(l.omega1 + l.omega2);
        assert_eq!(mn, (1, 1));
        assert!(z0.norm() < 1e-12);
        let z = C64::new(-7.3, 11.9);
        let (z0, (m, n)) = l.reduce_mod_lattice(z);
        assert!((z0 + l.lattice_point(m, n) - z).norm() < 1e-12);
        let (a, b) = l.coordinates(z0);
        assert!((0.0..1.0).contains(&a) && (0.0..1.0).contains(&b));
    }

    #[test]
    fn eta_of_zero_and_additivity() {
        let l = lat(5, 2);
        assert!(l.eta_lambda(C64::zero()).unwrap().norm() < 1e-12);
        let e1 = l.eta_lambda(l.omega1).unwrap();
        let e2 = l.eta_lambda(l.omega2).unwrap();
        let e12 = l.eta_lambda(l.omega1 + l.omega2).unwrap();
        assert!(close(e12, e1 + e2, 1e-9));
        assert!(close(e1, l.eta1, 1e-9));
        assert!(matches!(l.eta_lambda(0.5 * l.omega1), Err(LatticeError::NotLatticeElement(_))));
    }

    #[test]
    fn agm_matches_known_value() {
        // AGM(1, √2) = 1.19814023473559220744...
        let m = agm(C64::new(1.0, 0.0), C64::new(2f64.sqrt(), 0.0)).unwrap();
        assert!((m.re - 1.198_140_234_735_592_2).abs() < 1e-15);
    }

    #[test]
    fn laurent_coefficients_match_eisenstein() {
        let l = lat(5, 2);
        let c = l.laurent_coefficients(5);
        // c_k = (2k+1) G_{2k+2}
        for (k, w) in [(3usize, 8u32), (4, 10), (5, 12)] {
            let g = l.eisenstein(w).unwrap();
            assert!(close(c[k - 1], (2 * k + 1) as f64 * g, 1e-10), "k={k}");
        }
    }
}
