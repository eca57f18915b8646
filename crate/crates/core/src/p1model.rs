//! The genus-zero model on `ℙ¹ ∖ {0, 1, ∞}`: forms `ω₀ = dz/z`, `ω₁ = dz/(z−1)`,
//! multiple zeta values by nested series and by regularized iterated
//! integrals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcx::DgaPresentation;
use crate::chenint::{self, ChenError};
use crate::exact::{self, Q};
use crate::linalg::SparseVec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MzvError {
    #[error("invalid MZV index {0:?}")]
    InvalidIndex(String),
    #[error("index {0} is not admissible (first entry must be at least 2)")]
    NotAdmissible(String),
    #[error("series did not reach tolerance {tol:e} (estimate {estimate:e})")]
    ToleranceNotReached { tol: f64, estimate: f64 },
    #[error(transparent)]
    Integral(#[from] ChenError),
}

/// Sign relating the integral of the standard word of a depth-`d` index to
/// the series value, indexed by depth: `∫ = DEPTH_SIGN[d]·ζ`.
pub const DEPTH_SIGN: [f64; 5] = [1.0, -1.0, 1.0, -1.0, 1.0];

pub fn depth_sign(d: usize) -> f64 {
    if d % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `ℚ`-combination `c₀ω₀ + c₁ω₁`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Form {
    #[serde(with = "exact::serde_q")]
    pub c0: Q,
    #[serde(with = "exact::serde_q")]
    pub c1: Q,
}

impl P1Form {
    pub fn w0() -> Self {
        P1Form { c0: Q::one(), c1: Q::zero() }
    }

    pub fn w1() -> Self {
        P1Form { c0: Q::zero(), c1: Q::one() }
    }

    pub fn letter(i: u8) -> Self {
        if i == 0 {
            Self::w0()
        } else {
            Self::w1()
        }
    }

    /// `dt`-coefficient given `z`, `z − 1` (computed without cancellation by the
    /// caller) and `dz/dt`.
    pub fn eval(&self, z: C64, zm1: C64, dz: C64) -> C64 {
        let mut v = C64::zero();
        if !self.c0.is_zero() {
            v += exact::to_f64(&self.c0) * dz / z;
        }
        if !self.c1.is_zero() {
            v += exact::to_f64(&self.c1) * dz / zm1;
        }
        v
    }
}

/// Presentation with `A¹ = ⟨ω₀, ω₁⟩` and everything else zero.
pub fn p1_dga() -> DgaPresentation {
    DgaPresentation::new(
        vec!["w0".into(), "w1".into()],
        Vec::new(),
        vec![SparseVec::new(), SparseVec::new()],
        BTreeMap::new(),
    )
    .expect("well-formed presentation")
}

/// `(k₁, …, k_d)` with all `kᵢ ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MZVIndex(Vec<u32>);

impl MZVIndex {
    pub fn new(k: Vec<u32>) -> Result<Self, MzvError> {
        if k.is_empty() || k.contains(&0) {
            return Err(MzvError::InvalidIndex(format!("{k:?}")));
        }
        Ok(MZVIndex(k))
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_admissible(&self) -> bool {
        self.0[0] >= 2
    }

    /// `ω₀^{k₁−1}ω₁ … ω₀^{k_d−1}ω₁` as letters `0`/`1`.
    pub fn word(&self) -> Vec<u8> {
        let mut w = Vec::new();
        for &k in &self.0 {
            w.extend(std::iter::repeat(0u8).take(k as usize - 1));
            w.push(1);
        }
        w
    }

    fn require_admissible(&self) -> Result<(), MzvError> {
        if !self.is_admissible() {
            return Err(MzvError::NotAdmissible(self.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for MZVIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for MZVIndex {
    type Err = MzvError;
    fn from_str(s: &str) -> Result<Self, MzvError> {
        let k = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| MzvError::InvalidIndex(s.to_string()))?;
        MZVIndex::new(k)
    }
}

/// `B₀, B₁, …, B_{n}` (with `B₁ = −½`).
fn bernoulli(n: usize) -> Vec<f64> {
    let mut b: Vec<Q> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(Q::one());
            continue;
        }
        // Σ_{j<m+1} C(m+1, j) B_j = 0
        let mut acc = Q::zero();
        let mut binom = Q::one();
        for (j, bj) in b.iter().enumerate() {
            acc += &binom * bj;
            binom = binom * exact::q_int((m + 1 - j) as i64) / exact::q_int((j + 1) as i64);
        }
        b.push(-acc / exact::q_int((m + 1) as i64));
    }
    b.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Asymptotic expansion `Σ c_e n^{−e}` in descending powers of `n`.
type Expansion = BTreeMap<u32, f64>;

/// Number of Euler–Maclaurin correction terms.
const EM_TERMS: usize = 10;

/// `Σ_{m>n} m^{−p}` as an expansion in `n` (`p ≥ 2`).
fn tail_power(p: u32, bern: &[f64]) -> Expansion {
    let mut e = Expansion::new();
    let pf = p as f64;
    *e.entry(p - 1).or_insert(0.0) += 1.0 / (pf - 1.0);
    *e.entry(p).or_insert(0.0) -= 0.5;
    // + Σ_j B_{2j}/(2j)! · p(p+1)…(p+2j−2) n^{−p−2j+1}
    let mut rising = 1.0;
    let mut fact = 1.0;
    for j in 1..=EM_TERMS {
        let k = 2 * j;
        if j == 1 {
            rising = pf;
        } else {
            rising *= (pf + k as f64 - 3.0) * (pf + k as f64 - 2.0);
        }
        fact *= ((k - 1) * k) as f64;
        *e.entry(p + k as u32 - 1).or_insert(0.0) += bern[k] / fact * rising;
    }
    e
}

/// `Σ_{m>n} m^{−a} F(m)` for an expansion `F`.
fn tail_weighted(a: u32, f: &Expansion, bern: &[f64]) -> Expansion {
    let mut out = Expansion::new();
    for (&e, &c) in f {
        for (k, v) in tail_power(a + e, bern) {
            *out.entry(k).or_insert(0.0) += c * v;
        }
    }
    out
}

fn eval_expansion(e: &Expansion, n: f64, max_exp: u32) -> f64 {
    e.iter().filter(|(k, _)| **k <= max_exp).map(|(k, c)| c * n.powi(-(*k as i32))).sum()
}

/// Value of the nested series and an error estimate, using a cutoff `m`.
fn mzv_series_at(k: &[u32], m: usize, bern: &[f64]) -> (f64, f64) {
    let d = k.len();
    // h[j] = H_j(n) = Σ_{n > n_j > … > n_d > 0} Π n_i^{−k_i}; h[d] = 1
    let mut h = vec![0.0f64; d + 1];
    h[d] = 1.0;
    let mut head = 0.0;
    for n in 1..=m {
        let nf = n as f64;
        // head accumulates n₁ = n, using H_1(n) before the update
        head += nf.powi(-(k[0] as i32)) * h[1];
        for j in 1..d {
            h[j] += nf.powi(-(k[j] as i32)) * h[j + 1];
        }
    }
    // h[j] now holds H_j(m+1). Tail: Σ_{j} H_{j+1}(m+1) · Z_m(k₁, …, k_j)
    let mut z = tail_power(k[0], bern);
    let mut tail = 0.0;
    let mut estimate = 0.0;
    let mf = m as f64;
    for j in 1..=d {
        if j > 1 {
            z = tail_weighted(k[j - 1], &z, bern);
        }
        let cut = *z.keys().next().unwrap() + 2 * EM_TERMS as u32 - 2;
        let val = eval_expansion(&z, mf, cut);
        let last: f64 = z
            .iter()
            .filter(|(e, _)| **e > cut.saturating_sub(2) && **e <= cut)
            .map(|(e, c)| (c * mf.powi(-(*e as i32))).abs())
            .sum();
        tail += h[j] * val;
        estimate += h[j].abs() * last;
    }
    let value = head + tail;
    (value, estimate + 8.0 * f64::EPSILON * value.abs() * (m as f64).sqrt())
}

/// `ζ(k₁,…,k_d) = Σ_{n₁>…>n_d>0} n₁^{−k₁}…n_d^{−k_d}` by partial sums with
/// an Euler–Maclaurin tail.
pub fn mzv_series(idx: &MZVIndex, tol: f64) -> Result<C64, MzvError> {
    idx.require_admissible()?;
    let bern = bernoulli(2 * EM_TERMS + 2);
    let mut best = f64::INFINITY;
    for m in [1000usize, 4000, 16000] {
        let (v, est) = mzv_series_at(idx.entries(), m, &bern);
        if est <= tol {
            return Ok(C64::new(v, 0.0));
        }
        best = best.min(est);
    }
    Err(MzvError::ToleranceNotReached { tol, estimate: best })
}

/// Regularized iterated integral of the standard word of `idx` along the
/// straight path from the tangential base point at `0` to the one at `1`.
pub fn mzv_integral(idx: &MZVIndex, tol: f64) -> Result<C64, MzvError> {
    idx.require_admissible()?;
    Ok(chenint::regularized_integral_p1(&idx.word(), tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcx::{bar_differential, h0_basis, BarElement, Word};
    use std::f64::consts::PI;

    fn idx(s: &str) -> MZVIndex {
        s.parse().unwrap()
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli(8);
        assert_eq!(b[1], -0.5);
        assert!((b[2] - 1.0 / 6.0).abs() < 1e-16);
        assert!((b[4] + 1.0 / 30.0).abs() < 1e-16);
        assert_eq!(b[3], 0.0);
        assert!((b[8] + 1.0 / 30.0).abs() < 1e-16);
    }

    #[test]
    fn classical_values() {
        let z2 = mzv_series(&idx("2"), 1e-12).unwrap().re;
        assert!((z2 - PI * PI / 6.0).abs() < 1e-12);
        let z4 = mzv_series(&idx("4"), 1e-12).unwrap().re;
        assert!((z4 - PI.powi(4) / 90.0).abs() < 1e-12);
        let z3 = mzv_series(&idx("3"), 1e-12).unwrap().re;
        let z21 = mzv_series(&idx("2,1"), 1e-12).unwrap().re;
        assert!((z3 - z21).abs() < 1e-11, "{z3} {z21}");
        // ζ(3,1) = π⁴/360, ζ(2,2) = π⁴/120
        let z31 = mzv_series(&idx("3,1"), 1e-12).unwrap().re;
        assert!((z31 - PI.powi(4) / 360.0).abs() < 1e-11);
        let z22 = mzv_series(&idx("2,2"), 1e-12).unwrap().re;
        assert!((z22 - PI.powi(4) / 120.0).abs() < 1e-11);
        // ζ(2,1,1) = ζ(4)
        let z211 = mzv_series(&idx("2,1,1"), 1e-11).unwrap().re;
        assert!((z211 - z4).abs() < 1e-10);
    }

    #[test]
    fn admissibility_and_parsing() {
        assert!(matches!(mzv_series(&idx("1,2"), 1e-10), Err(MzvError::NotAdmissible(_))));
        assert!("2,0".parse::<MZVIndex>().is_err());
        assert!("".parse::<MZVIndex>().is_err());
        assert_eq!(idx("3,1").word(), vec![0, 0, 1, 1]);
        assert_eq!(idx("2,1").weight(), 3);
        assert_eq!(idx("2,1").to_string(), "2,1");
    }

    #[test]
    fn sign_table_frozen_against_zeta2() {
        let v = mzv_integral(&idx("2"), 1e-10).unwrap();
        let s = mzv_series(&idx("2"), 1e-12).unwrap();
        assert!((v - DEPTH_SIGN[1] * s).norm() < 1e-8, "{v}");
        for d in 0..DEPTH_SIGN.len() {
            assert_eq!(DEPTH_SIGN[d], depth_sign(d));
        }
    }

    #[test]
    fn p1_presentation() {
        let p = p1_dga();
        assert_eq!(p.dim1(), 2);
        assert_eq!(p.dim2(), 0);
        let x = BarElement::from_word(Word::from_indices(&[0, 1, 1]));
        assert!(bar_differential(&x, &p).unwrap().is_zero());
        assert_eq!(h0_basis(&p, 3).unwrap().len(), 15);
        assert!(p.wedge(0, 1).is_empty());
    }
}
