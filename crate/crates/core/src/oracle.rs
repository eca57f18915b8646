//! Independent reference computations used to cross-check the evaluators:
//! lattice sums organized by rows, closed-form cubic roots, contour
//! integrals, winding numbers and surface integrals.
//!
//! Nothing here calls the q-series code in [`crate::wlattice`].

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use num_traits::Zero;

use crate::chenint::{PathSpec, Segment};
use crate::logforms::{ExtLattice, FormError};

/// Rows `|n| ≤ ROWS` are summed; terms decay like `e^{−2π|n| Im τ}`.
const ROWS: i64 = 60;

fn cot(u: C64) -> C64 {
    u.cos() / u.sin()
}

fn csc2(u: C64) -> C64 {
    let s = u.sin();
    1.0 / (s * s)
}

/// `(ω₁, ω₂)` normalized so that `Im(ω₂/ω₁) > 0`.
fn oriented(w1: C64, w2: C64) -> (C64, C64, C64) {
    let tau = w2 / w1;
    if tau.im > 0.0 {
        (w1, w2, tau)
    } else {
        (w1, -w2, -tau)
    }
}

fn small(term: C64, acc: C64) -> bool {
    term.norm() <= 1e-18 * (1.0 + acc.norm())
}

/// `℘(z)` as `Σ_n Σ_m` over rows of the lattice.
pub fn wp_rows(w1: C64, w2: C64, z: C64) -> C64 {
    let (w1, w2, tau) = oriented(w1, w2);
    let k = PI / w1;
    let mut acc = k * k * csc2(k * z) - k * k / 3.0;
    for n in 1..=ROWS {
        let nf = n as f64;
        let c = k * k * csc2(PI * nf * tau);
        let term = k * k * (csc2(k * (z - nf * w2)) + csc2(k * (z + nf * w2))) - 2.0 * c;
        acc += term;
        if n > 2 && small(term, acc) {
            break;
        }
    }
    acc
}

/// `ζ(z)` by rows.
pub fn zeta_rows(w1: C64, w2: C64, z: C64) -> C64 {
    let (w1, w2, tau) = oriented(w1, w2);
    let k = PI / w1;
    let mut acc = k * cot(k * z) + z * k * k / 3.0;
    for n in 1..=ROWS {
        let nf = n as f64;
        let mut term = C64::zero();
        for sgn in [1.0, -1.0] {
            let x = sgn * nf;
            term += k * (cot(k * (z - x * w2)) + cot(PI * x * tau)) + z * k * k * csc2(PI * x * tau);
        }
        acc += term;
        if n > 2 && small(term, acc) {
            break;
        }
    }
    acc
}

/// `σ(z)` by rows of the Weierstrass product.
pub fn sigma_rows(w1: C64, w2: C64, z: C64) -> C64 {
    let (w1, _, tau) = oriented(w1, w2);
    let k = PI / w1;
    let u = k * z;
    let head = if u.norm() < 1e-300 { C64::new(1.0, 0.0) } else { u.sin() / u };
    let mut log_acc = C64::zero();
    let mut prod = z * head * (z * z * k * k / 6.0).exp();
    for n in 1..=ROWS {
        let nf = n as f64;
        let mut row = C64::new(1.0, 0.0);
        let mut ex = C64::zero();
        for sgn in [1.0, -1.0] {
            let x = sgn * nf;
            row *= (PI * x * tau - u).sin() / (PI * x * tau).sin();
            ex += z * k * cot(PI * x * tau) + 0.5 * z * z * k * k * csc2(PI * x * tau);
        }
        let term = row.ln() + ex;
        log_acc += term;
        if n > 2 && small(term, C64::new(1.0, 0.0)) {
            break;
        }
    }
    prod *= log_acc.exp();
    prod
}

/// Polynomials `P_j` with `dʲ/duʲ cot u = P_j(cot u)`, coefficients in
/// increasing degree.
fn cot_derivative_polys(jmax: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0, 1.0]];
    for j in 0..jmax {
        let p = &out[j];
        // d/du P(c) = P'(c)·(−1 − c²)
        let mut q = vec![0.0; p.len() + 1];
        for (i, &a) in p.iter().enumerate().skip(1) {
            let d = a * i as f64;
            q[i - 1] -= d;
            q[i + 1] -= d;
        }
        out.push(q);
    }
    out
}

fn poly_eval(p: &[f64], c: C64) -> C64 {
    p.iter().rev().fold(C64::zero(), |acc, &a| acc * c + a)
}

/// `G_{2k} = Σ' λ^{−2k}`, summed by rows with closed-form row sums.
pub fn eisenstein_rows(w1: C64, w2: C64, k: u32) -> C64 {
    let p = 2 * k as usize;
    let (w1, _, tau) = oriented(w1, w2);
    let polys = cot_derivative_polys(p - 1);
    let kk = PI / w1;
    let zeta_2k: f64 = (1..200_000).map(|m: u64| (m as f64).powi(-(p as i32))).sum();
    let mut acc = 2.0 * zeta_2k / w1.powi(p as i32);
    let mut fact = 1.0;
    for i in 1..p {
        fact *= i as f64;
    }
    let sign = if (p - 1) % 2 == 0 { 1.0 } else { -1.0 };
    for n in 1..=ROWS {
        let mut term = C64::zero();
        for x in [n as f64, -(n as f64)] {
            // Σ_m (x ω₂ + m ω₁)^{−p} = (−1)^{p−1}/(p−1)! · k^p · P_{p−1}(cot(π x τ))
            term += sign / fact * kk.powi(p as i32) * poly_eval(&polys[p - 1], cot(PI * x * tau));
        }
        acc += term;
        if n > 2 && small(term, acc) {
            break;
        }
    }
    acc
}

/// Roots of `4x³ − ax − b` by Cardano's formula.
pub fn cardano_roots(a: f64, b: f64) -> [C64; 3] {
    // x³ + p x + q with p = −a/4, q = −b/4
    let p = C64::new(-a / 4.0, 0.0);
    let q = C64::new(-b / 4.0, 0.0);
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut u = (-q / 2.0 + disc).powf(1.0 / 3.0);
    if u.norm() < 1e-300 {
        u = (-q / 2.0 - disc).powf(1.0 / 3.0);
    }
    let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut roots = [C64::zero(); 3];
    for (j, r) in roots.iter_mut().enumerate() {
        let uj = u * omega.powi(j as i32);
        *r = if uj.norm() < 1e-300 { C64::zero() } else { uj - p / (3.0 * uj) };
    }
    roots
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre01(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `η(λ) = ζ(z) − ζ(z+λ) = ∫_z^{z+λ} ℘(u) du` along the straight segment,
/// with `℘` from [`wp_rows`].
pub fn eta_contour(w1: C64, w2: C64, z0: C64, lam: C64) -> C64 {
    const PANELS: usize = 64;
    let gl = gauss_legendre01(24);
    let mut acc = C64::zero();
    for p in 0..PANELS {
        for &(x, w) in &gl {
            let t = (p as f64 + x) / PANELS as f64;
            acc += w * wp_rows(w1, w2, z0 + lam * t);
        }
    }
    acc * lam / PANELS as f64
}

/// Dense sample of the `z`-projection of a path.
pub fn path_polygon(path: &PathSpec, per_segment: usize) -> Vec<C64> {
    let mut pts = Vec::new();
    for seg in path.segments() {
        let n = match seg {
            Segment::Line { .. } => 1,
            _ => per_segment,
        };
        for i in 0..n {
            pts.push(seg.point(i as f64 / n as f64).z);
        }
    }
    pts.push(path.end().z);
    pts
}

/// Winding number of a closed polygon around `p`.
pub fn winding_number(poly: &[C64], p: C64) -> i64 {
    let mut total = 0.0;
    for w in poly.windows(2) {
        total += ((w[1] - p) / (w[0] - p)).arg();
    }
    if let (Some(a), Some(b)) = (poly.last(), poly.first()) {
        if (a - b).norm() > 0.0 {
            total += ((b - p) / (a - p)).arg();
        }
    }
    (total / (2.0 * PI)).round() as i64
}

/// Lattice points `mω₁ + nω₂` with `|m|, |n| ≤ range` around which the loop
/// `γ₁·γ₂⁻¹` (projected to `z`) winds.
pub fn enclosed_lattice_points(w1: C64, w2: C64, g1: &PathSpec, g2: &PathSpec, range: i64) -> Vec<((i64, i64), i64)> {
    let mut poly = path_polygon(g1, 256);
    let mut back = path_polygon(&g2.reversed(), 256);
    back.remove(0);
    poly.extend(back);
    let mut out = Vec::new();
    for m in -range..=range {
        for n in -range..=range {
            let p = w1 * m as f64 + w2 * n as f64;
            let k = winding_number(&poly, p);
            if k != 0 {
                out.push(((m, n), k));
            }
        }
    }
    out
}

fn velocity(seg: &Segment, t: f64) -> (C64, C64) {
    let h = 1e-6;
    let (a, b) = (seg.point((t - h).max(0.0)), seg.point((t + h).min(1.0)));
    let dt = (t + h).min(1.0) - (t - h).max(0.0);
    ((b.z - a.z) / dt, (b.s - a.s) / dt)
}

/// `∫∫_Σ ν∧ω⁽ⁿ⁾` over the ruled surface `Φ(t, v) = (1−v)γ₂(t) + vγ₁(t)`
/// between two paths with the same number of segments, oriented so that
/// `∂Σ = γ₁ − γ₂`. Uses the analytic two-form coefficient `−f⁽ⁿ⁾` of
/// `dz∧ds` and tensor Gauss–Legendre quadrature.
pub fn stokes_two_form(ext: &ExtLattice, n: usize, g1: &PathSpec, g2: &PathSpec) -> Result<C64, FormError> {
    assert_eq!(g1.segments().len(), g2.segments().len(), "paths must have matching segments");
    let gl = gauss_legendre01(24);
    let mut acc = C64::zero();
    for (s1, s2) in g1.segments().iter().zip(g2.segments()) {
        for &(t, wt) in &gl {
            let (p1, p2) = (s1.point(t), s2.point(t));
            let (d1, d2) = (exact_velocity(s1, t), exact_velocity(s2, t));
            for &(v, wv) in &gl {
                let z = p2.z + (p1.z - p2.z) * v;
                let s = p2.s + (p1.s - p2.s) * v;
                let (zt, st) = (d2.0 + (d1.0 - d2.0) * v, d2.1 + (d1.1 - d2.1) * v);
                let (zv, sv) = (p1.z - p2.z, p1.s - p2.s);
                let c = ext.two_form_coeff(n, z, s)?;
                // Φ*(dz∧ds) on (∂_v, ∂_t)
                acc += wt * wv * c * (zv * st - zt * sv);
            }
        }
    }
    Ok(acc)
}

fn exact_velocity(seg: &Segment, t: f64) -> (C64, C64) {
    match seg {
        Segment::Line { from, to } => (to.z - from.z, to.s - from.s),
        _ => velocity(seg, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice_values() {
        // for ω₁ = 1, ω₂ = i: G₆ = 0 and ℘(½) is the positive root of 4x³ − g₂x
        let (w1, w2) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        assert!(eisenstein_rows(w1, w2, 3).norm() < 1e-12);
        let g2 = 60.0 * eisenstein_rows(w1, w2, 2);
        let e1 = wp_rows(w1, w2, C64::new(0.5, 0.0));
        assert!((4.0 * e1 * e1 * e1 - g2 * e1).norm() < 1e-10 * e1.norm().powi(3));
        let roots = cardano_roots(g2.re, 0.0);
        assert!(roots.iter().any(|r| (r - e1).norm() < 1e-10));
    }

    #[test]
    fn zeta_and_sigma_are_consistent() {
        let (w1, w2) = (C64::new(1.3, 0.2), C64::new(0.4, 1.1));
        let z = C64::new(0.31, 0.17);
        let h = 1e-5;
        let dz = (zeta_rows(w1, w2, z + h) - zeta_rows(w1, w2, z - h)) / (2.0 * h);
        assert!((dz + wp_rows(w1, w2, z)).norm() < 1e-7);
        let ds = (sigma_rows(w1, w2, z + h).ln() - sigma_rows(w1, w2, z - h).ln()) / (2.0 * h);
        assert!((ds - zeta_rows(w1, w2, z)).norm() < 1e-7);
    }

    #[test]
    fn winding() {
        let sq = [C64::new(-1.0, -1.0), C64::new(1.0, -1.0), C64::new(1.0, 1.0), C64::new(-1.0, 1.0)];
        assert_eq!(winding_number(&sq, C64::zero()), 1);
        assert_eq!(winding_number(&sq, C64::new(3.0, 0.0)), 0);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let gl = gauss_legendre01(10);
        let v: f64 = gl.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((v - 1.0 / 8.0).abs() < 1e-15);
    }
}
