use std::f64::consts::PI;

use edagger::barcx::{self, bar_differential, h0_basis, BarElement, Word};
use edagger::chenint::{chen_transport, Ambient, Model, PathSpec, Pt, Segment};
use edagger::exact;
use edagger::kzbword::XWord;
use edagger::logforms::{self, ExtLattice};
use edagger::p1model::MZVIndex;
use edagger::wlattice::{lattice_from_curve, CurveSpec, LatticeData};
use edagger::C64;
use num_traits::Zero;
use proptest::prelude::*;

fn curve(a: i64, b: i64) -> Option<LatticeData> {
    let c = CurveSpec::from_ints(a, b).ok()?;
    Some(lattice_from_curve(&c, 1e-10).expect("nondegenerate curve has a lattice"))
}

fn cell_point(l: &LatticeData, x: f64, y: f64) -> C64 {
    l.omega1 * x + l.omega2 * y
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lattice_invariants(a in -12i64..=12, b in -12i64..=12, x in 0.05f64..0.95, y in 0.05f64..0.95) {
        prop_assume!(a * a * a != 27 * b * b);
        let l = curve(a, b).unwrap();
        let leg = l.legendre_value();
        prop_assert!((leg.norm() - 2.0 * PI).abs() <= 1e-9, "legendre {leg}");
        prop_assert!(l.eisenstein_residuals.iter().all(|r| *r <= 1e-8), "{:?}", l.eisenstein_residuals);
        let z = cell_point(&l, x, y);
        prop_assume!(l.distance_to_lattice(z) > 0.05 * l.omega1.norm().min(l.omega2.norm()));
        let (p, dp) = l.wp(z).unwrap();
        let rhs = 4.0 * p * p * p - (a as f64) * p - b as f64;
        let scale = (dp * dp).norm().max(4.0 * p.norm().powi(3)).max((a as f64 * p).norm()).max((b as f64).abs());
        prop_assert!((dp * dp - rhs).norm() <= 1e-9 * scale);
        // η(λ) = ζ(z) − ζ(z+λ)
        let zt = l.wzeta(z).unwrap() - l.wzeta(z + l.omega1).unwrap();
        prop_assert!((zt - l.eta1).norm() <= 1e-8 * (1.0 + l.eta1.norm()));
    }

    #[test]
    fn forms_are_deck_invariant(x in 0.05f64..0.95, y in 0.05f64..0.95, sr in -1.0f64..1.0, si in -1.0f64..1.0,
                                m in -2i64..=2, n in -2i64..=2) {
        let l = curve(5, 2).unwrap();
        let z = cell_point(&l, x, y);
        prop_assume!(l.distance_to_lattice(z) > 0.02);
        let ext = ExtLattice::new(l, 6);
        let s = C64::new(sr, si);
        let f = ext.f_all(z, s).unwrap();
        let (z2, s2) = ext.act((m, n), z, s);
        let g = ext.f_all(z2, s2).unwrap();
        for k in 0..=6 {
            prop_assert!((f[k] - g[k]).norm() <= 1e-8 * (1.0 + f[k].norm()), "n={k}");
        }
    }

    #[test]
    fn bar_differential_squares_to_zero(words in prop::collection::vec(prop::collection::vec(0usize..5, 1..5), 1..6),
                                        coeffs in prop::collection::vec(-6i64..=6, 6)) {
        let p = logforms::dga_presentation(3);
        let x = BarElement::from_terms(
            words.iter().zip(&coeffs).map(|(w, c)| (Word::from_indices(w), exact::q_int(*c))),
        );
        let dd = bar_differential(&bar_differential(&x, &p).unwrap(), &p).unwrap();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn shuffles_of_closed_elements_are_closed(i in 0usize..7, j in 0usize..7) {
        let p = logforms::dga_presentation(3);
        let basis = h0_basis(&p, 2).unwrap();
        let x = barcx::shuffle(&basis[i % basis.len()], &basis[j % basis.len()]);
        prop_assert!(bar_differential(&x, &p).unwrap().is_zero());
    }

    #[test]
    fn reversal_and_composition(pts in prop::collection::vec((0.1f64..0.9, 0.1f64..0.9, -1.0f64..1.0), 3..5)) {
        let l = curve(0, 4).unwrap();
        let ext = ExtLattice::new(l.clone(), 2);
        let pts: Vec<Pt> = pts.iter().map(|&(x, y, s)| Pt::new(cell_point(&l, x, y), C64::new(s, 0.5 * s))).collect();
        prop_assume!(pts.iter().all(|p| l.distance_to_lattice(p.z) > 0.05));
        let path = PathSpec::polyline(Model::Edagger, &pts).unwrap();
        prop_assume!(path.check_guard(Some(&l)).is_ok());
        let alpha = Ambient::Edagger(&ext).alphabet(&[0, 1, 2]).unwrap();
        let t = chen_transport(&alpha, &path, 3, 1e-11);
        prop_assume!(t.is_ok());
        let t = t.unwrap();
        let r = chen_transport(&alpha, &path.reversed(), 3, 1e-11).unwrap();
        let (first, second) = path.split_at(1, 0.5).unwrap();
        let ta = chen_transport(&alpha, &second, 3, 1e-11).unwrap();
        let tb = chen_transport(&alpha, &first, 3, 1e-11).unwrap();
        for w in [vec![0], vec![2, 1], vec![1, 0, 2], vec![2, 2, 0]] {
            let mut rev = w.clone();
            rev.reverse();
            let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
            let scale = 1.0 + t.get(&w).norm();
            prop_assert!((r.get(&w) - sign * t.get(&rev)).norm() <= 1e-9 * scale);
            let split: C64 = (0..=w.len()).map(|k| ta.get(&w[..k]) * tb.get(&w[k..])).sum();
            prop_assert!((t.get(&w) - split).norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn p1_homotopy_invariance(dy in 0.05f64..0.8, word in prop::collection::vec(0usize..2, 1..=4)) {
        // two paths from 0.2 to 0.7 above and below the real axis; neither
        // region between them contains 0 or 1
        let a = C64::new(0.2, 0.0);
        let b = C64::new(0.7, 0.0);
        let up = PathSpec::polyline(Model::P1, &[Pt::new(a, C64::zero()), Pt::new(C64::new(0.45, dy), C64::zero()), Pt::new(b, C64::zero())]).unwrap();
        let down = PathSpec::polyline(Model::P1, &[Pt::new(a, C64::zero()), Pt::new(C64::new(0.45, -dy), C64::zero()), Pt::new(b, C64::zero())]).unwrap();
        let alpha = Ambient::P1.alphabet(&[0, 1]).unwrap();
        let tu = chen_transport(&alpha, &up, 4, 1e-12).unwrap();
        let td = chen_transport(&alpha, &down, 4, 1e-12).unwrap();
        prop_assert!((tu.get(&word) - td.get(&word)).norm() <= 1e-10);
    }

    #[test]
    fn text_round_trips(num in -1000i64..1000, den in 1i64..1000, k in prop::collection::vec(1u32..6, 1..4),
                        bits in prop::collection::vec(0u8..2, 0..7)) {
        let q = exact::q_frac(num, den);
        prop_assert_eq!(exact::parse_rational(&exact::format_rational(&q)).unwrap(), q);
        let idx = MZVIndex::new(k).unwrap();
        prop_assert_eq!(idx.to_string().parse::<MZVIndex>().unwrap(), idx);
        let w = XWord(bits);
        prop_assert_eq!(w.to_string().parse::<XWord>().unwrap(), w);
    }
}

#[test]
fn p1_loop_around_zero() {
    let alpha = Ambient::P1.alphabet(&[0, 1]).unwrap();
    let circle = PathSpec::new(
        Model::P1,
        vec![Segment::Arc { center: C64::zero(), radius: 0.3, angles: [0.0, 2.0 * PI], s: [C64::zero(); 2] }],
    )
    .unwrap();
    let t = chen_transport(&alpha, &circle, 1, 1e-12).unwrap();
    assert!((t.get(&[0]) - C64::new(0.0, 2.0 * PI)).norm() < 1e-12);
    assert!(t.get(&[1]).norm() < 1e-12);
}

#[test]
fn zeta2_squared_by_shuffle() {
    // I(01)² = 2 I(0101) + 4 I(0011), i.e. ζ(2)² = 2ζ(2,2) + 4ζ(3,1)
    let i = |w: &[u8]| edagger::chenint::regularized_integral_p1(w, 1e-12).unwrap().value;
    let lhs = i(&[0, 1]) * i(&[0, 1]);
    let rhs = 2.0 * i(&[0, 1, 0, 1]) + 4.0 * i(&[0, 0, 1, 1]);
    assert!((lhs - rhs).norm() < 1e-7, "{lhs} vs {rhs}");
    assert!((lhs.re - PI.powi(4) / 36.0).abs() < 1e-7);
}

#[test]
fn path_json_round_trip() {
    let p = PathSpec::polyline(
        Model::Edagger,
        &[Pt::new(C64::new(0.1, 0.2), C64::new(0.0, 1.0)), Pt::new(C64::new(0.7, -0.2), C64::zero())],
    )
    .unwrap();
    let text = serde_json::to_string(&p).unwrap();
    let back: PathSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}
