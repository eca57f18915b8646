//! Noncommutative series in `x₀, x₁`, the KZB connection form, its exact
//! flatness check, and the canonical bar series with coefficient extraction.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::barcx::{BarElement, DgaPresentation, Letter, Word};
use crate::exact::{self, Q};
use crate::linalg::{axpy, SparseVec};
use crate::logforms::{self, FormElement, FormSymbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KzbError {
    #[error("ad power {n} needs word length {needed} > {ell_max}")]
    TruncationExceeded { n: usize, needed: usize, ell_max: usize },
    #[error("truncation N = {n} must be at least the word length bound {ell_max}")]
    InsufficientTruncation { n: usize, ell_max: usize },
    #[error("invalid word {0:?}: expected a string over {{0,1}}")]
    InvalidWord(String),
    #[error("word {word} longer than the series truncation {ell_max}")]
    WordTooLong { word: String, ell_max: usize },
}

/// Word in `x₀, x₁`, written as a string of `0`/`1`; ordered by length then
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct XWord(pub Vec<u8>);

impl XWord {
    pub fn empty() -> Self {
        XWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, o: &XWord) -> XWord {
        XWord([self.0.as_slice(), o.0.as_slice()].concat())
    }

    /// All words of length `1..=ell` (plus the empty word if `with_empty`).
    pub fn all_upto(ell: usize, with_empty: bool) -> Vec<XWord> {
        let mut out = Vec::new();
        if with_empty {
            out.push(XWord::empty());
        }
        for len in 1..=ell {
            for bits in 0..(1u32 << len) {
                out.push(XWord((0..len).rev().map(|i| ((bits >> i) & 1) as u8).collect()));
            }
        }
        out
    }
}

impl Ord for XWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for XWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for XWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for XWord {
    type Err = KzbError;
    fn from_str(s: &str) -> Result<Self, KzbError> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(KzbError::InvalidWord(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(XWord)
    }
}

impl Serialize for XWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Truncated element of `ℚ⟨⟨x₀, x₁⟩⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCPoly {
    terms: BTreeMap<XWord, Q>,
    ell_max: usize,
}

impl NCPoly {
    pub fn zero(ell_max: usize) -> Self {
        NCPoly { terms: BTreeMap::new(), ell_max }
    }

    pub fn word(w: XWord, ell_max: usize) -> Self {
        let mut p = Self::zero(ell_max);
        p.add_term(w, Q::one());
        p
    }

    pub fn x0(ell_max: usize) -> Self {
        Self::word(XWord(vec![0]), ell_max)
    }

    pub fn x1(ell_max: usize) -> Self {
        Self::word(XWord(vec![1]), ell_max)
    }

    pub fn ell_max(&self) -> usize {
        self.ell_max
    }

    /// Adds `c·w`; words beyond the truncation are dropped.
    pub fn add_term(&mut self, w: XWord, c: Q) {
        if w.len() > self.ell_max || c.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn coeff(&self, w: &XWord) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&XWord, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &NCPoly) -> NCPoly {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c.clone());
        }
        r
    }

    pub fn scaled(&self, c: &Q) -> NCPoly {
        let mut r = NCPoly::zero(self.ell_max);
        for (w, x) in &self.terms {
            r.add_term(w.clone(), x * c);
        }
        r
    }

    pub fn mul(&self, o: &NCPoly) -> NCPoly {
        let mut r = NCPoly::zero(self.ell_max.min(o.ell_max));
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                r.add_term(u.concat(v), a * b);
            }
        }
        r
    }

    /// `[self, o] = self·o − o·self`.
    pub fn bracket(&self, o: &NCPoly) -> NCPoly {
        self.mul(o).add(&o.mul(self).scaled(&-Q::one()))
    }

    pub fn to_string_terms(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = exact::is_negative(c);
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                s.push_str(&exact::format_rational(&mag));
                s.push('*');
            }
            if w.is_empty() {
                s.push('1');
            } else {
                let letters: Vec<String> = w.0.iter().map(|c| format!("x{c}")).collect();
                s.push_str(&letters.join(""));
            }
        }
        s
    }
}

/// `adⁿ_{x₀}(x₁)` expanded into words.
pub fn ad_power(n: usize, ell_max: usize) -> Result<NCPoly, KzbError> {
    if n + 1 > ell_max {
        return Err(KzbError::TruncationExceeded { n, needed: n + 1, ell_max });
    }
    let x0 = NCPoly::x0(ell_max);
    let mut p = NCPoly::x1(ell_max);
    for _ in 0..n {
        p = x0.bracket(&p);
    }
    Ok(p)
}

/// A one-form-valued series: for each word, a degree-1 element in the basis
/// of [`logforms::dga_presentation`].
#[derive(Debug, Clone, PartialEq)]
pub struct FormValuedNC {
    truncation: usize,
    ell_max: usize,
    terms: BTreeMap<XWord, SparseVec>,
}

impl FormValuedNC {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn ell_max(&self) -> usize {
        self.ell_max
    }

    /// Coefficient of `w` as a degree-1 basis combination.
    pub fn coeff_vec(&self, w: &XWord) -> SparseVec {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, w: &XWord) -> FormElement {
        let mut e = FormElement::zero();
        for (i, c) in self.coeff_vec(w) {
            e.add(FormSymbol::from_basis_index(i), c);
        }
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&XWord, &SparseVec)> {
        self.terms.iter()
    }
}

fn check_truncation(n: usize, ell_max: usize) -> Result<(), KzbError> {
    if n < ell_max {
        return Err(KzbError::InsufficientTruncation { n, ell_max });
    }
    Ok(())
}

/// `ω_KZB = ν⊗x₀ + Σ_{n} ω⁽ⁿ⁾⊗adⁿ_{x₀}(x₁)`, `n ≤ min(N, ℓ_max − 1)`.
pub fn omega_kzb(n_trunc: usize, ell_max: usize) -> Result<FormValuedNC, KzbError> {
    check_truncation(n_trunc, ell_max)?;
    let mut terms: BTreeMap<XWord, SparseVec> = BTreeMap::new();
    let mut push = |w: &XWord, idx: usize, c: &Q| {
        let e = terms.entry(w.clone()).or_default();
        axpy(e, c, &SparseVec::from([(idx, Q::one())]));
        if e.is_empty() {
            terms.remove(w);
        }
    };
    if ell_max >= 1 {
        push(&XWord(vec![0]), FormSymbol::Nu.basis_index(), &Q::one());
    }
    for n in 0..ell_max.min(n_trunc + 1) {
        let idx = FormSymbol::Omega(n).basis_index();
        for (w, c) in ad_power(n, ell_max)?.terms() {
            push(w, idx, c);
        }
    }
    Ok(FormValuedNC { truncation: n_trunc, ell_max, terms })
}

/// One nonzero word of `dω + ω∧ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessDefect {
    pub word: XWord,
    /// `(two-form basis name, coefficient)`
    pub residual: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub truncation: usize,
    pub ell_max: usize,
    pub words_checked: usize,
    pub defects: Vec<FlatnessDefect>,
}

impl FlatnessReport {
    pub fn is_flat(&self) -> bool {
        self.defects.is_empty()
    }
}

/// `dω + ω∧ω` in `A² ⊗ ℚ⟨x₀,x₁⟩`, coefficient of `w`.
pub fn curvature_coeff(omega: &FormValuedNC, p: &DgaPresentation, w: &XWord) -> SparseVec {
    let mut acc = SparseVec::new();
    for (i, c) in omega.coeff_vec(w) {
        axpy(&mut acc, &c, p.differential(i));
    }
    // (a⊗U)∧(b⊗V) = (a∧b)⊗UV
    for cut in 1..w.len() {
        let u = XWord(w.0[..cut].to_vec());
        let v = XWord(w.0[cut..].to_vec());
        let (a, b) = (omega.coeff_vec(&u), omega.coeff_vec(&v));
        for (i, ci) in &a {
            for (j, cj) in &b {
                axpy(&mut acc, &(ci * cj), &p.wedge(*i, *j));
            }
        }
    }
    acc
}

/// Exact word-by-word flatness check for words of length `1..=ℓ_max`.
pub fn flatness_check(n_trunc: usize, ell_max: usize) -> Result<FlatnessReport, KzbError> {
    let omega = omega_kzb(n_trunc, ell_max)?;
    let p = logforms::dga_presentation(n_trunc);
    let words = XWord::all_upto(ell_max, false);
    let mut defects = Vec::new();
    for w in &words {
        let r = curvature_coeff(&omega, &p, w);
        if !r.is_empty() {
            defects.push(FlatnessDefect {
                word: w.clone(),
                residual: r.iter().map(|(k, c)| (p.deg2_names()[*k].clone(), exact::format_rational(c))).collect(),
            });
        }
    }
    Ok(FlatnessReport { truncation: n_trunc, ell_max, words_checked: words.len(), defects })
}

/// Bar-valued series: for each word `w` over `x₀, x₁`, a bar element.
#[derive(Debug, Clone, PartialEq)]
pub struct BarValuedNC {
    truncation: usize,
    ell_max: usize,
    terms: BTreeMap<XWord, BarElement>,
}

impl BarValuedNC {
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn ell_max(&self) -> usize {
        self.ell_max
    }

    pub fn terms(&self) -> impl Iterator<Item = (&XWord, &BarElement)> {
        self.terms.iter()
    }
}

/// `Σ_ℓ (−1)^ℓ [ω_KZB|…|ω_KZB]`, up to word length `ℓ_max`.
pub fn canonical_series(n_trunc: usize, ell_max: usize) -> Result<BarValuedNC, KzbError> {
    let omega = omega_kzb(n_trunc, ell_max)?;
    let mut terms: BTreeMap<XWord, BarElement> = BTreeMap::new();
    terms.insert(XWord::empty(), BarElement::unit());
    // c[w] = Σ_{w = u·v, u ≠ ∅} [−ω_u | c[v]]
    for w in XWord::all_upto(ell_max, false) {
        let mut acc = BarElement::zero();
        for cut in 1..=w.len() {
            let u = XWord(w.0[..cut].to_vec());
            let v = XWord(w.0[cut..].to_vec());
            let head = omega.coeff_vec(&u);
            let Some(tail) = terms.get(&v) else { continue };
            for (i, ci) in &head {
                for (word, cv) in tail.terms() {
                    let mut letters = vec![Letter::one(*i)];
                    letters.extend_from_slice(&word.0);
                    acc.add_term(Word(letters), -(ci * cv));
                }
            }
        }
        if !acc.is_zero() {
            terms.insert(w, acc);
        }
    }
    Ok(BarValuedNC { truncation: n_trunc, ell_max, terms })
}

/// The bar-element coefficient of `w` in `s`.
pub fn c_w(s: &BarValuedNC, w: &XWord) -> Result<BarElement, KzbError> {
    if w.len() > s.ell_max {
        return Err(KzbError::WordTooLong { word: w.to_string(), ell_max: s.ell_max });
    }
    Ok(s.terms.get(w).cloned().unwrap_or_else(BarElement::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcx::{bar_differential, h0_basis, BarSpan};
    use crate::exact::q_int;

    fn xw(s: &str) -> XWord {
        s.parse().unwrap()
    }

    fn bw(ix: &[usize]) -> Word {
        Word::from_indices(ix)
    }

    #[test]
    fn ad_powers() {
        assert_eq!(ad_power(0, 3).unwrap().to_string_terms(), "x1");
        assert_eq!(ad_power(1, 3).unwrap().to_string_terms(), "x0x1 - x1x0");
        let a2 = ad_power(2, 3).unwrap();
        assert_eq!(a2.coeff(&xw("001")), q_int(1));
        assert_eq!(a2.coeff(&xw("010")), q_int(-2));
        assert_eq!(a2.coeff(&xw("100")), q_int(1));
        assert_eq!(a2.terms().count(), 3);
        assert!(matches!(ad_power(3, 3), Err(KzbError::TruncationExceeded { .. })));
    }

    #[test]
    fn omega_coefficients() {
        let o = omega_kzb(4, 3).unwrap();
        assert_eq!(o.coeff(&xw("0")), FormElement::nu());
        assert_eq!(o.coeff(&xw("1")), FormElement::omega(0));
        assert_eq!(o.coeff(&xw("01")), FormElement::omega(1));
        assert_eq!(o.coeff(&xw("10")), FormElement::zero().with(FormSymbol::Omega(1), q_int(-1)));
        assert!(o.coeff(&xw("11")).is_zero());
        assert!(omega_kzb(2, 3).is_err());
    }

    #[test]
    fn flat_at_small_truncations() {
        for (n, l) in [(2, 2), (4, 3), (6, 5)] {
            let r = flatness_check(n, l).unwrap();
            assert!(r.is_flat(), "{:?}", r.defects);
            assert_eq!(r.words_checked, (1 << (l + 1)) - 2);
        }
    }

    #[test]
    fn canonical_low_words() {
        let s = canonical_series(4, 3).unwrap();
        assert_eq!(c_w(&s, &XWord::empty()).unwrap(), BarElement::unit());
        assert_eq!(c_w(&s, &xw("0")).unwrap(), BarElement::from_terms([(bw(&[0]), q_int(-1))]));
        assert_eq!(
            c_w(&s, &xw("01")).unwrap(),
            BarElement::from_terms([(bw(&[0, 1]), q_int(1)), (bw(&[2]), q_int(-1))])
        );
        assert_eq!(
            c_w(&s, &xw("10")).unwrap(),
            BarElement::from_terms([(bw(&[1, 0]), q_int(1)), (bw(&[2]), q_int(1))])
        );
        assert!(c_w(&s, &xw("0000")).is_err());
    }

    #[test]
    fn canonical_elements_are_closed_and_independent() {
        let p = logforms::dga_presentation(4);
        let s = canonical_series(4, 3).unwrap();
        let elems: Vec<BarElement> = XWord::all_upto(3, true).iter().map(|w| c_w(&s, w).unwrap()).collect();
        for e in &elems {
            assert!(bar_differential(e, &p).unwrap().is_zero());
        }
        assert_eq!(BarSpan::new(&elems).dim(), 15);
        let kernel = BarSpan::new(&h0_basis(&p, 3).unwrap());
        assert!(elems.iter().all(|e| kernel.contains(e)));
    }

    #[test]
    fn word_parsing() {
        assert_eq!(xw("0110").to_string(), "0110");
        assert!("012".parse::<XWord>().is_err());
        assert_eq!(XWord::all_upto(2, true).len(), 7);
        assert!(xw("1") < xw("00"));
    }
}
