//! Reduced bar complex of a connected DGA presented by finite bases in
//! degrees 1 and 2 (degree 0 is the unit line, degree ≥ 3 vanishes).
//!
//! For `[a₁|…|aₙ]` the differential is
//!
//! ```text
//! d_B = Σᵢ (−1)^i [Ja₁|…|Ja_{i−1}|daᵢ|a_{i+1}|…|aₙ]
//!     + Σᵢ (−1)^{i+1} [Ja₁|…|Ja_{i−1}|aᵢ∧a_{i+1}|a_{i+2}|…|aₙ]
//! ```
//!
//! with `J(a) = (−1)^{deg a} a`, indices starting at 1. On words of degree-1
//! letters this is `−Σ[…|daᵢ|…] + Σ[…|aᵢ∧a_{i+1}|…]`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, parse_rational, Q};
use crate::linalg::{self, axpy, Echelon, SparseVec};

/// Default cap on the dimension of `B⁰_ℓ` accepted by [`h0_basis`].
pub const DEFAULT_DIMENSION_BOUND: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BarError {
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("dimension {dim} of B^0_{ell} exceeds bound {bound}")]
    DimensionBound { dim: usize, ell: usize, bound: usize },
    #[error("element is not homogeneous of bar degree 0 or 1")]
    NotHomogeneous,
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("malformed presentation file: {0}")]
    Parse(String),
}

/// A basis symbol of degree 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub deg: u8,
    pub idx: usize,
}

impl Letter {
    pub const fn one(idx: usize) -> Self {
        Letter { deg: 1, idx }
    }

    pub const fn two(idx: usize) -> Self {
        Letter { deg: 2, idx }
    }
}

/// A tensor word `[b₁|…|bₙ]`, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Σ (deg bᵢ − 1)`.
    pub fn bar_degree(&self) -> usize {
        self.0.iter().map(|l| l.deg as usize - 1).sum()
    }

    /// Word of degree-1 letters from their indices.
    pub fn from_indices(ix: &[usize]) -> Self {
        Word(ix.iter().map(|&i| Letter::one(i)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite graded presentation of a connected DGA with `A³ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgaPresentation {
    deg1: Vec<String>,
    deg2: Vec<String>,
    /// `d: A¹ → A²`, one sparse column per degree-1 basis element
    d1: Vec<SparseVec>,
    /// `a_i ∧ a_j` for all ordered pairs with nonzero product
    wedge: BTreeMap<(usize, usize), SparseVec>,
}

impl DgaPresentation {
    /// Builds and validates a presentation. `wedge` entries are given for
    /// `i < j`; the rest follows from antisymmetry.
    pub fn new(
        deg1: Vec<String>,
        deg2: Vec<String>,
        d1: Vec<SparseVec>,
        wedge_upper: BTreeMap<(usize, usize), SparseVec>,
    ) -> Result<Self, BarError> {
        if d1.len() != deg1.len() {
            return Err(BarError::InvalidPresentation(
                "differential must have one column per degree-1 basis element".into(),
            ));
        }
        let n2 = deg2.len();
        let in_range = |v: &SparseVec| v.keys().all(|&k| k < n2);
        if !d1.iter().all(in_range) {
            return Err(BarError::InvalidPresentation("differential entry out of range".into()));
        }
        let mut names = std::collections::HashSet::new();
        for n in deg1.iter().chain(deg2.iter()) {
            if !names.insert(n.as_str()) {
                return Err(BarError::InvalidPresentation(format!("duplicate basis name {n}")));
            }
        }
        let mut wedge = BTreeMap::new();
        for ((i, j), v) in wedge_upper {
            if i >= j || j >= deg1.len() || !in_range(&v) {
                return Err(BarError::InvalidPresentation(format!(
                    "wedge entry ({i},{j}) must satisfy i < j < dim A1"
                )));
            }
            if v.is_empty() {
                continue;
            }
            let mut neg = SparseVec::new();
            axpy(&mut neg, &-Q::one(), &v);
            wedge.insert((j, i), neg);
            wedge.insert((i, j), v);
        }
        Ok(DgaPresentation { deg1, deg2, d1, wedge })
    }

    pub fn deg1_names(&self) -> &[String] {
        &self.deg1
    }

    pub fn deg2_names(&self) -> &[String] {
        &self.deg2
    }

    pub fn dim1(&self) -> usize {
        self.deg1.len()
    }

    pub fn dim2(&self) -> usize {
        self.deg2.len()
    }

    pub fn differential(&self, i: usize) -> &SparseVec {
        &self.d1[i]
    }

    /// `a_i ∧ a_j` as a vector in `A²`.
    pub fn wedge(&self, i: usize, j: usize) -> SparseVec {
        self.wedge.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn letter_name(&self, l: Letter) -> Option<&str> {
        match l.deg {
            1 => self.deg1.get(l.idx).map(String::as_str),
            2 => self.deg2.get(l.idx).map(String::as_str),
            _ => None,
        }
    }

    pub fn letter_by_name(&self, name: &str) -> Option<Letter> {
        if let Some(i) = self.deg1.iter().position(|n| n == name) {
            return Some(Letter::one(i));
        }
        self.deg2.iter().position(|n| n == name).map(Letter::two)
    }

    fn check_letter(&self, l: Letter) -> Result<(), BarError> {
        if self.letter_name(l).is_none() {
            return Err(BarError::UnknownSymbol(format!("{}:{}", l.deg, l.idx)));
        }
        Ok(())
    }

    /// Applies `d` to the degree-2 form `d(a_i)`; returns `d(a_i)` for a
    /// degree-1 letter and the zero vector otherwise.
    fn d_letter(&self, l: Letter) -> SparseVec {
        if l.deg == 1 {
            self.d1[l.idx].clone()
        } else {
            SparseVec::new()
        }
    }

    /// `d∘d = 0` holds trivially (`A³ = 0`); this checks antisymmetry of the
    /// stored wedge table.
    pub fn is_consistent(&self) -> bool {
        self.wedge.iter().all(|(&(i, j), v)| {
            i != j && {
                let mut s = v.clone();
                axpy(&mut s, &Q::one(), &self.wedge(j, i));
                s.is_empty()
            }
        })
    }

    pub fn to_file(&self) -> DgaFile {
        let mut differential = Vec::new();
        for (i, col) in self.d1.iter().enumerate() {
            for (k, c) in col {
                differential.push(DgaEntry {
                    from: vec![self.deg1[i].clone()],
                    to: self.deg2[*k].clone(),
                    coeff: format_rational(c),
                });
            }
        }
        let mut wedge = Vec::new();
        for (&(i, j), v) in &self.wedge {
            if i < j {
                for (k, c) in v {
                    wedge.push(DgaEntry {
                        from: vec![self.deg1[i].clone(), self.deg1[j].clone()],
                        to: self.deg2[*k].clone(),
                        coeff: format_rational(c),
                    });
                }
            }
        }
        DgaFile { deg1: self.deg1.clone(), deg2: self.deg2.clone(), differential, wedge }
    }

    pub fn from_file(f: &DgaFile) -> Result<Self, BarError> {
        let idx1 = |n: &str| f.deg1.iter().position(|x| x == n).ok_or_else(|| BarError::UnknownSymbol(n.into()));
        let idx2 = |n: &str| f.deg2.iter().position(|x| x == n).ok_or_else(|| BarError::UnknownSymbol(n.into()));
        let coeff = |s: &str| parse_rational(s).map_err(|e| BarError::Parse(e.to_string()));
        let mut d1 = vec![SparseVec::new(); f.deg1.len()];
        for e in &f.differential {
            let [from] = e.from.as_slice() else {
                return Err(BarError::Parse("differential entry needs one source".into()));
            };
            let i = idx1(from)?;
            let k = idx2(&e.to)?;
            axpy(&mut d1[i], &coeff(&e.coeff)?, &SparseVec::from([(k, Q::one())]));
        }
        let mut wedge: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for e in &f.wedge {
            let [l, r] = e.from.as_slice() else {
                return Err(BarError::Parse("wedge entry needs two factors".into()));
            };
            let (i, j) = (idx1(l)?, idx1(r)?);
            let k = idx2(&e.to)?;
            let mut c = coeff(&e.coeff)?;
            let key = match i.cmp(&j) {
                Ordering::Less => (i, j),
                Ordering::Greater => {
                    c = -c;
                    (j, i)
                }
                Ordering::Equal => return Err(BarError::InvalidPresentation(format!("{l}^{l} must vanish"))),
            };
            axpy(wedge.entry(key).or_default(), &c, &SparseVec::from([(k, Q::one())]));
        }
        Self::new(f.deg1.clone(), f.deg2.clone(), d1, wedge)
    }
}

/// File form of a presentation. Rationals are `"p/q"` strings; wedge entries
/// are listed once per unordered pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgaFile {
    pub deg1: Vec<String>,
    pub deg2: Vec<String>,
    pub differential: Vec<DgaEntry>,
    pub wedge: Vec<DgaEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgaEntry {
    pub from: Vec<String>,
    pub to: String,
    pub coeff: String,
}

/// Exact linear combination of tensor words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BarElement {
    terms: BTreeMap<Word, Q>,
}

impl BarElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The empty word `[]`.
    pub fn unit() -> Self {
        Self::from_word(Word::empty())
    }

    pub fn from_word(w: Word) -> Self {
        let mut e = Self::zero();
        e.add_term(w, Q::one());
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, Q)>>(it: I) -> Self {
        let mut e = Self::zero();
        for (w, c) in it {
            e.add_term(w, c);
        }
        e
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &BarElement, c: &Q) {
        for (w, x) in &other.terms {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> BarElement {
        let mut e = BarElement::zero();
        e.add_scaled(self, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximal word length.
    pub fn length(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// The bar degree if all words share one.
    pub fn bar_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Word::bar_degree);
        let first = it.next().unwrap_or(0);
        it.all(|d| d == first).then_some(first)
    }

    /// Coordinates with respect to a word index.
    pub fn to_sparse(&self, index: &HashMap<Word, usize>) -> Option<SparseVec> {
        let mut v = SparseVec::new();
        for (w, c) in &self.terms {
            v.insert(*index.get(w)?, c.clone());
        }
        Some(v)
    }

    /// Renders with basis names, e.g. `[nu|w0] - [w1]`.
    pub fn display<'a>(&'a self, p: &'a DgaPresentation) -> impl fmt::Display + 'a {
        DisplayBar { e: self, p }
    }
}

impl std::ops::Add for &BarElement {
    type Output = BarElement;
    fn add(self, rhs: &BarElement) -> BarElement {
        let mut e = self.clone();
        e.add_scaled(rhs, &Q::one());
        e
    }
}

impl std::ops::Sub for &BarElement {
    type Output = BarElement;
    fn sub(self, rhs: &BarElement) -> BarElement {
        let mut e = self.clone();
        e.add_scaled(rhs, &-Q::one());
        e
    }
}

struct DisplayBar<'a> {
    e: &'a BarElement,
    p: &'a DgaPresentation,
}

impl fmt::Display for DisplayBar<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.e.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if !mag.is_one() {
                write!(f, "{}*", format_rational(&mag))?;
            }
            let names: Vec<&str> = w.0.iter().map(|l| self.p.letter_name(*l).unwrap_or("?")).collect();
            write!(f, "[{}]", names.join("|"))?;
        }
        Ok(())
    }
}

/// `Σ c (w₁ ⊗ w₂)`, the target of the coproduct.
pub type BarTensor = BTreeMap<(Word, Word), Q>;

/// The bar differential.
pub fn bar_differential(xi: &BarElement, p: &DgaPresentation) -> Result<BarElement, BarError> {
    match xi.bar_degree() {
        Some(0) | Some(1) => {}
        _ => return Err(BarError::NotHomogeneous),
    }
    let mut out = BarElement::zero();
    for (w, c) in xi.terms() {
        for l in &w.0 {
            p.check_letter(*l)?;
        }
        let n = w.len();
        // (−1)^{Σ_{j<i} deg a_j}, i.e. the J-signs on the prefix
        let mut prefix_sign = 1i64;
        for i in 0..n {
            let pos = i as i64 + 1;
            let sign_d = if pos % 2 == 0 { 1 } else { -1 } * prefix_sign;
            for (k, x) in p.d_letter(w.0[i]) {
                let mut nw = w.0.clone();
                nw[i] = Letter::two(k);
                out.add_term(Word(nw), c * x * Q::from_integer(sign_d.into()));
            }
            if i + 1 < n && w.0[i].deg == 1 && w.0[i + 1].deg == 1 {
                let sign_w = if pos % 2 == 0 { -1 } else { 1 } * prefix_sign;
                for (k, x) in p.wedge(w.0[i].idx, w.0[i + 1].idx) {
                    let mut nw = Vec::with_capacity(n - 1);
                    nw.extend_from_slice(&w.0[..i]);
                    nw.push(Letter::two(k));
                    nw.extend_from_slice(&w.0[i + 2..]);
                    out.add_term(Word(nw), c * x * Q::from_integer(sign_w.into()));
                }
            }
            if w.0[i].deg % 2 == 1 {
                prefix_sign = -prefix_sign;
            }
        }
    }
    Ok(out)
}

/// All words of degree-1 letters of length ≤ `ell`, graded-lexicographic.
pub fn degree_zero_words(dim1: usize, ell: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut layer = vec![Word::empty()];
    for _ in 0..ell {
        let mut next = Vec::with_capacity(layer.len() * dim1);
        for w in &layer {
            for i in 0..dim1 {
                let mut v = w.0.clone();
                v.push(Letter::one(i));
                next.push(Word(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// `dim B⁰_ℓ = Σ_{k≤ℓ} (dim A¹)^k`, saturating.
pub fn degree_zero_dimension(dim1: usize, ell: usize) -> usize {
    let mut total = 0usize;
    let mut layer = 1usize;
    for _ in 0..=ell {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(dim1);
    }
    total
}

/// Exact basis of `ker d_B ∩ B⁰_ℓ` with the default dimension bound.
pub fn h0_basis(p: &DgaPresentation, ell: usize) -> Result<Vec<BarElement>, BarError> {
    h0_basis_bounded(p, ell, DEFAULT_DIMENSION_BOUND)
}

/// Exact basis of `ker d_B ∩ B⁰_ℓ`. Each basis element has coefficient 1 on
/// a distinct word and otherwise only involves graded-lexicographically
/// smaller words; the list is sorted by that leading word.
pub fn h0_basis_bounded(p: &DgaPresentation, ell: usize, bound: usize) -> Result<Vec<BarElement>, BarError> {
    let dim = degree_zero_dimension(p.dim1(), ell);
    if dim > bound {
        return Err(BarError::DimensionBound { dim, ell, bound });
    }
    let words = degree_zero_words(p.dim1(), ell);
    let mut target_index: HashMap<Word, usize> = HashMap::new();
    let mut columns = Vec::with_capacity(words.len());
    for w in &words {
        let img = bar_differential(&BarElement::from_word(w.clone()), p)?;
        let mut col = SparseVec::new();
        for (tw, c) in img.terms() {
            let next = target_index.len();
            let k = *target_index.entry(tw.clone()).or_insert(next);
            col.insert(k, c.clone());
        }
        columns.push(col);
    }
    Ok(linalg::kernel(&columns)
        .into_iter()
        .map(|v| BarElement::from_terms(v.into_iter().map(|(k, c)| (words[k].clone(), c))))
        .collect())
}

/// Span of a family of bar elements, for exact membership tests.
pub struct BarSpan {
    index: HashMap<Word, usize>,
    ech: Echelon,
}

impl BarSpan {
    pub fn new<'a, I: IntoIterator<Item = &'a BarElement>>(elements: I) -> Self {
        let mut s = BarSpan { index: HashMap::new(), ech: Echelon::new() };
        for e in elements {
            let v = s.coords(e);
            s.ech.insert(v);
        }
        s
    }

    fn coords(&mut self, e: &BarElement) -> SparseVec {
        let mut v = SparseVec::new();
        for (w, c) in e.terms() {
            let next = self.index.len();
            let k = *self.index.entry(w.clone()).or_insert(next);
            v.insert(k, c.clone());
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn contains(&self, e: &BarElement) -> bool {
        let mut v = SparseVec::new();
        for (w, c) in e.terms() {
            match self.index.get(w) {
                Some(&k) => {
                    v.insert(k, c.clone());
                }
                None => return false,
            }
        }
        self.ech.contains(&v)
    }
}

fn shuffle_words(a: &[Letter], b: &[Letter], prefix: &mut Vec<Letter>, out: &mut Vec<Word>) {
    if a.is_empty() || b.is_empty() {
        let mut w = prefix.clone();
        w.extend_from_slice(a);
        w.extend_from_slice(b);
        out.push(Word(w));
        return;
    }
    prefix.push(a[0]);
    shuffle_words(&a[1..], b, prefix, out);
    prefix.pop();
    prefix.push(b[0]);
    shuffle_words(a, &b[1..], prefix, out);
    prefix.pop();
}

/// All shuffles of two words, with multiplicity.
pub fn word_shuffles(a: &Word, b: &Word) -> Vec<Word> {
    let mut out = Vec::new();
    shuffle_words(&a.0, &b.0, &mut Vec::new(), &mut out);
    out
}

/// Shuffle product.
pub fn shuffle(x: &BarElement, y: &BarElement) -> BarElement {
    let mut out = BarElement::zero();
    for (u, cu) in x.terms() {
        for (v, cv) in y.terms() {
            let c = cu * cv;
            for w in word_shuffles(u, v) {
                out.add_term(w, c.clone());
            }
        }
    }
    out
}

/// Deconcatenation coproduct `Δ[a₁|…|aₙ] = Σᵢ [a₁|…|aᵢ] ⊗ [a_{i+1}|…|aₙ]`.
pub fn deconcat(x: &BarElement) -> BarTensor {
    let mut out = BarTensor::new();
    for (w, c) in x.terms() {
        for i in 0..=w.len() {
            let key = (Word(w.0[..i].to_vec()), Word(w.0[i..].to_vec()));
            let e = out.entry(key.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                out.remove(&key);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    /// two degree-1 letters a, b; one degree-2 letter e; da = e, a∧b = e
    fn toy() -> DgaPresentation {
        DgaPresentation::new(
            vec!["a".into(), "b".into()],
            vec!["e".into()],
            vec![SparseVec::from([(0, q_int(1))]), SparseVec::new()],
            BTreeMap::from([((0, 1), SparseVec::from([(0, q_int(1))]))]),
        )
        .unwrap()
    }

    fn w(ix: &[usize]) -> Word {
        Word::from_indices(ix)
    }

    #[test]
    fn single_letter_differential() {
        let p = toy();
        let d = bar_differential(&BarElement::from_word(w(&[0])), &p).unwrap();
        assert_eq!(d, BarElement::from_terms([(Word(vec![Letter::two(0)]), q_int(-1))]));
    }

    #[test]
    fn two_letter_differential_signs() {
        let p = toy();
        // d[a|b] = −[da|b] − [a|db] + [a∧b] = −[e|b] + [e]
        let d = bar_differential(&BarElement::from_word(w(&[0, 1])), &p).unwrap();
        let expect = BarElement::from_terms([
            (Word(vec![Letter::two(0), Letter::one(1)]), q_int(-1)),
            (Word(vec![Letter::two(0)]), q_int(1)),
        ]);
        assert_eq!(d, expect);
    }

    #[test]
    fn degree_one_differential_and_unknown_letters() {
        let p = toy();
        // d[a|e] = −[e|e]
        let x = BarElement::from_word(Word(vec![Letter::one(0), Letter::two(0)]));
        let expect = BarElement::from_terms([(Word(vec![Letter::two(0), Letter::two(0)]), q_int(-1))]);
        assert_eq!(bar_differential(&x, &p).unwrap(), expect);
        let bad = BarElement::from_word(w(&[5]));
        assert!(matches!(bar_differential(&bad, &p), Err(BarError::UnknownSymbol(_))));
        let mixed = &BarElement::from_word(w(&[0])) + &x;
        assert_eq!(bar_differential(&mixed, &p), Err(BarError::NotHomogeneous));
    }

    #[test]
    fn ell_zero_kernel_is_the_unit() {
        let b = h0_basis(&toy(), 0).unwrap();
        assert_eq!(b, vec![BarElement::unit()]);
    }

    #[test]
    fn dimension_bound() {
        let e = h0_basis_bounded(&toy(), 20, 1000).unwrap_err();
        assert!(matches!(e, BarError::DimensionBound { .. }));
    }

    #[test]
    fn shuffle_and_deconcat_basics() {
        let a = BarElement::from_word(w(&[0]));
        let b = BarElement::from_word(w(&[1]));
        assert_eq!(shuffle(&a, &b), &BarElement::from_word(w(&[0, 1])) + &BarElement::from_word(w(&[1, 0])));
        assert_eq!(shuffle(&a, &BarElement::unit()), a);
        let d = deconcat(&a);
        assert_eq!(d.len(), 2);
        assert_eq!(d[&(Word::empty(), w(&[0]))], q_int(1));
        assert_eq!(d[&(w(&[0]), Word::empty())], q_int(1));
        let d0 = deconcat(&BarElement::unit());
        assert_eq!(d0.len(), 1);
        assert_eq!(d0[&(Word::empty(), Word::empty())], q_int(1));
    }

    #[test]
    fn file_round_trip() {
        let p = toy();
        let f = p.to_file();
        let json = serde_json::to_string(&f).unwrap();
        let back = DgaPresentation::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(p.is_consistent());
    }

    #[test]
    fn invalid_presentations_rejected() {
        let r = DgaPresentation::new(vec!["a".into()], vec![], vec![], BTreeMap::new());
        assert!(r.is_err());
        let r = DgaPresentation::new(
            vec!["a".into(), "a".into()],
            vec![],
            vec![SparseVec::new(), SparseVec::new()],
            BTreeMap::new(),
        );
        assert!(r.is_err());
    }

    #[test]
    fn display_uses_names() {
        let p = toy();
        let x = &BarElement::from_word(w(&[0, 1])) - &BarElement::from_word(w(&[1]));
        assert_eq!(x.display(&p).to_string(), "-[b] + [a|b]");
    }
}
