//! Sparse exact linear algebra over `ℚ`: incremental echelon bases, kernels
//! and span membership.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::exact::Q;

pub type SparseVec = BTreeMap<usize, Q>;

/// `acc += factor · v`, dropping entries that cancel.
pub fn axpy(acc: &mut SparseVec, factor: &Q, v: &SparseVec) {
    for (k, x) in v {
        let prod = factor * x;
        match acc.get_mut(k) {
            Some(y) => {
                *y += prod;
                if y.is_zero() {
                    acc.remove(k);
                }
            }
            None => {
                if !prod.is_zero() {
                    acc.insert(*k, prod);
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Row {
    vec: SparseVec,
    /// which input vectors combine to `vec`
    combo: SparseVec,
}

/// Rows in echelon form (distinct leading indices, leading entry 1), each
/// remembering the combination of inserted vectors that produced it.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: HashMap<usize, Row>,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the rows; returns the remainder and the combination
    /// of inserted vectors that was subtracted.
    fn reduce_tracked(&self, mut v: SparseVec) -> (SparseVec, SparseVec) {
        let mut combo = SparseVec::new();
        loop {
            let Some((&lead, coeff)) = v.iter().next() else { break };
            let Some(row) = self.rows.get(&lead) else { break };
            let factor = -coeff.clone();
            axpy(&mut v, &factor, &row.vec);
            axpy(&mut combo, &factor, &row.combo);
        }
        (v, combo)
    }

    /// Remainder of `v` modulo the span (zero iff `v` is in the span).
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_tracked(v.clone()).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts the next vector. Returns `None` if it was independent,
    /// otherwise the relation `e_k + Σ c_j e_j = 0` among inserted vectors
    /// (indexed by insertion order) that it satisfies.
    pub fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let k = self.inserted;
        self.inserted += 1;
        let (rem, mut combo) = self.reduce_tracked(v);
        combo.insert(k, Q::one());
        if rem.is_empty() {
            return Some(combo);
        }
        let (&lead, c) = rem.iter().next().unwrap();
        let inv = c.recip();
        let mut vec = SparseVec::new();
        axpy(&mut vec, &inv, &rem);
        let mut scaled = SparseVec::new();
        axpy(&mut scaled, &inv, &combo);
        self.rows.insert(lead, Row { vec, combo: scaled });
        None
    }
}

/// Kernel of the linear map whose `j`-th column is `columns[j]`. Basis vector
/// for each non-pivot column `j` has a `1` at `j` and is supported on `j` and
/// earlier pivot columns; this is the reduced form relative to the given
/// column order, hence deterministic.
pub fn kernel(columns: &[SparseVec]) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for c in columns {
        if let Some(rel) = ech.insert(c.clone()) {
            out.push(rel);
        }
    }
    out
}

/// Rank of a family of vectors.
pub fn rank(vectors: &[SparseVec]) -> usize {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(v.clone());
    }
    ech.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;

    fn sv(entries: &[(usize, i64)]) -> SparseVec {
        entries.iter().map(|&(k, v)| (k, q_int(v))).collect()
    }

    #[test]
    fn kernel_of_small_matrix() {
        // columns: c0 = (1,0), c1 = (0,1), c2 = (1,1), c3 = (2,0)
        let cols = vec![sv(&[(0, 1)]), sv(&[(1, 1)]), sv(&[(0, 1), (1, 1)]), sv(&[(0, 2)])];
        let k = kernel(&cols);
        assert_eq!(k.len(), 2);
        assert_eq!(k[0], sv(&[(0, -1), (1, -1), (2, 1)]));
        assert_eq!(k[1], sv(&[(0, -2), (3, 1)]));
    }

    #[test]
    fn membership_and_rank() {
        let mut e = Echelon::new();
        assert!(e.insert(sv(&[(0, 1), (2, 3)])).is_none());
        assert!(e.insert(sv(&[(1, 2)])).is_none());
        assert!(e.contains(&sv(&[(0, 2), (1, 4), (2, 6)])));
        assert!(!e.contains(&sv(&[(2, 1)])));
        assert_eq!(rank(&[sv(&[(0, 1)]), sv(&[(0, 5)]), SparseVec::new()]), 1);
    }
}
