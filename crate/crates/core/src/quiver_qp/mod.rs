//! Quivers, truncated potentials, DWZ mutation of quivers with potential and
//! the Euler form.
//!
//! Paths and cyclic words are stored in traversal order: `[a, b, c]` means
//! `a` first, then `b`, then `c`.

mod jacobi;
mod mutation;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Q;
use crate::seed::Matrix;

pub use jacobi::jacobi_dims;
pub use mutation::{
    apply_substitution, is_reduced, mutate_qp, premutate, reduce, substitute_path,
    MutationOutcome, PremutationMap, ReductionStep,
};

pub const DEFAULT_DEGREE_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QpError {
    #[error("principal part of B~ is not skew-symmetric at ({0},{1})")]
    NotSkewSymmetric(usize, usize),
    #[error("loop at vertex {0}")]
    LoopAtVertex(usize),
    #[error("degree cap {0} exceeded")]
    DegreeCapExceeded(usize),
    #[error("unknown arrow {0}")]
    UnknownArrow(usize),
    #[error("word {0:?} is not a closed path")]
    NotCyclic(Vec<usize>),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arrow {
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub m: usize,
    arrows: BTreeMap<usize, Arrow>,
}

impl Quiver {
    pub fn new(m: usize) -> Self {
        Self { m, arrows: BTreeMap::new() }
    }

    pub fn with_arrows(
        m: usize,
        arrows: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, QpError> {
        let mut q = Self::new(m);
        for (id, src, tgt) in arrows {
            q.insert(id, src, tgt)?;
        }
        Ok(q)
    }

    pub fn insert(&mut self, id: usize, src: usize, tgt: usize) -> Result<(), QpError> {
        if src >= self.m || tgt >= self.m {
            return Err(QpError::BadVertex(src.max(tgt)));
        }
        self.arrows.insert(id, Arrow { src, tgt });
        Ok(())
    }

    /// Append an arrow with the next free id.
    pub fn push(&mut self, src: usize, tgt: usize) -> usize {
        let id = self.next_id();
        self.arrows.insert(id, Arrow { src, tgt });
        id
    }

    pub fn remove(&mut self, id: usize) {
        self.arrows.remove(&id);
    }

    pub fn next_id(&self) -> usize {
        self.arrows.keys().next_back().map_or(0, |k| k + 1)
    }

    pub fn arrow(&self, id: usize) -> Result<Arrow, QpError> {
        self.arrows.get(&id).copied().ok_or(QpError::UnknownArrow(id))
    }

    pub fn arrows(&self) -> impl Iterator<Item = (usize, Arrow)> + '_ {
        self.arrows.iter().map(|(k, a)| (*k, *a))
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    /// `counts[i][j]` = number of arrows `i -> j`.
    pub fn counts(&self) -> Vec<Vec<i64>> {
        let mut c = vec![vec![0; self.m]; self.m];
        for a in self.arrows.values() {
            c[a.src][a.tgt] += 1;
        }
        c
    }

    pub fn from_counts(counts: &[Vec<i64>]) -> Self {
        let m = counts.len();
        let mut q = Self::new(m);
        for (i, row) in counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                for _ in 0..c {
                    q.push(i, j);
                }
            }
        }
        q
    }

    /// Canonical quiver of `B~` (`m x n`): `max(b_ij, 0)` arrows `j -> i`
    /// (and `max(-b_ij, 0)` arrows `i -> j` for frozen `i`); `extra` gives
    /// arrow counts among the frozen vertices.
    pub fn from_btilde(b: &Matrix, extra: Option<&Matrix>) -> Result<Self, QpError> {
        let m = b.len();
        let n = b.first().map_or(0, Vec::len);
        for i in 0..n {
            for j in 0..n {
                if b[i][j] != -b[j][i] {
                    return Err(QpError::NotSkewSymmetric(i, j));
                }
            }
        }
        let mut counts = vec![vec![0; m]; m];
        for i in 0..m {
            for j in 0..n {
                if b[i][j] > 0 {
                    counts[j][i] += b[i][j];
                } else if i >= n {
                    counts[i][j] += -b[i][j];
                }
            }
        }
        if let Some(x) = extra {
            for (a, row) in x.iter().enumerate() {
                for (c, &k) in row.iter().enumerate() {
                    counts[n + a][n + c] += k;
                }
            }
        }
        Ok(Self::from_counts(&counts))
    }

    /// `b_ij = #(j -> i) - #(i -> j)` on the first `n` columns.
    pub fn to_btilde(&self, n: usize) -> Matrix {
        let c = self.counts();
        (0..self.m)
            .map(|i| (0..n).map(|j| c[j][i] - c[i][j]).collect())
            .collect()
    }

    /// Standard quiver mutation at `k`: reverse arrows at `k`, add `i -> j`
    /// for each path `i -> k -> j`, cancel 2-cycles.
    pub fn mutate(&self, k: usize) -> Result<Self, QpError> {
        let c = self.counts();
        if c[k][k] > 0 {
            return Err(QpError::LoopAtVertex(k));
        }
        let m = self.m;
        let mut d = vec![vec![0; m]; m];
        for i in 0..m {
            for j in 0..m {
                d[i][j] = if i == k || j == k { c[j][i] } else { c[i][j] + c[i][k] * c[k][j] };
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                let t = d[i][j].min(d[j][i]);
                d[i][j] -= t;
                d[j][i] -= t;
            }
        }
        Ok(Self::from_counts(&d))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.counts() == other.counts()
    }

    pub fn has_two_cycles(&self) -> bool {
        let c = self.counts();
        (0..self.m).any(|i| c[i][i] > 0 || (0..i).any(|j| c[i][j] > 0 && c[j][i] > 0))
    }

    /// Full subquiver on vertices `0..n`.
    pub fn restrict(&self, n: usize) -> Self {
        Self {
            m: n,
            arrows: self
                .arrows
                .iter()
                .filter(|(_, a)| a.src < n && a.tgt < n)
                .map(|(k, a)| (*k, *a))
                .collect(),
        }
    }

    pub fn is_path(&self, word: &[usize]) -> Result<bool, QpError> {
        for w in word.windows(2) {
            if self.arrow(w[0])?.tgt != self.arrow(w[1])?.src {
                return Ok(false);
            }
        }
        if let Some(&a) = word.first() {
            self.arrow(a)?;
        }
        Ok(true)
    }

    pub fn is_cycle(&self, word: &[usize]) -> Result<bool, QpError> {
        let (Some(&first), Some(&last)) = (word.first(), word.last()) else {
            return Ok(false);
        };
        Ok(self.is_path(word)? && self.arrow(last)?.tgt == self.arrow(first)?.src)
    }
}

/// `χ(γ1, γ2) = Σ_i γ1_i γ2_i - Σ_{i,j} a_{ji} γ1_i γ2_j` with `a_{ji}` the
/// number of arrows `j -> i`.
pub fn euler_form(q: &Quiver, g1: &[i64], g2: &[i64]) -> i64 {
    let c = q.counts();
    let mut s: i64 = g1.iter().zip(g2).map(|(a, b)| a * b).sum();
    for i in 0..q.m {
        for j in 0..q.m {
            s -= c[j][i] * g1[i] * g2[j];
        }
    }
    s
}

/// Linear combination of paths.
pub type PathCombo = BTreeMap<Vec<usize>, Q>;

pub fn combo_add(acc: &mut PathCombo, path: Vec<usize>, c: Q) {
    if c.is_zero() {
        return;
    }
    let slot = acc.entry(path.clone()).or_insert_with(Q::zero);
    *slot += c;
    if slot.is_zero() {
        acc.remove(&path);
    }
}

/// Lexicographically minimal rotation.
pub fn canonical_rotation(word: &[usize]) -> Vec<usize> {
    (0..word.len().max(1))
        .map(|r| {
            let mut w = word[r.min(word.len())..].to_vec();
            w.extend_from_slice(&word[..r.min(word.len())]);
            w
        })
        .min()
        .unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    pub cap: usize,
    terms: BTreeMap<Vec<usize>, Q>,
}

impl Potential {
    pub fn zero(cap: usize) -> Self {
        Self { cap, terms: BTreeMap::new() }
    }

    pub fn from_terms(cap: usize, terms: impl IntoIterator<Item = (Vec<usize>, Q)>) -> Self {
        let mut p = Self::zero(cap);
        for (w, c) in terms {
            p.add_word(&w, c);
        }
        p
    }

    /// Add `c` times the cyclic word `w`; words longer than the cap and
    /// empty words are dropped.
    pub fn add_word(&mut self, w: &[usize], c: Q) {
        if w.is_empty() || w.len() > self.cap {
            return;
        }
        combo_add(&mut self.terms, canonical_rotation(w), c);
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn mentions(&self, arrow: usize) -> bool {
        self.terms.keys().any(|w| w.contains(&arrow))
    }

    /// `∂_a W`: for each occurrence of `a`, the path that starts right after
    /// it and wraps around to just before it.
    pub fn cyclic_derivative(&self, a: usize) -> PathCombo {
        let mut out = PathCombo::new();
        for (w, c) in &self.terms {
            for (p, &x) in w.iter().enumerate() {
                if x == a {
                    let mut path = w[p + 1..].to_vec();
                    path.extend_from_slice(&w[..p]);
                    combo_add(&mut out, path, c.clone());
                }
            }
        }
        out
    }

    pub fn without(&self, word: &[usize]) -> Self {
        let mut p = self.clone();
        p.terms.remove(&canonical_rotation(word));
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPData {
    pub quiver: Quiver,
    pub potential: Potential,
}

impl QPData {
    pub fn new(quiver: Quiver, potential: Potential) -> Result<Self, QpError> {
        for w in potential.terms.keys() {
            if !quiver.is_cycle(w)? {
                return Err(QpError::NotCyclic(w.clone()));
            }
        }
        Ok(Self { quiver, potential })
    }

    pub fn without_potential(quiver: Quiver, cap: usize) -> Self {
        Self { quiver, potential: Potential::zero(cap) }
    }

    /// Restriction to the full subquiver on `0..n`; potential terms touching
    /// other vertices are dropped.
    pub fn restrict(&self, n: usize) -> Self {
        let quiver = self.quiver.restrict(n);
        let terms = self
            .potential
            .terms
            .iter()
            .filter(|(w, _)| w.iter().all(|a| quiver.arrows.contains_key(a)))
            .map(|(w, c)| (w.clone(), c.clone()));
        let potential = Potential::from_terms(self.potential.cap, terms);
        Self { quiver, potential }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::seed::mutate_matrix;

    #[test]
    fn from_btilde_orientation() {
        let a2 = Quiver::from_btilde(&vec![vec![0, 1], vec![-1, 0]], None).unwrap();
        assert_eq!(a2.counts(), vec![vec![0, 0], vec![1, 0]]);
        let kr = Quiver::from_btilde(&vec![vec![0, 2], vec![-2, 0]], None).unwrap();
        assert_eq!(kr.counts(), vec![vec![0, 0], vec![2, 0]]);
        let z = Quiver::from_btilde(&vec![vec![0, 0], vec![0, 0]], None).unwrap();
        assert_eq!(z.arrow_count(), 0);
        assert!(Quiver::from_btilde(&vec![vec![0, 1], vec![1, 0]], None).is_err());
    }

    #[test]
    fn quiver_mutation_matches_matrix_rule() {
        let b = vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0], vec![1, 0, 0]];
        let q0 = Quiver::from_btilde(&b, None).unwrap();
        for k in 0..3 {
            let q1 = q0.mutate(k).unwrap();
            assert_eq!(q1.to_btilde(3), mutate_matrix(&b, k));
            assert!(q1.mutate(k).unwrap().same_shape(&q0));
        }
        assert_eq!(Quiver::new(3).mutate(1).unwrap(), Quiver::new(3));
    }

    #[test]
    fn cyclic_derivatives() {
        let w = Potential::from_terms(12, [(vec![0, 1, 2], q(1))]);
        assert_eq!(w.cyclic_derivative(0), PathCombo::from([(vec![1, 2], q(1))]));
        assert!(Potential::zero(12).cyclic_derivative(0).is_empty());
        let w2 = Potential::from_terms(12, [(vec![0, 1, 0, 1], q(1))]);
        assert_eq!(w2.cyclic_derivative(0), PathCombo::from([(vec![1, 0, 1], q(2))]));
    }

    #[test]
    fn euler_form_convention() {
        // one arrow 1 -> 2 (0-based: 0 -> 1)
        let q1 = Quiver::with_arrows(2, [(0, 0, 1)]).unwrap();
        assert_eq!(euler_form(&q1, &[1, 0], &[0, 1]), 0);
        assert_eq!(euler_form(&q1, &[0, 1], &[1, 0]), -1);
        assert_eq!(euler_form(&Quiver::new(2), &[2, 3], &[2, 3]), 13);
        // antisymmetrization recovers B from the canonical quiver of B
        let b = vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]];
        let q3 = Quiver::from_btilde(&b, None).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let (ei, ej) = (crate::qtorus::unit(3, i), crate::qtorus::unit(3, j));
                let anti = -euler_form(&q3, &ei, &ej) + euler_form(&q3, &ej, &ei);
                assert_eq!(anti, b[i][j]);
            }
        }
    }
}
