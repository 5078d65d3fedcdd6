//! Seed corpus and an independent commutative cluster-mutation oracle.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use qcluster::linalg::q;
use qcluster::qtorus::SkewForm;
use qcluster::quiver_qp::{Potential, QPData, Quiver};
use qcluster::seed::{principal_btilde, principal_lambda, Matrix, QuantumSeed};

pub struct Case {
    pub name: &'static str,
    pub lambda: Matrix,
    pub btilde: Matrix,
    pub n: usize,
    /// Potential words on the arrows of `Quiver::from_btilde` of the principal part.
    pub potential: Vec<Vec<usize>>,
}

impl Case {
    pub fn m(&self) -> usize {
        self.btilde.len()
    }

    pub fn principal(&self) -> Matrix {
        self.btilde[..self.n].to_vec()
    }

    pub fn seed(&self) -> QuantumSeed {
        QuantumSeed::initial(SkewForm::new(self.lambda.clone()).unwrap(), self.btilde.clone()).unwrap()
    }

    pub fn qp(&self, cap: usize) -> QPData {
        let quiver = Quiver::from_btilde(&self.principal(), None).unwrap();
        let w = Potential::from_terms(cap, self.potential.iter().map(|w| (w.clone(), q(1))));
        QPData::new(quiver, w).unwrap()
    }
}

fn principal(name: &'static str, b: Matrix, potential: Vec<Vec<usize>>) -> Case {
    Case { name, lambda: principal_lambda(&b).entries().to_vec(), btilde: principal_btilde(&b), n: b.len(), potential }
}

pub fn a2() -> Case {
    let b = vec![vec![0, 1], vec![-1, 0]];
    Case { name: "A2", lambda: b.clone(), btilde: b, n: 2, potential: vec![] }
}

pub fn a3() -> Case {
    principal("A3", vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]], vec![])
}

pub fn kronecker() -> Case {
    principal("Kronecker", vec![vec![0, 2], vec![-2, 0]], vec![])
}

/// Oriented 3-cycle 1 -> 2 -> 3 -> 1 with the full-cycle potential.
pub fn triangle() -> Case {
    principal("cyclic triangle", vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]], vec![vec![0, 1, 2]])
}

pub fn m4() -> Case {
    Case {
        name: "m4",
        lambda: vec![vec![0, 0, -1, 0], vec![0, 0, 1, -1], vec![1, -1, 0, -1], vec![0, 1, 1, 0]],
        btilde: vec![vec![0, 1], vec![-1, 0], vec![1, 0], vec![1, 1]],
        n: 2,
        potential: vec![],
    }
}

pub fn corpus() -> Vec<Case> {
    vec![a2(), a3(), kronecker(), triangle(), m4()]
}

/// All sequences over `0..n` of length `<= max_len` with distinct
/// consecutive entries, the empty one included.
pub fn sequences(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for k in 0..n {
                if s.last() != Some(&k) {
                    let mut t: Vec<usize> = s.clone();
                    t.push(k);
                    next.push(t);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Commutative Laurent polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent(pub BTreeMap<Vec<i64>, BigInt>);

impl Laurent {
    pub fn monomial(e: Vec<i64>) -> Self {
        Self(BTreeMap::from([(e, BigInt::one())]))
    }

    fn add_term(&mut self, e: Vec<i64>, c: BigInt) {
        let slot = self.0.entry(e.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&e);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.0 {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self(BTreeMap::new());
        for (e, c) in &self.0 {
            for (f, d) in &o.0 {
                r.add_term(e.iter().zip(f).map(|(a, b)| a + b).collect(), c * d);
            }
        }
        r
    }

    /// Exact quotient by leading-term cancellation in lex order.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        let (de, dc) = d.0.iter().next_back()?;
        let mut rem = self.clone();
        let mut quo = Self(BTreeMap::new());
        while let Some((e, c)) = rem.0.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            let (qc, r) = c.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            let qe: Vec<i64> = e.iter().zip(de).map(|(a, b)| a - b).collect();
            let t = Self(BTreeMap::from([(qe.clone(), qc.clone())]));
            rem = rem.add(&t.mul(d).neg());
            quo.add_term(qe, qc);
            if quo.0.len() > 100_000 {
                return None;
            }
        }
        Some(quo)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }
}

/// Cluster variables after `ks` by `x'_k x_k = Π x_i^{[b_ik]+} + Π x_i^{[-b_ik]+}`,
/// with exchange matrices mutated by the usual rule (written out here again).
pub fn commutative_cluster(btilde: &Matrix, ks: &[usize]) -> Option<Vec<Laurent>> {
    let m = btilde.len();
    let mut b = btilde.clone();
    let mut xs: Vec<Laurent> = (0..m).map(|i| Laurent::monomial((0..m).map(|j| i64::from(i == j)).collect())).collect();
    let one = Laurent::monomial(vec![0; m]);
    for &k in ks {
        let mut plus = one.clone();
        let mut minus = one.clone();
        for i in 0..m {
            for _ in 0..b[i][k].max(0) {
                plus = plus.mul(&xs[i]);
            }
            for _ in 0..(-b[i][k]).max(0) {
                minus = minus.mul(&xs[i]);
            }
        }
        xs[k] = plus.add(&minus).exact_div(&xs[k])?;
        let n = b[0].len();
        let old = b.clone();
        for i in 0..m {
            for j in 0..n {
                b[i][j] = if i == k || j == k {
                    -old[i][j]
                } else {
                    old[i][j] + (old[i][k].abs() * old[k][j] + old[i][k] * old[k][j].abs()) / 2
                };
            }
        }
    }
    Some(xs)
}
