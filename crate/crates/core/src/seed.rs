//! Quantum seeds, toric-frame monomials and seed mutation, plus g-vector and
//! F-polynomial extraction.
//!
//! Vertex indices are 0-based throughout the library.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::qtorus::{vec_sub, QLaurent, SkewForm, TorusElement, TorusError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeedError {
    #[error("B~^t Lambda is not [I_n | 0]")]
    IncompatiblePair,
    #[error("principal part of B~ is not skew-symmetric at ({0},{1})")]
    NotSkewSymmetric(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("mutation index {0} out of range")]
    BadIndex(usize),
    #[error("variables {0} and {1} do not q-commute as Lambda predicts")]
    CommutationViolated(usize, usize),
    #[error("element is not of cluster-monomial shape")]
    NoGVector,
    #[error("exponent {0:?} is not g + B~ gamma for the computed gamma")]
    InconsistentLattice(Vec<i64>),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

pub type Matrix = Vec<Vec<i64>>;

/// Matrix mutation `b'_ij = -b_ij` if `i = k` or `j = k`, else
/// `b_ij + (|b_ik| b_kj + b_ik |b_kj|) / 2`, on an `m x n` matrix.
pub fn mutate_matrix(b: &Matrix, k: usize) -> Matrix {
    let m = b.len();
    let n = b.first().map_or(0, Vec::len);
    let mut out = b.clone();
    for i in 0..m {
        for j in 0..n {
            out[i][j] = if i == k || j == k {
                -b[i][j]
            } else {
                b[i][j] + (b[i][k].abs() * b[k][j] + b[i][k] * b[k][j].abs()) / 2
            };
        }
    }
    out
}

/// `B~ gamma` for `gamma` in `Z^n`.
pub fn btilde_apply(b: &Matrix, gamma: &[i64]) -> Vec<i64> {
    b.iter()
        .map(|row| row.iter().zip(gamma).map(|(x, y)| x * y).sum())
        .collect()
}

/// Whether the quiver on vertices `0..n` read off from `B~` has no oriented
/// cycle.
pub fn principal_part_acyclic(b: &Matrix, n: usize) -> bool {
    // arrow j -> i whenever b_ij > 0; Kahn's algorithm
    let mut indeg = vec![0usize; n];
    for (i, row) in b.iter().take(n).enumerate() {
        for &x in row.iter().take(n) {
            if x > 0 {
                indeg[i] += 1;
            }
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut seen = 0;
    while let Some(j) = ready.pop() {
        seen += 1;
        for i in 0..n {
            if b[i][j] > 0 {
                indeg[i] -= 1;
                if indeg[i] == 0 {
                    ready.push(i);
                }
            }
        }
    }
    seen == n
}

pub fn check_compatible(lambda: &SkewForm, b: &Matrix) -> Result<(), SeedError> {
    let m = lambda.dim();
    if b.len() != m {
        return Err(SeedError::Shape(format!("B~ has {} rows, Lambda is {m}x{m}", b.len())));
    }
    let n = b.first().map_or(0, Vec::len);
    if n == 0 || n > m || b.iter().any(|r| r.len() != n) {
        return Err(SeedError::Shape("B~ must be m x n with 1 <= n <= m".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if b[i][j] != -b[j][i] {
                return Err(SeedError::NotSkewSymmetric(i, j));
            }
        }
    }
    for j in 0..n {
        for i in 0..m {
            let s: i64 = (0..m).map(|l| b[l][j] * lambda.entry(l, i)).sum();
            if s != i64::from(i == j) {
                return Err(SeedError::IncompatiblePair);
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumSeed {
    pub m: usize,
    pub n: usize,
    /// Current `Λ_M` on `Z^m`.
    pub lambda: SkewForm,
    pub btilde: Matrix,
    /// `M(e_i)` expressed in the initial torus.
    pub vars: Vec<TorusElement>,
    pub initial_form: Arc<SkewForm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterMonomialResult {
    pub element: TorusElement,
    pub g_vector: Vec<i64>,
    pub f_coefficients: BTreeMap<Vec<i64>, QLaurent>,
}

impl QuantumSeed {
    pub fn initial(lambda: SkewForm, btilde: Matrix) -> Result<Self, SeedError> {
        check_compatible(&lambda, &btilde)?;
        let m = lambda.dim();
        let n = btilde[0].len();
        let form = Arc::new(lambda.clone());
        let vars = (0..m)
            .map(|i| TorusElement::x(&form, crate::qtorus::unit(m, i)))
            .collect();
        Ok(Self { m, n, lambda, btilde, vars, initial_form: form })
    }

    /// Ordered product `vars[0]^{c_0} ... vars[m-1]^{c_{m-1}}` with the
    /// `v^{-Σ_{i<j} Λ_M(e_i,e_j) c_i c_j}` normalization, for `c >= 0`.
    fn positive_monomial(&self, c: &[i64]) -> Result<TorusElement, SeedError> {
        let mut acc = TorusElement::one(&self.initial_form);
        let mut twist = 0;
        for i in 0..self.m {
            if c[i] == 0 {
                continue;
            }
            acc = acc.mul(&self.vars[i].pow(c[i] as u32)?)?;
            for j in i + 1..self.m {
                twist += self.lambda.entry(i, j) * c[i] * c[j];
            }
        }
        Ok(acc.scale(&QLaurent::monomial(1, -twist)))
    }

    /// Toric frame `M(c)`. Negative entries are realized by splitting
    /// `c = c+ - c-` and using `M(c) = v^{Λ_M(c+,c-)} M(c+) M(c-)^{-1}`.
    pub fn frame_monomial(&self, c: &[i64]) -> Result<TorusElement, SeedError> {
        if c.len() != self.m {
            return Err(SeedError::Shape(format!("exponent of length {}", c.len())));
        }
        let plus: Vec<i64> = c.iter().map(|&x| x.max(0)).collect();
        let minus: Vec<i64> = c.iter().map(|&x| (-x).max(0)).collect();
        let num = self.positive_monomial(&plus)?;
        if minus.iter().all(|&x| x == 0) {
            return Ok(num);
        }
        let den = self.positive_monomial(&minus)?;
        let s = self.lambda.pair(&plus, &minus);
        Ok(num.exact_right_divide(&den)?.scale(&QLaurent::monomial(1, s)))
    }

    pub fn mutate(&self, k: usize) -> Result<Self, SeedError> {
        if k >= self.n {
            return Err(SeedError::BadIndex(k));
        }
        let m = self.m;
        let col: Vec<i64> = self.btilde.iter().map(|r| r[k]).collect();
        let pos: Vec<i64> = col.iter().map(|&b| b.max(0)).collect();
        let neg: Vec<i64> = col.iter().map(|&b| (-b).max(0)).collect();
        let ek = crate::qtorus::unit(m, k);
        // M(c+ - e_k) = v^{Λ_M(c+, e_k)} M(c+) vars[k]^{-1}
        let mut num = TorusElement::zero(&self.initial_form);
        for c in [&pos, &neg] {
            let s = self.lambda.pair(c, &ek);
            num = num.add(&self.positive_monomial(c)?.scale(&QLaurent::monomial(1, s)))?;
        }
        let new_var = num.exact_right_divide(&self.vars[k])?;

        let mut vars = self.vars.clone();
        vars[k] = new_var;
        let mut entries = self.lambda.entries().to_vec();
        let lead_k = vars[k].leading().expect("nonzero").0.to_vec();
        for j in 0..m {
            if j == k {
                continue;
            }
            let lead_j = vars[j].leading().expect("nonzero").0;
            let l = self.initial_form.pair(&lead_k, lead_j);
            entries[k][j] = l;
            entries[j][k] = -l;
            let lhs = vars[k].mul(&vars[j])?;
            let rhs = vars[j].mul(&vars[k])?.scale(&QLaurent::monomial(1, 2 * l));
            if lhs != rhs {
                return Err(SeedError::CommutationViolated(k, j));
            }
        }
        let lambda = SkewForm::new(entries)?;
        let btilde = mutate_matrix(&self.btilde, k);
        check_compatible(&lambda, &btilde)?;
        Ok(Self {
            m,
            n: self.n,
            lambda,
            btilde,
            vars,
            initial_form: self.initial_form.clone(),
        })
    }

    pub fn mutate_sequence(&self, ks: &[usize]) -> Result<Self, SeedError> {
        let mut s = self.clone();
        for &k in ks {
            s = s.mutate(k)?;
        }
        Ok(s)
    }

    /// `B~` with the principal part only, i.e. the first `n` rows.
    pub fn principal_part(&self) -> Matrix {
        self.btilde.iter().take(self.n).cloned().collect()
    }

    pub fn is_acyclic(&self) -> bool {
        principal_part_acyclic(&self.btilde, self.n)
    }

    /// `γ` with `B~ γ = w`, read off from the compatibility identity
    /// `γ_j = -(Λ w)_j`; `None` when `w` is not in the image of `B~`.
    pub fn solve_btilde(&self, w: &[i64]) -> Option<Vec<i64>> {
        let lw = self.initial_form.apply(w);
        let gamma: Vec<i64> = lw.iter().take(self.n).map(|x| -x).collect();
        (btilde_apply(&self.btilde, &gamma) == w).then_some(gamma)
    }

    /// The unique exponent `g` of `r` such that every exponent is
    /// `g + B~ γ` with `γ >= 0`. Must be called on the seed whose `B~` and
    /// form define the ambient torus (the initial seed).
    pub fn g_vector(&self, r: &TorusElement) -> Result<Vec<i64>, SeedError> {
        let exps: Vec<&[i64]> = r.terms().map(|(e, _)| e).collect();
        let mut found = Vec::new();
        for g in &exps {
            let ok = exps.iter().all(|u| {
                self.solve_btilde(&vec_sub(u, g))
                    .is_some_and(|gamma| gamma.iter().all(|&x| x >= 0))
            });
            if ok {
                found.push(g.to_vec());
            }
        }
        match found.len() {
            1 => Ok(found.pop().expect("one candidate")),
            _ => Err(SeedError::NoGVector),
        }
    }

    /// Coefficients `F_γ` with `r = Σ_γ F_γ · X^g X^{B~γ}` (torus product).
    pub fn f_polynomial(
        &self,
        r: &TorusElement,
        g: &[i64],
    ) -> Result<BTreeMap<Vec<i64>, QLaurent>, SeedError> {
        let mut out = BTreeMap::new();
        for (u, c) in r.terms() {
            let w = vec_sub(u, g);
            let gamma = self
                .solve_btilde(&w)
                .ok_or_else(|| SeedError::InconsistentLattice(u.to_vec()))?;
            let s = self.initial_form.pair(g, &w);
            out.insert(gamma, c.shift(-s));
        }
        Ok(out)
    }

    /// Reassemble `Σ_γ F_γ · X^g X^{B~γ}`.
    pub fn from_f_polynomial(
        &self,
        g: &[i64],
        f: &BTreeMap<Vec<i64>, QLaurent>,
    ) -> Result<TorusElement, SeedError> {
        let xg = TorusElement::x(&self.initial_form, g.to_vec());
        let mut acc = TorusElement::zero(&self.initial_form);
        for (gamma, c) in f {
            let x = TorusElement::monomial(&self.initial_form, btilde_apply(&self.btilde, gamma), c.clone());
            acc = acc.add(&xg.mul(&x)?)?;
        }
        Ok(acc)
    }

    /// `M_r(λ)` for the seed reached from `self` along `ks`, with g-vector and
    /// F-coefficients taken relative to `self`.
    pub fn cluster_monomial(
        &self,
        ks: &[usize],
        lam: &[i64],
    ) -> Result<ClusterMonomialResult, SeedError> {
        if lam.len() != self.m || lam.iter().any(|&x| x < 0) {
            return Err(SeedError::Shape("lam must be a nonnegative vector of length m".into()));
        }
        if ks.windows(2).any(|w| w[0] == w[1]) {
            return Err(SeedError::Shape("consecutive mutation indices must differ".into()));
        }
        let fin = self.mutate_sequence(ks)?;
        let element = fin.frame_monomial(lam)?;
        let g_vector = self.g_vector(&element)?;
        let f_coefficients = self.f_polynomial(&element, &g_vector)?;
        Ok(ClusterMonomialResult { element, g_vector, f_coefficients })
    }

    /// Check that `vars[i] vars[j] = v^{2Λ_M(i,j)} vars[j] vars[i]` for all pairs.
    pub fn commutation_holds(&self) -> Result<bool, SeedError> {
        for i in 0..self.m {
            for j in i + 1..self.m {
                let l = self.lambda.entry(i, j);
                let lhs = self.vars[i].mul(&self.vars[j])?;
                let rhs = self.vars[j].mul(&self.vars[i])?.scale(&QLaurent::monomial(1, 2 * l));
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// `Λ` making `[B; I_n]` (principal coefficients) compatible:
/// `[[0, -I], [I, -B]]`.
pub fn principal_lambda(b: &Matrix) -> SkewForm {
    let n = b.len();
    let mut l = vec![vec![0; 2 * n]; 2 * n];
    for i in 0..n {
        l[i][n + i] = -1;
        l[n + i][i] = 1;
        for j in 0..n {
            l[n + i][n + j] = -b[i][j];
        }
    }
    SkewForm::new(l).expect("principal form is skew")
}

/// `[B; I_n]`.
pub fn principal_btilde(b: &Matrix) -> Matrix {
    let n = b.len();
    let mut out = b.clone();
    for i in 0..n {
        out.push(crate::qtorus::unit(n, i));
    }
    out
}
