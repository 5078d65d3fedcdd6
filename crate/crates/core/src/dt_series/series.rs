//! Truncated Laurent series in `v` and cone-graded series in the ambient
//! quantum torus.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::qtorus::{vec_add, QLaurent, SkewForm};
use crate::seed::{btilde_apply, Matrix};

/// `Σ c_k v^k + O(v^prec)`; `prec = None` means the series is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    terms: BTreeMap<i64, BigInt>,
    prec: Option<i64>,
}

impl Series {
    pub fn exact(l: &QLaurent) -> Self {
        Self { terms: l.terms().clone(), prec: None }
    }

    pub fn one() -> Self {
        Self::exact(&QLaurent::one())
    }

    /// Terms at or above `prec` are dropped.
    pub fn truncated(terms: impl IntoIterator<Item = (i64, BigInt)>, prec: i64) -> Self {
        let mut s = Self { terms: BTreeMap::new(), prec: Some(prec) };
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    fn add_term(&mut self, k: i64, c: BigInt) {
        if self.prec.is_some_and(|p| k >= p) || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Lowest known nonzero degree.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn coeff(&self, k: i64) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Known to be zero (every coefficient below the precision vanishes).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_laurent(&self) -> Option<QLaurent> {
        self.is_exact().then(|| QLaurent::from_terms(self.terms.iter().map(|(k, c)| (*k, c.clone()))))
    }

    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(d, c)| (d + k, c.clone())).collect(),
            prec: self.prec.map(|p| p + k),
        }
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect(), prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = min_prec(self.prec, other.prec);
        let mut s = Self { terms: BTreeMap::new(), prec };
        for (k, c) in self.terms.iter().chain(&other.terms) {
            s.add_term(*k, c.clone());
        }
        s
    }

    /// `prec(ab) = min(prec(a) + val(b), prec(b) + val(a))`.
    pub fn mul(&self, other: &Self) -> Self {
        let a_err = self.prec.map(|p| p + other.floor());
        let b_err = other.prec.map(|p| p + self.floor());
        let prec = min_prec(a_err, b_err);
        let mut s = Self { terms: BTreeMap::new(), prec };
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                s.add_term(i + j, a * b);
            }
        }
        s
    }

    /// Lower bound for the degrees that can occur, including unknown ones.
    fn floor(&self) -> i64 {
        match (self.valuation(), self.prec) {
            (Some(v), _) => v,
            (None, Some(p)) => p,
            (None, None) => i64::MAX / 4,
        }
    }

    /// Equal in every degree both sides know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let p = min_prec(self.prec, other.prec);
        let below = |k: &i64| p.is_none_or(|p| *k < p);
        let keys: std::collections::BTreeSet<i64> =
            self.terms.keys().chain(other.terms.keys()).copied().filter(below).collect();
        keys.into_iter().all(|k| self.coeff(k) == other.coeff(k))
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = QLaurent::from_terms(self.terms.iter().map(|(k, c)| (*k, c.clone())));
        write!(f, "{}", l.render())?;
        if let Some(p) = self.prec {
            write!(f, " + O(q^({p}/2))")?;
        }
        Ok(())
    }
}

/// `Π_{k=1}^{n} 1/(1 - T^k)` as a power series in `T`, degrees `< len`.
pub fn inverse_t_factorial(n: u32, len: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); len];
    if len == 0 {
        return c;
    }
    c[0] = BigInt::one();
    for k in 1..=n as usize {
        for d in k..len {
            let x = c[d - k].clone();
            c[d] += x;
        }
    }
    c
}

/// `Σ_γ c_γ X^{base + B~γ}` with `γ ≤ bound` entrywise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeSeries {
    pub form: Arc<SkewForm>,
    pub base: Vec<i64>,
    pub btilde: Matrix,
    pub bound: Vec<i64>,
    pub coeffs: BTreeMap<Vec<i64>, Series>,
}

impl ConeSeries {
    pub fn one(form: &Arc<SkewForm>, btilde: &Matrix, bound: &[i64]) -> Self {
        Self {
            form: form.clone(),
            base: vec![0; form.dim()],
            btilde: btilde.clone(),
            bound: bound.to_vec(),
            coeffs: BTreeMap::from([(vec![0; bound.len()], Series::one())]),
        }
    }

    pub fn within(&self, gamma: &[i64]) -> bool {
        gamma.iter().zip(&self.bound).all(|(g, b)| g <= b)
    }

    pub fn exponent(&self, gamma: &[i64]) -> Vec<i64> {
        vec_add(&self.base, &btilde_apply(&self.btilde, gamma))
    }

    pub fn coeff(&self, gamma: &[i64]) -> Option<&Series> {
        self.coeffs.get(gamma)
    }

    pub fn insert(&mut self, gamma: Vec<i64>, c: Series) {
        if !self.within(&gamma) {
            return;
        }
        let c = match self.coeffs.remove(&gamma) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !(c.is_zero() && c.is_exact()) {
            self.coeffs.insert(gamma, c);
        }
    }

    /// Product in the ambient torus, discarding `γ` beyond the bound.
    pub fn mul(&self, other: &Self) -> Self {
        assert!(self.form == other.form && self.btilde == other.btilde, "same ambient torus");
        let bound: Vec<i64> = self.bound.iter().zip(&other.bound).map(|(a, b)| *a.min(b)).collect();
        let mut out = Self {
            form: self.form.clone(),
            base: vec_add(&self.base, &other.base),
            btilde: self.btilde.clone(),
            bound,
            coeffs: BTreeMap::new(),
        };
        for (g1, a) in &self.coeffs {
            let e1 = self.exponent(g1);
            for (g2, b) in &other.coeffs {
                let g = vec_add(g1, g2);
                if !out.within(&g) {
                    continue;
                }
                let twist = self.form.pair(&e1, &other.exponent(g2));
                out.insert(g, a.mul(b).shift(twist));
            }
        }
        out
    }

    /// Same base and, for every `γ`, coefficients agreeing to the known
    /// precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let zero = Series::exact(&QLaurent::zero());
        let keys: std::collections::BTreeSet<&Vec<i64>> =
            self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.into_iter().all(|g| {
            let a = self.coeffs.get(g).unwrap_or(&zero);
            let b = other.coeffs.get(g).unwrap_or(&zero);
            a.agrees_with(b)
        })
    }
}

/// `lhs` equals the ordered product of `factors` up to bound and precision.
pub fn factorization_check(lhs: &ConeSeries, factors: &[ConeSeries]) -> bool {
    let Some(first) = factors.first() else {
        return lhs.agrees_with(&ConeSeries::one(&lhs.form, &lhs.btilde, &lhs.bound));
    };
    let prod = factors[1..].iter().fold(first.clone(), |acc, f| acc.mul(f));
    lhs.agrees_with(&prod)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laurent(terms: &[(i64, i64)]) -> QLaurent {
        QLaurent::from_terms(terms.iter().map(|&(k, c)| (k, BigInt::from(c))))
    }

    #[test]
    fn precision_rules() {
        let a = Series::truncated([(0, BigInt::from(1)), (2, BigInt::from(1))], 4);
        let b = Series::exact(&laurent(&[(1, 1)]));
        let ab = a.mul(&b);
        assert_eq!(ab.prec(), Some(5));
        assert_eq!(ab.coeff(3), BigInt::from(1));
        let sq = a.mul(&a);
        assert_eq!(sq.prec(), Some(4));
        assert!(a.agrees_with(&Series::exact(&laurent(&[(0, 1), (2, 1), (6, 5)]))));
        assert!(!a.agrees_with(&Series::exact(&laurent(&[(0, 1)]))));
    }

    #[test]
    fn partition_counts() {
        // parts of size at most 2: floor(k/2) + 1
        let c = inverse_t_factorial(2, 10);
        for (k, x) in c.iter().enumerate() {
            assert_eq!(*x, BigInt::from(k / 2 + 1));
        }
        assert_eq!(inverse_t_factorial(0, 3), vec![BigInt::from(1), BigInt::zero(), BigInt::zero()]);
    }
}
