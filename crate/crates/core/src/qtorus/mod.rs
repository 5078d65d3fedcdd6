//! Based quantum torus: `X^e X^f = v^{Λ(e,f)} X^{e+f}` with `v = q^{1/2}`,
//! coefficients in `Z[v^{±1}]`.

mod laurent;
mod lefschetz;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use laurent::QLaurent;
pub use lefschetz::{lefschetz_decompose, string_poly, Lefschetz, LefschetzFailure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TorusError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("elements live in different quantum tori")]
    FormMismatch,
    #[error("form is not skew-symmetric at ({0},{1})")]
    NotSkewSymmetric(usize, usize),
    #[error("division by zero element")]
    DivisionByZero,
    #[error("not divisible; remainder {remainder}")]
    NotDivisible { remainder: TorusElement },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SkewForm {
    entries: Vec<Vec<i64>>,
}

impl SkewForm {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self, TorusError> {
        let m = entries.len();
        for (i, row) in entries.iter().enumerate() {
            if row.len() != m {
                return Err(TorusError::DimensionMismatch(row.len(), m));
            }
            for j in 0..m {
                if row[j] != -entries[j][i] {
                    return Err(TorusError::NotSkewSymmetric(i, j));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn zero(m: usize) -> Self {
        Self { entries: vec![vec![0; m]; m] }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// `Λ(e, f) = e^t Λ f`.
    pub fn pair(&self, e: &[i64], f: &[i64]) -> i64 {
        let mut s = 0;
        for (i, row) in self.entries.iter().enumerate() {
            if e[i] == 0 {
                continue;
            }
            let r: i64 = row.iter().zip(f).map(|(a, b)| a * b).sum();
            s += e[i] * r;
        }
        s
    }

    /// `Λ f` as a vector.
    pub fn apply(&self, f: &[i64]) -> Vec<i64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Exponent(pub Vec<i64>);

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        let a: i64 = self.0.iter().sum();
        let b: i64 = other.0.iter().sum();
        a.cmp(&b).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn vec_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn unit(m: usize, i: usize) -> Vec<i64> {
    let mut e = vec![0; m];
    e[i] = 1;
    e
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElement {
    form: Arc<SkewForm>,
    terms: BTreeMap<Exponent, QLaurent>,
}

impl TorusElement {
    pub fn zero(form: &Arc<SkewForm>) -> Self {
        Self { form: form.clone(), terms: BTreeMap::new() }
    }

    pub fn one(form: &Arc<SkewForm>) -> Self {
        Self::monomial(form, vec![0; form.dim()], QLaurent::one())
    }

    /// `c X^e`.
    pub fn monomial(form: &Arc<SkewForm>, e: Vec<i64>, c: QLaurent) -> Self {
        assert_eq!(e.len(), form.dim(), "exponent length");
        let mut out = Self::zero(form);
        out.add_term(e, c);
        out
    }

    pub fn x(form: &Arc<SkewForm>, e: Vec<i64>) -> Self {
        Self::monomial(form, e, QLaurent::one())
    }

    pub fn from_terms(
        form: &Arc<SkewForm>,
        terms: impl IntoIterator<Item = (Vec<i64>, QLaurent)>,
    ) -> Self {
        let mut out = Self::zero(form);
        for (e, c) in terms {
            assert_eq!(e.len(), form.dim(), "exponent length");
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, e: Vec<i64>, c: QLaurent) {
        if c.is_zero() {
            return;
        }
        let key = Exponent(e);
        match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot = &*slot + &c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn form(&self) -> &Arc<SkewForm> {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[i64], &QLaurent)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn coeff(&self, e: &[i64]) -> QLaurent {
        self.terms.get(&Exponent(e.to_vec())).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<(&[i64], &QLaurent)> {
        self.terms.iter().next_back().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn trailing(&self) -> Option<(&[i64], &QLaurent)> {
        self.terms.iter().next().map(|(e, c)| (e.0.as_slice(), c))
    }

    fn check(&self, other: &Self) -> Result<(), TorusError> {
        if Arc::ptr_eq(&self.form, &other.form) || self.form == other.form {
            Ok(())
        } else if self.dim() != other.dim() {
            Err(TorusError::DimensionMismatch(self.dim(), other.dim()))
        } else {
            Err(TorusError::FormMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TorusError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.0.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TorusError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            form: self.form.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &QLaurent) -> Self {
        let mut out = Self::zero(&self.form);
        for (e, x) in &self.terms {
            out.add_term(e.0.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.check(other)?;
        let mut out = Self::zero(&self.form);
        for (e, a) in &self.terms {
            for (f, b) in &other.terms {
                let s = self.form.pair(&e.0, &f.0);
                out.add_term(vec_add(&e.0, &f.0), (a * b).shift(s));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self, TorusError> {
        let mut acc = Self::one(&self.form);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The unique `q` with `q * d = self`, by graded-lex leading-term
    /// long division.
    pub fn exact_right_divide(&self, d: &Self) -> Result<Self, TorusError> {
        self.check(d)?;
        let (w, dlead) = match d.leading() {
            Some((w, c)) => (w.to_vec(), c.clone()),
            None => return Err(TorusError::DivisionByZero),
        };
        let mut quot = Self::zero(&self.form);
        if self.is_zero() {
            return Ok(quot);
        }
        let floor = Exponent(vec_sub(
            self.trailing().expect("nonzero").0,
            d.trailing().expect("nonzero").0,
        ));
        let mut rem = self.clone();
        while let Some((u, r)) = rem.leading() {
            let a = vec_sub(u, &w);
            let fail = || TorusError::NotDivisible { remainder: rem.clone() };
            if Exponent(a.clone()) < floor {
                return Err(fail());
            }
            let s = self.form.pair(&a, &w);
            let c = r.shift(-s).exact_div(&dlead).ok_or_else(fail)?;
            let step = Self::monomial(&self.form, a.clone(), c.clone());
            rem = rem.sub(&step.mul(d)?)?;
            quot.add_term(a, c);
        }
        Ok(quot)
    }

    /// Every coefficient of every term is a nonnegative combination of
    /// powers of `v`.
    pub fn is_positive(&self) -> bool {
        self.terms.values().all(QLaurent::is_nonnegative)
    }

    /// Specialization `v = 1`, a commutative Laurent polynomial.
    pub fn at_v_one(&self) -> BTreeMap<Vec<i64>, BigInt> {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            let x = c.at_one();
            if x != BigInt::from(0) {
                out.insert(e.0.clone(), x);
            }
        }
        out
    }

    /// Canonical text: ascending graded-lex terms, e.g. `X[-1,0] + X[-1,1]`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono = format!(
                    "X[{}]",
                    e.0.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                );
                if c.is_one() {
                    mono
                } else if c.len() == 1 {
                    format!("{}*{}", c.render(), mono)
                } else {
                    format!("({})*{}", c.render(), mono)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
