//! Laurent polynomials in one variable with big-integer coefficients.
//!
//! The variable is `v = q^{1/2}` for torus coefficients and `T^{1/2}` for
//! motivic classes; exponents are always integer powers of that variable.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QLaurent {
    terms: BTreeMap<i64, BigInt>,
}

impl QLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * v^k`.
    pub fn monomial(c: impl Into<BigInt>, k: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(k, c.into());
        p
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c.into());
        }
        p
    }

    pub fn add_term(&mut self, k: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: i64) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiply by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// `v -> v^{-1}`.
    pub fn bar(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Value at `v = 1`.
    pub fn at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Value at the integer point `x`; `None` when negative powers leave a
    /// fraction.
    pub fn eval_int(&self, x: &BigInt) -> Option<BigInt> {
        let mut num = BigInt::zero();
        let lo = self.min_degree().unwrap_or(0).min(0);
        for (k, c) in &self.terms {
            num += c * x.pow((k - lo) as u32);
        }
        let den = x.pow((-lo) as u32);
        if den.is_zero() {
            return None;
        }
        let (q, r) = num.div_rem(&den);
        r.is_zero().then_some(q)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Drop every term of degree `>= cap`.
    pub fn truncate_above(&self, cap: i64) -> Self {
        Self {
            terms: self.terms.range(..cap).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    /// Exact division in `Z[v, v^{-1}]`; `None` when `self / d` is not a
    /// Laurent polynomial with integer coefficients.
    pub fn exact_div(&self, d: &QLaurent) -> Option<QLaurent> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (dlo, dhi) = (d.min_degree()?, d.max_degree()?);
        let dlead = &d.terms[&dhi];
        let lo = self.min_degree()?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(hi) = rem.max_degree() {
            let e = hi - dhi;
            if e + dlo < lo {
                return None;
            }
            let (c, r) = rem.terms[&hi].div_rem(dlead);
            if !r.is_zero() {
                return None;
            }
            rem = &rem - &d.scale(&c).shift(e);
            quot.add_term(e, c);
        }
        Some(quot)
    }

    /// Canonical text with `v^k` rendered as `q^(k/2)`, ascending degree.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                if *k == 0 {
                    c.to_string()
                } else if c.is_one() {
                    format!("q^({k}/2)")
                } else if *c == -BigInt::one() {
                    format!("-q^({k}/2)")
                } else {
                    format!("{c}*q^({k}/2)")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl From<i64> for QLaurent {
    fn from(c: i64) -> Self {
        Self::monomial(c, 0)
    }
}

impl Add for &QLaurent {
    type Output = QLaurent;
    fn add(self, rhs: &QLaurent) -> QLaurent {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &QLaurent {
    type Output = QLaurent;
    fn sub(self, rhs: &QLaurent) -> QLaurent {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, -c);
        }
        out
    }
}

impl Mul for &QLaurent {
    type Output = QLaurent;
    fn mul(self, rhs: &QLaurent) -> QLaurent {
        let mut out = QLaurent::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }
}

impl Neg for &QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        QLaurent {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QLaurent {
            type Output = QLaurent;
            fn $m(self, rhs: QLaurent) -> QLaurent {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
