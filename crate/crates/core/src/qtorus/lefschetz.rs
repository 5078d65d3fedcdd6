//! Decomposition of a Laurent polynomial into centered symmetric strings
//! `P(N,k) = v^N (v^{-k} + v^{-k+2} + ... + v^k)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::QLaurent;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lefschetz {
    /// Center, in powers of `v`.
    pub center: i64,
    /// String length `k` to multiplicity `c_k > 0`.
    pub multiplicities: BTreeMap<i64, BigInt>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LefschetzFailure {
    Zero,
    Asymmetric,
    MixedParity,
    NegativeMultiplicity,
}

impl LefschetzFailure {
    pub fn code(self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Asymmetric => "asymmetric",
            Self::MixedParity => "mixed-parity",
            Self::NegativeMultiplicity => "negative-multiplicity",
        }
    }
}

/// `P(N,k)`.
pub fn string_poly(center: i64, k: i64) -> QLaurent {
    QLaurent::from_terms((0..=k).map(|i| (center - k + 2 * i, 1)))
}

pub fn lefschetz_decompose(p: &QLaurent) -> Result<Lefschetz, LefschetzFailure> {
    let (lo, hi) = match (p.min_degree(), p.max_degree()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(LefschetzFailure::Zero),
    };
    if p.terms().keys().any(|k| (k - lo).rem_euclid(2) != 0) {
        return Err(LefschetzFailure::MixedParity);
    }
    let center = (lo + hi) / 2;
    if p.terms().iter().any(|(k, c)| p.coeff(2 * center - k) != *c) {
        return Err(LefschetzFailure::Asymmetric);
    }
    let mut multiplicities = BTreeMap::new();
    let mut k = hi - center;
    while k >= 0 {
        let c = p.coeff(center + k) - p.coeff(center + k + 2);
        if c.is_negative() {
            return Err(LefschetzFailure::NegativeMultiplicity);
        }
        if !c.is_zero() {
            multiplicities.insert(k, c);
        }
        k -= 2;
    }
    let out = Lefschetz { center, multiplicities };
    debug_assert_eq!(&out.expand(), p);
    Ok(out)
}

impl Lefschetz {
    pub fn expand(&self) -> QLaurent {
        let mut acc = QLaurent::zero();
        for (k, c) in &self.multiplicities {
            acc = &acc + &string_poly(self.center, *k).scale(c);
        }
        acc
    }

    pub fn render(&self) -> String {
        let cs: Vec<String> = self
            .multiplicities
            .iter()
            .map(|(k, c)| format!("c_{k}={c}"))
            .collect();
        format!("N={} {{{}}}", self.center, cs.join(", "))
    }
}
