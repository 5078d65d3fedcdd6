//! The JSON session document and its validation.
//!
//! Vertices, arrow ids and mutation indices are 1-based in the document and
//! converted to the library's 0-based indices here.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;

use qcluster::qtorus::SkewForm;
use qcluster::quiver_qp::{Potential, QPData, Quiver, DEFAULT_DEGREE_CAP};
use qcluster::seed::{Matrix, QuantumSeed};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSpec {
    pub lambda: Matrix,
    pub btilde: Matrix,
    pub n: usize,
    #[serde(default)]
    pub quiver: Option<QuiverSpec>,
    /// `[numerator, denominator, [arrow ids]]` per term.
    #[serde(default)]
    pub potential: Vec<(i64, i64, Vec<usize>)>,
    #[serde(default)]
    pub ks: Vec<usize>,
    #[serde(default)]
    pub lam: Option<Vec<i64>>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: usize,
    /// `[id, source, target]`.
    pub arrows: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub degree_cap: Option<usize>,
    pub cone_bound: Option<Vec<i64>>,
    pub primes: Option<Vec<u32>>,
    pub route: Option<String>,
    pub budget: Option<u64>,
}

/// A validated session with 0-based indices.
#[derive(Debug, Clone)]
pub struct Session {
    pub seed: QuantumSeed,
    pub qp: QPData,
    pub has_potential: bool,
    pub ks: Vec<usize>,
    pub lam: Vec<i64>,
    pub options: Options,
}

impl SessionSpec {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed session: {e}"))
    }

    pub fn validate(&self, degree_cap: Option<usize>) -> Result<Session, String> {
        let m = self.lambda.len();
        if self.lambda.iter().any(|r| r.len() != m) {
            return Err("lambda must be square".into());
        }
        if self.btilde.len() != m {
            return Err(format!("btilde has {} rows, lambda has {m}", self.btilde.len()));
        }
        if self.btilde.iter().any(|r| r.len() != self.n) || self.n > m || self.n == 0 {
            return Err(format!("btilde must be {m} x n with 1 <= n = {} <= {m}", self.n));
        }
        let lambda = SkewForm::new(self.lambda.clone()).map_err(|e| format!("lambda: {e}"))?;
        let seed = QuantumSeed::initial(lambda, self.btilde.clone()).map_err(|e| format!("seed: {e}"))?;
        let ks = self
            .ks
            .iter()
            .map(|&k| {
                if (1..=self.n).contains(&k) {
                    Ok(k - 1)
                } else {
                    Err(format!("ks entry {k} outside 1..={}", self.n))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if ks.windows(2).any(|w| w[0] == w[1]) {
            return Err("ks repeats a vertex consecutively".into());
        }
        let lam = match &self.lam {
            Some(l) if l.len() != m => return Err(format!("lam has length {}, expected {m}", l.len())),
            Some(l) if l.iter().any(|&x| x < 0) => return Err("lam must be nonnegative".into()),
            Some(l) => l.clone(),
            None => vec![0; m],
        };
        let cap = degree_cap.or(self.options.degree_cap).unwrap_or(DEFAULT_DEGREE_CAP);
        let principal: Matrix = self.btilde[..self.n].to_vec();
        let quiver = match &self.quiver {
            None => Quiver::from_btilde(&principal, None).map_err(|e| format!("quiver: {e}"))?,
            Some(q) => {
                if q.vertices != self.n {
                    return Err(format!("quiver has {} vertices, expected n = {}", q.vertices, self.n));
                }
                let mut arrows = Vec::new();
                for &(id, s, t) in &q.arrows {
                    if id == 0 || !(1..=q.vertices).contains(&s) || !(1..=q.vertices).contains(&t) {
                        return Err(format!("arrow [{id},{s},{t}] has an index outside range"));
                    }
                    arrows.push((id - 1, s - 1, t - 1));
                }
                let quiver = Quiver::with_arrows(q.vertices, arrows).map_err(|e| format!("quiver: {e}"))?;
                if quiver.to_btilde(self.n) != principal {
                    return Err("quiver arrows do not match the principal part of btilde".into());
                }
                quiver
            }
        };
        let mut terms = Vec::new();
        for (num, den, ids) in &self.potential {
            if *den == 0 {
                return Err("potential coefficient with zero denominator".into());
            }
            if ids.contains(&0) {
                return Err("potential arrow ids are 1-based".into());
            }
            let c = BigRational::new(BigInt::from(*num), BigInt::from(*den));
            terms.push((ids.iter().map(|i| i - 1).collect(), c));
        }
        let has_potential = !terms.is_empty();
        let qp = QPData::new(quiver, Potential::from_terms(cap, terms)).map_err(|e| format!("potential: {e}"))?;
        Ok(Session { seed, qp, has_potential, ks, lam, options: self.options.clone() })
    }
}
