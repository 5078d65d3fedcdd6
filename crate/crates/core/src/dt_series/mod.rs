//! Sign sequences, quantum dilogarithm (q-Pochhammer) products, and the
//! conjugation formula producing cluster monomials from DT series.
//!
//! Throughout `T = q = v^2`, and `E(x) = (-v x; v^2)_∞ = Π_{n≥0} (1 + v^{2n+1} x)`.

mod series;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::qtorus::{unit, vec_add, QLaurent, SkewForm, TorusElement};
use crate::seed::{btilde_apply, mutate_matrix, Matrix};

pub use series::{factorization_check, inverse_t_factorial, ConeSeries, Series};

/// Relative precision of Pochhammer coefficients, in powers of `T`.
pub const DEFAULT_WINDOW: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DtError {
    #[error("c-vector at step {step} has mixed signs: {column:?}")]
    SignAmbiguous { step: usize, column: Vec<i64> },
    #[error("bound {0:?} admits no nonzero multiple of the class")]
    BoundTooSmall(Vec<i64>),
    #[error("conjugation tail does not vanish within bound {bound:?}; try {suggested:?}")]
    TailNotVanishing { bound: Vec<i64>, suggested: Vec<i64> },
    #[error("monomial {0:?} does not q-commute with the required exponent")]
    CommutationMismatch(Vec<i64>),
    #[error("bad mutation sequence: {0}")]
    BadSequence(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSeqResult {
    /// `+1` or `-1` per step.
    pub signs: Vec<i8>,
    pub s_classes: Vec<Vec<i64>>,
    /// The C-matrix before each step, followed by the final one.
    pub c_matrix_trace: Vec<Matrix>,
}

fn check_sequence(n: usize, ks: &[usize]) -> Result<(), DtError> {
    if let Some(k) = ks.iter().find(|&&k| k >= n) {
        return Err(DtError::BadSequence(format!("vertex {} out of range", k + 1)));
    }
    if ks.windows(2).any(|w| w[0] == w[1]) {
        return Err(DtError::BadSequence("repeated consecutive vertex".into()));
    }
    Ok(())
}

/// Track the C-matrix of principal coefficients along `ks`; the sign of the
/// `k_i`-th column before step `i` is `ε_i`, its absolute value is `S(i)`.
pub fn sign_sequence(btilde: &Matrix, ks: &[usize]) -> Result<SignSeqResult, DtError> {
    let n = btilde.first().map_or(0, Vec::len);
    check_sequence(n, ks)?;
    // [B; C] with C = I
    let mut ext: Matrix = btilde[..n].to_vec();
    ext.extend((0..n).map(|i| unit(n, i)));
    let c_of = |ext: &Matrix| ext[n..].to_vec();
    let mut res = SignSeqResult { signs: vec![], s_classes: vec![], c_matrix_trace: vec![] };
    for (step, &k) in ks.iter().enumerate() {
        let c = c_of(&ext);
        let column: Vec<i64> = c.iter().map(|row| row[k]).collect();
        let sign = if column.iter().all(|&x| x >= 0) {
            1
        } else if column.iter().all(|&x| x <= 0) {
            -1
        } else {
            return Err(DtError::SignAmbiguous { step, column });
        };
        res.signs.push(sign);
        res.s_classes.push(column.iter().map(|x| x.abs()).collect());
        res.c_matrix_trace.push(c);
        ext = mutate_matrix(&ext, k);
    }
    res.c_matrix_trace.push(c_of(&ext));
    Ok(res)
}

/// Columns `g_j` of the extended g-vector matrix after `ks`, by
/// `g'_k = -g_k + Σ_i [-ε b_ik]_+ g_i` with `b` the current `B~`.
pub fn dt_g_vectors(btilde: &Matrix, ks: &[usize], signs: &[i8]) -> Vec<Vec<i64>> {
    let m = btilde.len();
    let mut g: Vec<Vec<i64>> = (0..m).map(|j| unit(m, j)).collect();
    let mut b = btilde.clone();
    for (&k, &eps) in ks.iter().zip(signs) {
        let mut new = g[k].iter().map(|x| -x).collect::<Vec<_>>();
        for i in 0..m {
            let t = (-i64::from(eps) * b[i][k]).max(0);
            if t > 0 {
                new = vec_add(&new, &g[i].iter().map(|x| t * x).collect::<Vec<_>>());
            }
        }
        g[k] = new;
        b = mutate_matrix(&b, k);
    }
    g
}

/// `Σ_j λ_j g_j`.
pub fn dt_g_vector(btilde: &Matrix, ks: &[usize], signs: &[i8], lam: &[i64]) -> Vec<i64> {
    let g = dt_g_vectors(btilde, ks, signs);
    let mut out = vec![0; btilde.len()];
    for (j, &l) in lam.iter().enumerate() {
        out = vec_add(&out, &g[j].iter().map(|x| l * x).collect::<Vec<_>>());
    }
    out
}

/// The ordered product `Π_i E(X^{B~ s_i})^{ε_i}`, kept factored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DtProduct {
    pub form: Arc<SkewForm>,
    pub btilde: Matrix,
    pub factors: Vec<(Vec<i64>, i8)>,
}

pub fn dt_product(btilde: &Matrix, form: &Arc<SkewForm>, ks: &[usize]) -> Result<DtProduct, DtError> {
    let sig = sign_sequence(btilde, ks)?;
    Ok(DtProduct {
        form: form.clone(),
        btilde: btilde.clone(),
        factors: sig.s_classes.into_iter().zip(sig.signs).collect(),
    })
}

impl DtProduct {
    pub fn identity(form: &Arc<SkewForm>, btilde: &Matrix) -> Self {
        Self { form: form.clone(), btilde: btilde.clone(), factors: vec![] }
    }

    /// Multiply out as a truncated series.
    pub fn expand(&self, bound: &[i64], window: usize) -> Result<ConeSeries, DtError> {
        let one = ConeSeries::one(&self.form, &self.btilde, bound);
        self.factors.iter().try_fold(one.clone(), |acc, (cls, sign)| {
            Ok(acc.mul(&pochhammer(&one, cls, *sign, window)?))
        })
    }
}

/// `(-T^{1/2} ŵ_cls; T)_∞^{±1}` as a cone series with base 0:
/// the `+` coefficient of `ŵ_{n cls}` is `T^{n²/2} / ((1-T)...(1-T^n))`, the
/// `-` one is `(-1)^n T^{n/2} / ((1-T)...(1-T^n))`, each known to `window`
/// powers of `T` beyond its leading term.
pub fn pochhammer(
    template: &ConeSeries,
    cls: &[i64],
    sign: i8,
    window: usize,
) -> Result<ConeSeries, DtError> {
    assert!(cls.iter().any(|&c| c != 0), "class must be nonzero");
    let mut out = ConeSeries::one(&template.form, &template.btilde, &template.bound);
    if !out.within(cls) || window == 0 {
        return Err(DtError::BoundTooSmall(template.bound.clone()));
    }
    let mut n: i64 = 1;
    loop {
        let gamma: Vec<i64> = cls.iter().map(|c| n * c).collect();
        if !out.within(&gamma) {
            break;
        }
        let inv = inverse_t_factorial(n as u32, window);
        let (lead, neg) = if sign > 0 { (n * n, false) } else { (n, n % 2 == 1) };
        let terms = inv.into_iter().enumerate().map(|(d, c)| {
            let c = if neg { -c } else { c };
            (lead + 2 * d as i64, c)
        });
        out.insert(gamma, Series::truncated(terms, lead + 2 * window as i64));
        n += 1;
    }
    Ok(out)
}

/// Finite element `Σ_γ c_γ X^{base + B~γ}` with exact coefficients.
#[derive(Clone, Debug)]
struct ConeElement {
    base: Vec<i64>,
    coeffs: BTreeMap<Vec<i64>, QLaurent>,
}

/// Coefficients of `R(x) = (E(q^d x) / E(x))^ε` up to `x^jmax`.
/// For `d > 0` the ratio is `1 / Π_{n=0}^{d-1} (1 + v^{2n+1} x)`, for `d < 0`
/// it is `Π_{n=d}^{-1} (1 + v^{2n+1} x)`.
fn ratio_series(d: i64, eps: i8, jmax: usize) -> Vec<QLaurent> {
    let mut out = vec![QLaurent::zero(); jmax + 1];
    out[0] = QLaurent::one();
    if d == 0 {
        return out;
    }
    let roots: Vec<i64> = if d > 0 { (0..d).map(|n| 2 * n + 1).collect() } else { (d..0).map(|n| 2 * n + 1).collect() };
    let polynomial = (d < 0) == (eps > 0);
    for r in roots {
        if polynomial {
            // multiply by (1 + v^r x)
            for j in (1..=jmax).rev() {
                let add = out[j - 1].shift(r);
                out[j] = &out[j] + &add;
            }
        } else {
            // multiply by Σ_j (-v^r x)^j
            for j in 1..=jmax {
                let sub = out[j - 1].shift(r);
                out[j] = &out[j] - &sub;
            }
        }
    }
    out
}

/// Conjugate a finite element by `E(X^{B~ s})^ε`: each monomial `X^u`
/// becomes `X^u R(X^{B~ s})` with `d = Λ(B~ s, u)`, keeping `γ ≤ bound`.
fn conjugate_factor(
    form: &SkewForm,
    btilde: &Matrix,
    y: &ConeElement,
    cls: &[i64],
    eps: i8,
    bound: &[i64],
) -> ConeElement {
    let w = btilde_apply(btilde, cls);
    let mut out = ConeElement { base: y.base.clone(), coeffs: BTreeMap::new() };
    for (gamma, c) in &y.coeffs {
        let u = vec_add(&y.base, &btilde_apply(btilde, gamma));
        let d = form.pair(&w, &u);
        let room = (0..cls.len())
            .filter(|&i| cls[i] > 0)
            .map(|i| (bound[i] - gamma[i]) / cls[i])
            .min()
            .unwrap_or(0)
            .max(0) as usize;
        for (j, r) in ratio_series(d, eps, room).into_iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            let jw: Vec<i64> = w.iter().map(|x| j as i64 * x).collect();
            let twist = form.pair(&u, &jw);
            let g: Vec<i64> = gamma.iter().zip(cls).map(|(a, b)| a + j as i64 * b).collect();
            let term = &(c * &r).shift(twist);
            let slot = out.coeffs.entry(g.clone()).or_insert_with(QLaurent::zero);
            *slot = &*slot + term;
            if slot.is_zero() {
                out.coeffs.remove(&g);
            }
        }
    }
    out
}

fn conjugate_raw(
    form: &SkewForm,
    btilde: &Matrix,
    factors: &[(Vec<i64>, i8)],
    base: &[i64],
    bound: &[i64],
) -> Result<ConeElement, DtError> {
    let n = bound.len();
    let mut y = ConeElement {
        base: base.to_vec(),
        coeffs: BTreeMap::from([(vec![0; n], QLaurent::one())]),
    };
    for (cls, eps) in factors.iter().rev() {
        y = conjugate_factor(form, btilde, &y, cls, *eps, bound);
    }
    // terms must stay at least one step inside the bound
    if y.coeffs.keys().any(|g| g.iter().zip(bound).any(|(a, b)| *a >= *b)) {
        return Err(DtError::TailNotVanishing {
            bound: bound.to_vec(),
            suggested: bound.iter().map(|b| 2 * b + 1).collect(),
        });
    }
    Ok(y)
}

/// `A X^g A^{-1}` for the factored product `A`, exact for `γ ≤ bound`.
pub fn conjugate(a: &DtProduct, g: &[i64], bound: &[i64]) -> Result<TorusElement, DtError> {
    if g.len() != a.form.dim() {
        return Err(DtError::Shape("g-vector length".into()));
    }
    let y = conjugate_raw(&a.form, &a.btilde, &a.factors, g, bound)?;
    let form = a.form.clone();
    Ok(TorusElement::from_terms(
        &form,
        y.coeffs.into_iter().map(|(gamma, c)| (vec_add(g, &btilde_apply(&a.btilde, &gamma)), c)),
    ))
}

/// `conjugate`, doubling the bound on TailNotVanishing up to `max_rounds`.
pub fn conjugate_auto(
    a: &DtProduct,
    g: &[i64],
    start: &[i64],
    max_rounds: usize,
) -> Result<(TorusElement, Vec<i64>), DtError> {
    let mut bound = start.to_vec();
    for round in 0.. {
        match conjugate(a, g, &bound) {
            Ok(t) => return Ok((t, bound)),
            Err(DtError::TailNotVanishing { suggested, .. }) if round < max_rounds => bound = suggested,
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

/// `E(x)^{-ε} y E(x)^{ε} = y (1 + v^ε x)` for `x = X^{xexp}` when every
/// monomial `X^u` of `y` has `Λ(xexp, u) = ε`.
pub fn lemma52_step(xexp: &[i64], y: &TorusElement, eps: i8) -> Result<TorusElement, DtError> {
    let form = y.form().clone();
    for (u, _) in y.terms() {
        if form.pair(xexp, u) != i64::from(eps) {
            return Err(DtError::CommutationMismatch(u.to_vec()));
        }
    }
    let x = TorusElement::monomial(&form, xexp.to_vec(), QLaurent::monomial(1, i64::from(eps)));
    let one = TorusElement::one(&form);
    let factor = one.add(&x).map_err(|e| DtError::Shape(e.to_string()))?;
    y.mul(&factor).map_err(|e| DtError::Shape(e.to_string()))
}

/// Framed series `A^{sfr}` with `A X^f A^{-1} = X^f A^{sfr}` in the lattice
/// `Z^n × Z` whose form is `γ^t B γ'` on classes and
/// `Λ((γ,0), f) = -λ·γ` against the framing vector `f`.
/// Returns the coefficient of `X^{(γ,0)}` in `A^{sfr}` for each `γ`.
pub fn framed_extract(
    a: &DtProduct,
    lam: &[i64],
    bound: &[i64],
) -> Result<BTreeMap<Vec<i64>, QLaurent>, DtError> {
    let n = bound.len();
    let b = &a.btilde;
    let mut ext = vec![vec![0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            ext[i][j] = b[i][j];
        }
        let l = lam.get(i).copied().unwrap_or(0);
        ext[i][n] = -l;
        ext[n][i] = l;
    }
    let form = SkewForm::new(ext).map_err(|e| DtError::Shape(e.to_string()))?;
    let inclusion: Matrix = (0..=n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let f = unit(n + 1, n);
    let y = conjugate_raw(&form, &inclusion, &a.factors, &f, bound)?;
    Ok(y.coeffs
        .into_iter()
        .map(|(gamma, c)| {
            let mut e = gamma.clone();
            e.push(0);
            let shift = form.pair(&f, &e);
            (gamma, c.shift(-shift))
        })
        .collect())
}

/// `T^{χ(γ,γ)/2} · c` has only even `v`-exponents and integer coefficients.
pub fn normalized_is_integral(c: &QLaurent, chi_gg: i64) -> bool {
    c.shift(chi_gg).terms().keys().all(|k| k % 2 == 0)
}

/// `Σ_γ c_γ X^{g} X^{B~γ}` assembled from coefficients.
pub fn from_coefficients(
    form: &Arc<SkewForm>,
    btilde: &Matrix,
    g: &[i64],
    coeffs: &BTreeMap<Vec<i64>, QLaurent>,
) -> TorusElement {
    let mut t = TorusElement::zero(form);
    for (gamma, c) in coeffs {
        let e = btilde_apply(btilde, gamma);
        let twist = form.pair(g, &e);
        t.add_term(vec_add(g, &e), c.shift(twist));
    }
    t
}

/// Coefficient of `T^k` in `1/((1-T)(1-T^2))`, by an independent count of
/// the solutions of `a + 2b = k`.
pub fn two_part_partitions(k: usize) -> BigInt {
    BigInt::from((0..=k / 2).filter(|b| k >= 2 * b).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{principal_btilde, principal_lambda, QuantumSeed};

    fn a2() -> (Arc<SkewForm>, Matrix) {
        (
            Arc::new(SkewForm::new(vec![vec![0, 1], vec![-1, 0]]).unwrap()),
            vec![vec![0, 1], vec![-1, 0]],
        )
    }

    #[test]
    fn sign_sequence_basics() {
        let (_, b) = a2();
        let r = sign_sequence(&b, &[1]).unwrap();
        assert_eq!(r.signs, vec![1]);
        assert_eq!(r.s_classes, vec![vec![0, 1]]);
        assert!(sign_sequence(&b, &[]).unwrap().signs.is_empty());
        let r = sign_sequence(&b, &[0, 1, 0]).unwrap();
        assert_eq!(r.signs[0], 1);
        assert_eq!(r.c_matrix_trace.len(), 4);
        assert!(sign_sequence(&b, &[0, 0]).is_err());
    }

    #[test]
    fn a2_single_conjugation() {
        let (form, b) = a2();
        let a = dt_product(&b, &form, &[0]).unwrap();
        let sig = sign_sequence(&b, &[0]).unwrap();
        let g = dt_g_vector(&b, &[0], &sig.signs, &[1, 0]);
        assert_eq!(g, vec![-1, 1]);
        let t = conjugate(&a, &g, &[3, 3]).unwrap();
        assert_eq!(t.render(), "X[-1,0] + X[-1,1]");
        let seed = QuantumSeed::initial((*form).clone(), b.clone()).unwrap();
        assert_eq!(seed.mutate(0).unwrap().vars[0], t);
        let id = DtProduct::identity(&form, &b);
        assert_eq!(conjugate(&id, &[2, -1], &[1, 1]).unwrap(), TorusElement::x(&form, vec![2, -1]));
    }

    #[test]
    fn tail_detection() {
        let (form, b) = a2();
        let a = dt_product(&b, &form, &[0]).unwrap();
        let err = conjugate(&a, &[-1, 1], &[0, 0]).unwrap_err();
        assert!(matches!(err, DtError::TailNotVanishing { .. }));
        let (t, bound) = conjugate_auto(&a, &[-1, 1], &[0, 0], 4).unwrap();
        assert_eq!(t.len(), 2);
        assert!(bound[0] >= 2);
    }

    #[test]
    fn lemma52_matches_conjugation() {
        let (form, _) = a2();
        // x = X^{e1}, y = X^{e2}: Λ(e1, e2) = 1
        let y = TorusElement::x(&form, vec![0, 1]);
        let r = lemma52_step(&[1, 0], &y, 1).unwrap();
        let expect = y.add(&y.mul(&TorusElement::monomial(&form, vec![1, 0], QLaurent::monomial(1, 1))).unwrap()).unwrap();
        assert_eq!(r, expect);
        let ym = TorusElement::x(&form, vec![0, -1]);
        assert!(lemma52_step(&[1, 0], &ym, -1).is_ok());
        assert!(matches!(
            lemma52_step(&[1, 0], &TorusElement::x(&form, vec![1, 0]), 1),
            Err(DtError::CommutationMismatch(_))
        ));
        // conjugation by E(x)^{-1} = the lemma with ε = 1, for x = X^{B~ s}
        let b = vec![vec![0, 1], vec![-1, 0]];
        let a = DtProduct { form: form.clone(), btilde: b.clone(), factors: vec![(vec![0, 1], -1)] };
        let xexp = btilde_apply(&b, &[0, 1]);
        let y = TorusElement::x(&form, vec![0, 1]);
        assert_eq!(form.pair(&xexp, &[0, 1]), 1);
        assert_eq!(conjugate(&a, &[0, 1], &[4, 4]).unwrap(), lemma52_step(&xexp, &y, 1).unwrap());
    }

    #[test]
    fn pochhammer_coefficients() {
        let (form, b) = a2();
        let one = ConeSeries::one(&form, &b, &[0, 12]);
        let plus = pochhammer(&one, &[0, 1], 1, 12).unwrap();
        let c2 = plus.coeff(&[0, 2]).unwrap();
        for k in 0..12 {
            assert_eq!(c2.coeff(4 + 2 * k as i64), two_part_partitions(k));
        }
        let minus = pochhammer(&one, &[0, 1], -1, 12).unwrap();
        assert!(factorization_check(&one, &[plus, minus]));
        assert!(pochhammer(&ConeSeries::one(&form, &b, &[0, 0]), &[0, 1], 1, 12).is_err());
    }

    #[test]
    fn pentagon() {
        let (form, b) = a2();
        let one = ConeSeries::one(&form, &b, &[12, 12]);
        let e = |c: &[i64]| pochhammer(&one, c, 1, DEFAULT_WINDOW).unwrap();
        // x1 x2 = T x2 x1 for x_i = X^{B~ e_i}
        let lhs = e(&[0, 1]).mul(&e(&[1, 0]));
        assert!(factorization_check(&lhs, &[e(&[1, 0]), e(&[1, 1]), e(&[0, 1])]));
        let swapped = e(&[1, 0]).mul(&e(&[0, 1]));
        assert!(!factorization_check(&swapped, &[e(&[0, 1]), e(&[1, 1]), e(&[1, 0])]));
        assert!(!factorization_check(&lhs, &[e(&[1, 0]), e(&[0, 1])]));
    }

    #[test]
    fn framed_matches_f_polynomial_on_a2() {
        let (form, b) = a2();
        let a = dt_product(&b, &form, &[0]).unwrap();
        let f = framed_extract(&a, &[1, 0], &[3, 3]).unwrap();
        let expect = BTreeMap::from([
            (vec![0, 0], QLaurent::one()),
            (vec![1, 0], QLaurent::monomial(1, -1)),
        ]);
        assert_eq!(f, expect);
        assert!(normalized_is_integral(&f[&vec![1, 0]], 1));
        let trivial = framed_extract(&DtProduct::identity(&form, &b), &[1, 0], &[2, 2]).unwrap();
        assert_eq!(trivial, BTreeMap::from([(vec![0, 0], QLaurent::one())]));
    }

    #[test]
    fn principal_a2_two_routes() {
        let bmat = vec![vec![0, 1], vec![-1, 0]];
        let lam = principal_lambda(&bmat);
        let bt = principal_btilde(&bmat);
        let form = Arc::new(lam.clone());
        let seed = QuantumSeed::initial(lam, bt.clone()).unwrap();
        for ks in [vec![0], vec![1], vec![0, 1], vec![1, 0], vec![0, 1, 0]] {
            let sig = sign_sequence(&bt, &ks).unwrap();
            let a = dt_product(&bt, &form, &ks).unwrap();
            let s = seed.mutate_sequence(&ks).unwrap();
            for j in 0..2 {
                let g = dt_g_vector(&bt, &ks, &sig.signs, &unit(4, j));
                let (t, _) = conjugate_auto(&a, &g, &[2, 2], 4).unwrap();
                assert_eq!(t, s.vars[j], "ks={ks:?} j={j}");
            }
        }
    }
}
