mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{a3, corpus, sequences, Case};
use qcluster::decorated_rep::h1_lambda;
use qcluster::dt_series::{
    conjugate, conjugate_auto, dt_g_vector, dt_product, framed_extract, lemma52_step, normalized_is_integral,
    sign_sequence, DtProduct, DEFAULT_WINDOW,
};
use qcluster::qtorus::{unit, TorusElement};
use qcluster::quiver_qp::{euler_form, DEFAULT_DEGREE_CAP};
use qcluster::seed::{btilde_apply, mutate_matrix, principal_btilde, principal_lambda, principal_part_acyclic, Matrix};

fn final_btilde(b: &Matrix, ks: &[usize]) -> Matrix {
    ks.iter().fold(b.clone(), |b, &k| mutate_matrix(&b, k))
}

#[test]
fn dt_products_depend_only_on_the_final_seed() {
    for (case, len) in [(principal_a2(), 10), (a3(), 5)] {
        let seed = case.seed();
        let mut by_end: BTreeMap<Matrix, Vec<Vec<usize>>> = BTreeMap::new();
        for ks in sequences(case.n, len) {
            by_end.entry(final_btilde(&case.btilde, &ks)).or_default().push(ks);
        }
        let bound = vec![3; case.n];
        let mut compared = 0;
        for group in by_end.values().filter(|g| g.len() > 1) {
            let expand = |ks: &[usize]| {
                dt_product(&case.btilde, &seed.initial_form, ks).unwrap().expand(&bound, DEFAULT_WINDOW).unwrap()
            };
            let first = expand(&group[0]);
            for ks in &group[1..] {
                assert!(first.agrees_with(&expand(ks)), "{} {:?} vs {ks:?}", case.name, group[0]);
                compared += 1;
            }
        }
        assert!(compared > 0, "{} has no coinciding endpoints", case.name);
    }
}

fn principal_a3() -> Case {
    a3()
}

fn principal_a2() -> Case {
    let b = vec![vec![0, 1], vec![-1, 0]];
    Case {
        name: "principal A2",
        lambda: principal_lambda(&b).entries().to_vec(),
        btilde: principal_btilde(&b),
        n: 2,
        potential: vec![],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugation_agrees_with_single_wall_crossing(k in 0usize..3, g in prop::collection::vec(-2i64..=2, 6)) {
        let case = principal_a3();
        let seed = case.seed();
        let form = seed.initial_form.clone();
        let xexp = btilde_apply(&case.btilde, &unit(3, k));
        let eps = form.pair(&xexp, &g);
        prop_assume!(eps == 1 || eps == -1);
        let y = TorusElement::x(&form, g.clone());
        let step = lemma52_step(&xexp, &y, eps as i8).unwrap();
        let a = DtProduct { form: form.clone(), btilde: case.btilde.clone(), factors: vec![(unit(3, k), -eps as i8)] };
        prop_assert_eq!(conjugate(&a, &g, &[3, 3, 3]).unwrap(), step);
    }
}

/// With framing `λ_i = -Λ(B~e_i, g)` the framed series is finite, its
/// coefficients normalize into `Z[T^{±1}]`, and they coincide with the
/// F-coefficients of the mutation route.
#[test]
fn framed_coefficients_are_integral_and_match_f_polynomials() {
    for case in corpus() {
        let seed = case.seed();
        let form = seed.initial_form.clone();
        let quiver = case.qp(DEFAULT_DEGREE_CAP).quiver;
        for ks in sequences(case.n, 4) {
            let sig = sign_sequence(&case.btilde, &ks).unwrap();
            let a = dt_product(&case.btilde, &form, &ks).unwrap();
            for j in 0..case.n {
                let unit_lam = unit(case.m(), j);
                let g = dt_g_vector(&case.btilde, &ks, &sig.signs, &unit_lam);
                let lam: Vec<i64> =
                    (0..case.n).map(|i| -form.pair(&btilde_apply(&case.btilde, &unit(case.n, i)), &g)).collect();
                let f = framed_extract(&a, &lam, &vec![8; case.n]).unwrap();
                for (gamma, c) in &f {
                    let chi = euler_form(&quiver, gamma, gamma);
                    assert!(normalized_is_integral(c, chi), "{} ks={ks:?} j={j} gamma={gamma:?}", case.name);
                }
                assert_eq!(f, seed.cluster_monomial(&ks, &unit_lam).unwrap().f_coefficients, "{} ks={ks:?}", case.name);
            }
        }
    }
}

/// Every `γ` in the conjugation output lies below the dimension vector of
/// the matching `H^1` module.
#[test]
fn conjugation_support_is_bounded_by_h1_dims() {
    for case in corpus() {
        let seed = case.seed();
        let qp = case.qp(DEFAULT_DEGREE_CAP);
        for ks in sequences(case.n, 4) {
            let acyclic = principal_part_acyclic(&case.btilde, case.n)
                || principal_part_acyclic(&final_btilde(&case.btilde, &ks), case.n);
            if !acyclic {
                continue;
            }
            let sig = sign_sequence(&case.btilde, &ks).unwrap();
            let a = dt_product(&case.btilde, &seed.initial_form, &ks).unwrap();
            for j in 0..case.n {
                let lam = unit(case.m(), j);
                let dims: Vec<i64> = h1_lambda(&qp, &ks, &lam).unwrap().dims.iter().map(|&d| d as i64).collect();
                let g = dt_g_vector(&case.btilde, &ks, &sig.signs, &lam);
                let (el, _) = conjugate_auto(&a, &g, &vec![2; case.n], 6).unwrap();
                let f = seed.f_polynomial(&el, &g).unwrap();
                for gamma in f.keys() {
                    assert!(gamma.iter().zip(&dims).all(|(x, d)| x <= d), "{} ks={ks:?} j={j}", case.name);
                }
                // bound dims + 1 leaves the required margin
                let tight: Vec<i64> = dims.iter().map(|d| d + 1).collect();
                assert_eq!(conjugate(&a, &g, &tight).unwrap(), el);
            }
        }
    }
}
