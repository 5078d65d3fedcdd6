mod common;

use proptest::prelude::*;

use common::{corpus, Case};
use qcluster::seed::{check_compatible, principal_part_acyclic};

fn case_and_sequence() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0..corpus().len()).prop_flat_map(|i| {
        let n = corpus()[i].n;
        (Just(i), prop::collection::vec(0..n, 0..7))
    })
    .prop_map(|(i, raw)| {
        let mut ks: Vec<usize> = Vec::new();
        for k in raw {
            if ks.last() != Some(&k) {
                ks.push(k);
            }
        }
        (i, ks)
    })
}

fn pick(i: usize) -> Case {
    corpus().swap_remove(i)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn compatibility_and_commutation_survive_mutation((i, ks) in case_and_sequence()) {
        let s = pick(i).seed().mutate_sequence(&ks).unwrap();
        prop_assert!(check_compatible(&s.lambda, &s.btilde).is_ok());
        prop_assert!(s.commutation_holds().unwrap());
    }

    #[test]
    fn f_polynomial_round_trip((i, ks) in case_and_sequence(), j in 0usize..3) {
        let case = pick(i);
        let seed = case.seed();
        let mut lam = vec![0; case.m()];
        lam[j % case.n] = 1;
        lam[(j + 1) % case.n] += 1;
        let r = seed.cluster_monomial(&ks, &lam).unwrap();
        prop_assert_eq!(seed.from_f_polynomial(&r.g_vector, &r.f_coefficients).unwrap(), r.element);
    }

    #[test]
    fn acyclic_seeds_give_positive_lefschetz_monomials((i, ks) in case_and_sequence(), j in 0usize..3) {
        let case = pick(i);
        prop_assume!(principal_part_acyclic(&case.btilde, case.n));
        let mut lam = vec![0; case.m()];
        lam[j % case.n] = 2;
        let r = case.seed().cluster_monomial(&ks, &lam).unwrap();
        prop_assert!(r.element.is_positive());
        for (_, c) in r.element.terms() {
            prop_assert!(qcluster::qtorus::lefschetz_decompose(c).is_ok());
        }
    }
}

#[test]
fn mutation_is_an_involution_on_seeds() {
    for case in corpus() {
        let seed = case.seed();
        for k in 0..case.n {
            let back = seed.mutate(k).unwrap().mutate(k).unwrap();
            assert_eq!((back.lambda, back.btilde, back.vars), (seed.lambda.clone(), seed.btilde.clone(), seed.vars.clone()));
        }
    }
}
