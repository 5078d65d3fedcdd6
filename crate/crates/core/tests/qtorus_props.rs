mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use common::Laurent;
use qcluster::qtorus::{lefschetz_decompose, string_poly, QLaurent, SkewForm, TorusElement};

fn form3() -> Arc<SkewForm> {
    Arc::new(SkewForm::new(vec![vec![0, 1, -2], vec![-1, 0, 3], vec![2, -3, 0]]).unwrap())
}

fn laurent() -> impl Strategy<Value = QLaurent> {
    prop::collection::vec((-3i64..=3, -2i64..=3), 1..3).prop_map(|t| QLaurent::from_terms(t))
}

fn element(form: Arc<SkewForm>) -> impl Strategy<Value = TorusElement> {
    prop::collection::vec((prop::collection::vec(-2i64..=2, 3), laurent()), 1..=5)
        .prop_map(move |terms| TorusElement::from_terms(&form, terms))
}

fn specialize(x: &TorusElement) -> Laurent {
    Laurent(x.at_v_one().into_iter().filter(|(_, c)| *c != BigInt::from(0)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in element(form3()), b in element(form3()), c in element(form3())) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn monomials_q_commute(e in prop::collection::vec(-3i64..=3, 3), f in prop::collection::vec(-3i64..=3, 3)) {
        let form = form3();
        let (xe, xf) = (TorusElement::x(&form, e.clone()), TorusElement::x(&form, f.clone()));
        let twist = QLaurent::monomial(1, 2 * form.pair(&e, &f));
        prop_assert_eq!(xe.mul(&xf).unwrap(), xf.mul(&xe).unwrap().scale(&twist));
    }

    #[test]
    fn division_round_trip(a in element(form3()), d in element(form3()).prop_filter("nonzero", |d| !d.is_zero())) {
        let prod = a.mul(&d).unwrap();
        prop_assert_eq!(prod.exact_right_divide(&d).unwrap(), a);
    }

    #[test]
    fn specialization_is_a_ring_homomorphism(a in element(form3()), b in element(form3())) {
        prop_assert_eq!(specialize(&a.mul(&b).unwrap()), specialize(&a).mul(&specialize(&b)));
        prop_assert_eq!(specialize(&a.add(&b).unwrap()), specialize(&a).add(&specialize(&b)));
    }

    #[test]
    fn lefschetz_success_reexpands(p in prop::collection::vec((-4i64..=4, 0i64..=3), 1..5)) {
        let p = QLaurent::from_terms(p);
        if let Ok(l) = lefschetz_decompose(&p) {
            prop_assert_eq!(l.expand(), p.clone());
            let form = form3();
            prop_assert!(TorusElement::monomial(&form, vec![0, 0, 0], p).is_positive());
        }
    }

    #[test]
    fn symmetric_unimodal_polynomials_decompose(center in -3i64..=3, mults in prop::collection::vec(0i64..=3, 1..4)) {
        // Σ c_k P(N, 2k) is symmetric about N with v-exponents of one parity
        let mut terms: BTreeMap<i64, i64> = BTreeMap::new();
        for (k, c) in mults.iter().enumerate() {
            for (e, x) in string_poly(center, 2 * k as i64).terms() {
                *terms.entry(*e).or_default() += c * i64::try_from(x).unwrap();
            }
        }
        let p = QLaurent::from_terms(terms);
        if !p.is_zero() {
            prop_assert_eq!(lefschetz_decompose(&p).unwrap().expand(), p);
        }
    }
}
