mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use common::{a3, corpus, kronecker, triangle};
use qcluster::decorated_rep::{h1_gamma, h1_gamma_with, DecRep, Splitting};
use qcluster::grassmannian::{gr_count, FqRep};
use qcluster::linalg::{q, QMat};
use qcluster::quiver_qp::{QPData, DEFAULT_DEGREE_CAP};

/// Random representation of the A3 quiver (no relations) with dims <= 2.
fn a3_rep() -> impl Strategy<Value = DecRep> {
    (prop::collection::vec(0usize..=2, 3), prop::collection::vec(-1i64..=2, 8)).prop_map(|(dims, entries)| {
        let qp = a3().qp(DEFAULT_DEGREE_CAP);
        let mut it = entries.into_iter().cycle();
        let mats: BTreeMap<usize, QMat> = qp
            .quiver
            .arrows()
            .map(|(id, a)| {
                let (r, c) = (dims[a.tgt], dims[a.src]);
                let vals = (0..r * c).map(|_| q(it.next().unwrap())).collect();
                (id, QMat::from_rows(r, c, vals))
            })
            .collect();
        DecRep::new(qp, dims, mats, vec![0, 0, 0]).unwrap()
    })
}

fn ranks(d: &DecRep) -> Vec<usize> {
    d.mats.values().map(QMat::rank).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_mutation_keeps_dims(d in a3_rep(), k in 0usize..3) {
        let once = d.mutate(k).unwrap();
        prop_assert!(once.check().is_ok() && once.is_nilpotent());
        let twice = once.mutate(k).unwrap();
        prop_assert!(twice.check().is_ok() && twice.is_nilpotent());
        prop_assert_eq!((twice.dims, twice.vdims), (d.dims, d.vdims));
    }
}

fn splitting_cases() -> Vec<(QPData, Vec<usize>, usize)> {
    let mut out = Vec::new();
    for case in [a3(), kronecker(), triangle()] {
        let qp = case.qp(DEFAULT_DEGREE_CAP);
        for ks in common::sequences(case.n, 4) {
            for j in 0..case.n {
                out.push((qp.clone(), ks.clone(), j));
            }
        }
    }
    out
}

#[test]
fn h1_is_independent_of_splitting() {
    for (qp, ks, j) in splitting_cases() {
        let a = h1_gamma_with(&qp, &ks, j, Splitting::Leftmost).unwrap();
        let b = h1_gamma_with(&qp, &ks, j, Splitting::Reversed).unwrap();
        assert_eq!((&a.dims, &a.vdims), (&b.dims, &b.vdims), "ks={ks:?} j={j}");
        assert_eq!(ranks(&a), ranks(&b), "ks={ks:?} j={j}");
        if a.total_dim() <= 4 {
            for fq in [2, 3] {
                let (fa, fb) = (FqRep::from_decrep(&a, fq).unwrap(), FqRep::from_decrep(&b, fq).unwrap());
                for g0 in 0..=a.dims[0] {
                    for g1 in 0..=a.dims[1] {
                        let mut gamma = vec![g0, g1];
                        gamma.extend(a.dims[2..].iter().map(|_| 0));
                        assert_eq!(gr_count(&fa, &gamma, 1 << 20).unwrap(), gr_count(&fb, &gamma, 1 << 20).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn h1_modules_satisfy_relations() {
    for case in corpus() {
        let qp = case.qp(DEFAULT_DEGREE_CAP);
        for ks in common::sequences(case.n, 4) {
            for j in 0..case.n {
                let d = h1_gamma(&qp, &ks, j).unwrap();
                assert!(d.check().is_ok() && d.is_nilpotent(), "{} ks={ks:?} j={j}", case.name);
            }
        }
    }
}
