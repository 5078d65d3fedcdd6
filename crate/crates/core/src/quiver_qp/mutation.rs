use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{combo_add, Arrow, PathCombo, Potential, QPData, QpError};
use crate::linalg::Q;

/// How the arrows of the premutated quiver relate to the original ones.
/// Reversed arrows keep the id of the arrow they replace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PremutationMap {
    pub k: usize,
    /// Original arrows `a: i -> k`, in id order.
    pub incoming: Vec<(usize, Arrow)>,
    /// Original arrows `b: k -> j`, in id order.
    pub outgoing: Vec<(usize, Arrow)>,
    /// `(a, b) -> id of [b a]: i -> j`.
    pub composites: BTreeMap<(usize, usize), usize>,
}

/// One step of the splitting-theorem reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionStep {
    /// Right-equivalence sending each listed arrow to the given combination
    /// of parallel paths; unlisted arrows are fixed.
    Substitute(BTreeMap<usize, PathCombo>),
    /// Remove a trivial 2-cycle `x y` once it has been split off.
    Delete(usize, usize),
}

#[derive(Clone, Debug)]
pub struct MutationOutcome {
    pub qp: QPData,
    pub premutation: PremutationMap,
    pub steps: Vec<ReductionStep>,
    /// The reduced quiver has no 2-cycles or loops.
    pub well_mutable: bool,
}

/// Image of a path under a substitution, truncated at length `cap`.
pub fn substitute_path(
    path: &[usize],
    subs: &BTreeMap<usize, PathCombo>,
    cap: usize,
) -> PathCombo {
    let mut acc = PathCombo::from([(Vec::new(), Q::one())]);
    for &a in path {
        let img = subs
            .get(&a)
            .cloned()
            .unwrap_or_else(|| PathCombo::from([(vec![a], Q::one())]));
        let mut next = PathCombo::new();
        for (p, c) in &acc {
            for (r, d) in &img {
                if p.len() + r.len() > cap {
                    continue;
                }
                let mut w = p.clone();
                w.extend_from_slice(r);
                combo_add(&mut next, w, c * d);
            }
        }
        acc = next;
    }
    acc
}

pub fn apply_substitution(w: &Potential, subs: &BTreeMap<usize, PathCombo>) -> Potential {
    let mut out = Potential::zero(w.cap);
    for (word, c) in w.terms() {
        for (img, d) in substitute_path(word, subs, w.cap) {
            out.add_word(&img, c * d);
        }
    }
    out
}

/// Reverse the arrows at `k`, add a composite `[b a]` for every length-two
/// path `a` then `b` through `k`, and set `W~ = [W] + Σ b̄ ā [b a]`.
pub fn premutate(qp: &QPData, k: usize) -> Result<(QPData, PremutationMap), QpError> {
    let q0 = &qp.quiver;
    if k >= q0.m {
        return Err(QpError::BadVertex(k));
    }
    let mut incoming = Vec::new();
    let mut outgoing = Vec::new();
    for (id, a) in q0.arrows() {
        if a.src == k && a.tgt == k {
            return Err(QpError::LoopAtVertex(k));
        }
        if a.tgt == k {
            incoming.push((id, a));
        } else if a.src == k {
            outgoing.push((id, a));
        }
    }
    let mut quiver = q0.clone();
    for &(id, a) in &incoming {
        quiver.insert(id, k, a.src)?;
    }
    for &(id, b) in &outgoing {
        quiver.insert(id, b.tgt, k)?;
    }
    let mut composites = BTreeMap::new();
    for &(ia, a) in &incoming {
        for &(ib, b) in &outgoing {
            composites.insert((ia, ib), quiver.push(a.src, b.tgt));
        }
    }

    let cap = qp.potential.cap;
    let mut w = Potential::zero(cap);
    for (word, c) in qp.potential.terms() {
        w.add_word(&bracket_word(word, k, q0, &composites)?, c.clone());
    }
    for (&(ia, ib), &comp) in &composites {
        w.add_word(&[ib, ia, comp], Q::one());
    }
    let map = PremutationMap { k, incoming, outgoing, composites };
    Ok((QPData { quiver, potential: w }, map))
}

/// Replace each consecutive pair `a` (into `k`) then `b` (out of `k`) of a
/// cyclic word by the composite arrow.
fn bracket_word(
    word: &[usize],
    k: usize,
    q: &super::Quiver,
    composites: &BTreeMap<(usize, usize), usize>,
) -> Result<Vec<usize>, QpError> {
    let arrows: Vec<Arrow> = word.iter().map(|&a| q.arrow(a)).collect::<Result<_, _>>()?;
    let Some(start) = (0..word.len()).find(|&i| arrows[i].src != k) else {
        return Err(QpError::LoopAtVertex(k));
    };
    let mut out = Vec::with_capacity(word.len());
    let mut i = 0;
    while i < word.len() {
        let p = (start + i) % word.len();
        if arrows[p].tgt == k {
            let nx = (p + 1) % word.len();
            out.push(composites[&(word[p], word[nx])]);
            i += 2;
        } else {
            out.push(word[p]);
            i += 1;
        }
    }
    Ok(out)
}

fn first_quadratic(w: &Potential) -> Option<(usize, usize, Q)> {
    w.terms()
        .iter()
        .find(|(word, _)| word.len() == 2 && word[0] != word[1])
        .map(|(word, c)| (word[0], word[1], c.clone()))
}

fn identity_image(a: usize) -> PathCombo {
    PathCombo::from([(vec![a], Q::one())])
}

/// Split off the trivial part of a QP by right-equivalences, then delete the
/// resulting 2-cycles. Returns the reduced QP and the steps taken.
pub fn reduce(qp: &QPData) -> Result<(QPData, Vec<ReductionStep>), QpError> {
    let cap = qp.potential.cap;
    let mut quiver = qp.quiver.clone();
    let mut w = qp.potential.clone();
    let mut steps = Vec::new();

    while let Some((x, y, c)) = first_quadratic(&w) {
        // make [x y] the only quadratic term through y
        let mut img = PathCombo::new();
        combo_add(&mut img, vec![x], c.recip());
        for (word, coef) in w.terms() {
            if word.len() == 2 && word.contains(&y) && !word.contains(&x) {
                let other = if word[0] == y { word[1] } else { word[0] };
                combo_add(&mut img, vec![other], -(coef / &c));
            }
        }
        if img != identity_image(x) {
            let subs = BTreeMap::from([(x, img)]);
            w = apply_substitution(&w, &subs);
            steps.push(ReductionStep::Substitute(subs));
        }
        // and the only one through x
        let mut img = identity_image(y);
        for (word, coef) in w.terms() {
            if word.len() == 2 && word.contains(&x) && !word.contains(&y) {
                let other = if word[0] == x { word[1] } else { word[0] };
                combo_add(&mut img, vec![other], -coef.clone());
            }
        }
        if img != identity_image(y) {
            let subs = BTreeMap::from([(y, img)]);
            w = apply_substitution(&w, &subs);
            steps.push(ReductionStep::Substitute(subs));
        }
        // push higher terms through x or y out of reach of the cap
        let mut rounds = 0;
        loop {
            let mut u = PathCombo::new();
            let mut v = PathCombo::new();
            for (word, coef) in w.terms() {
                if word.len() < 3 {
                    continue;
                }
                if let Some(p) = word.iter().position(|&a| a == x) {
                    let mut rest = word[p + 1..].to_vec();
                    rest.extend_from_slice(&word[..p]);
                    combo_add(&mut u, rest, coef.clone());
                } else if let Some(p) = word.iter().position(|&a| a == y) {
                    let mut rest = word[p + 1..].to_vec();
                    rest.extend_from_slice(&word[..p]);
                    combo_add(&mut v, rest, coef.clone());
                }
            }
            if u.is_empty() && v.is_empty() {
                break;
            }
            rounds += 1;
            if rounds > cap + 1 {
                return Err(QpError::DegreeCapExceeded(cap));
            }
            let mut ix = identity_image(x);
            for (p, c) in v {
                combo_add(&mut ix, p, -c);
            }
            let mut iy = identity_image(y);
            for (p, c) in u {
                combo_add(&mut iy, p, -c);
            }
            let subs = BTreeMap::from([(x, ix), (y, iy)]);
            w = apply_substitution(&w, &subs);
            steps.push(ReductionStep::Substitute(subs));
        }
        debug_assert_eq!(w.terms().get(&super::canonical_rotation(&[x, y])), Some(&Q::one()));
        w = w.without(&[x, y]);
        debug_assert!(!w.mentions(x) && !w.mentions(y));
        quiver.remove(x);
        quiver.remove(y);
        steps.push(ReductionStep::Delete(x, y));
    }
    Ok((QPData { quiver, potential: w }, steps))
}

pub fn mutate_qp(qp: &QPData, k: usize) -> Result<MutationOutcome, QpError> {
    let (pre, premutation) = premutate(qp, k)?;
    let (reduced, steps) = reduce(&pre)?;
    let well_mutable = !reduced.quiver.has_two_cycles();
    Ok(MutationOutcome { qp: reduced, premutation, steps, well_mutable })
}

/// True when `W` has no quadratic term, so nothing would be split off.
pub fn is_reduced(w: &Potential) -> bool {
    first_quadratic(w).is_none() && w.terms().values().all(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::quiver_qp::{Quiver, DEFAULT_DEGREE_CAP};

    /// 1 -a-> 2 -b-> 3 -c-> 1 (0-based), W = a b c in traversal order.
    fn triangle() -> QPData {
        let quiver = Quiver::with_arrows(3, [(0, 0, 1), (1, 1, 2), (2, 2, 0)]).unwrap();
        let w = Potential::from_terms(DEFAULT_DEGREE_CAP, [(vec![0, 1, 2], q(1))]);
        QPData::new(quiver, w).unwrap()
    }

    #[test]
    fn triangle_premutation_at_first_vertex() {
        let (pre, map) = premutate(&triangle(), 0).unwrap();
        // c: 3 -> 1 reversed to 1 -> 3, a: 1 -> 2 reversed to 2 -> 1, [a c]: 3 -> 2
        assert_eq!(pre.quiver.arrow(2).unwrap(), Arrow { src: 0, tgt: 2 });
        assert_eq!(pre.quiver.arrow(0).unwrap(), Arrow { src: 1, tgt: 0 });
        assert_eq!(pre.quiver.arrow(1).unwrap(), Arrow { src: 1, tgt: 2 });
        let comp = map.composites[&(2, 0)];
        assert_eq!(pre.quiver.arrow(comp).unwrap(), Arrow { src: 2, tgt: 1 });
        let expected = Potential::from_terms(
            DEFAULT_DEGREE_CAP,
            [(vec![1, comp], q(1)), (vec![0, 2, comp], q(1))],
        );
        assert_eq!(pre.potential, expected);

        let (red, steps) = reduce(&pre).unwrap();
        assert!(red.potential.is_zero());
        assert_eq!(red.quiver.arrow_count(), 2);
        assert_eq!(red.quiver.counts(), vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 0, 0]]);
        assert!(matches!(steps.last(), Some(ReductionStep::Delete(_, _))));
    }

    #[test]
    fn mutation_agrees_with_quiver_mutation_on_triangle() {
        let qp = triangle();
        for k in 0..3 {
            let out = mutate_qp(&qp, k).unwrap();
            assert!(out.well_mutable);
            assert!(out.qp.quiver.same_shape(&qp.quiver.mutate(k).unwrap()));
            let back = mutate_qp(&out.qp, k).unwrap();
            assert!(back.qp.quiver.same_shape(&qp.quiver));
        }
    }

    #[test]
    fn loop_rejected() {
        let q = Quiver::with_arrows(2, [(0, 1, 1)]).unwrap();
        let qp = QPData::without_potential(q, DEFAULT_DEGREE_CAP);
        assert_eq!(premutate(&qp, 1).unwrap_err(), QpError::LoopAtVertex(1));
    }

    #[test]
    fn reduce_splits_mixed_terms() {
        // two vertices, x: 0 -> 1, y: 1 -> 0, z: 0 -> 1; W = 2 x y + z y + x y x y
        let quiver = Quiver::with_arrows(2, [(0, 0, 1), (1, 1, 0), (2, 0, 1)]).unwrap();
        let w = Potential::from_terms(
            8,
            [(vec![0, 1], q(2)), (vec![2, 1], q(1)), (vec![0, 1, 0, 1], q(1))],
        );
        let (red, _) = reduce(&QPData::new(quiver, w).unwrap()).unwrap();
        assert_eq!(red.quiver.arrow_count(), 1);
        assert!(red.potential.is_zero());
    }

    #[test]
    fn substitution_truncates() {
        let subs = BTreeMap::from([(0, PathCombo::from([(vec![0], q(1)), (vec![1, 2], q(1))]))]);
        let img = substitute_path(&[0, 0], &subs, 3);
        assert_eq!(img.len(), 3);
        assert!(img.keys().all(|p| p.len() <= 3));
    }
}
