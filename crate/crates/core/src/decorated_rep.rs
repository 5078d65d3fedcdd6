//! Decorated representations of quivers with potential and their mutation.
//!
//! The matrix of an arrow `a: i -> j` has shape `dims[j] x dims[i]`, and a
//! path `p1 p2 ... pL` (traversal order) acts by `M(pL) ... M(p1)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{QMat, Q};
use crate::quiver_qp::{
    mutate_qp, premutate, PathCombo, QPData, QpError, ReductionStep,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("Jacobi relation violated: {0}")]
    RelationViolation(String),
    #[error("representation is not nilpotent")]
    NotNilpotent,
    #[error("QP is not well mutable at vertex {0}")]
    NotWellMutable(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Qp(#[from] QpError),
}

/// How kernel, complement and retraction bases are picked during mutation.
/// Both give equivalent results; the second exists to test that claim.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Splitting {
    #[default]
    Leftmost,
    Reversed,
}

impl Splitting {
    fn kernel(self, a: &QMat) -> QMat {
        match self {
            Splitting::Leftmost => a.kernel(),
            Splitting::Reversed => {
                let p = QMat::reversal(a.cols());
                &p * &(a * &p).kernel()
            }
        }
    }

    fn image(self, a: &QMat) -> QMat {
        match self {
            Splitting::Leftmost => a.image(),
            Splitting::Reversed => {
                let p = QMat::reversal(a.cols());
                (a * &p).image()
            }
        }
    }

    fn complement(self, a: &QMat) -> QMat {
        match self {
            Splitting::Leftmost => a.complement(),
            Splitting::Reversed => {
                let p = QMat::reversal(a.rows());
                &p * &(&p * a).complement()
            }
        }
    }

    fn left_inverse(self, a: &QMat) -> QMat {
        match self {
            Splitting::Leftmost => a.left_inverse(),
            Splitting::Reversed => {
                let p = QMat::reversal(a.rows());
                &(&p * a).left_inverse() * &p
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecRep {
    pub qp: QPData,
    pub dims: Vec<usize>,
    pub mats: BTreeMap<usize, QMat>,
    pub vdims: Vec<usize>,
}

impl DecRep {
    /// Build and validate a decorated representation. Arrows missing from
    /// `mats` act by zero.
    pub fn new(
        qp: QPData,
        dims: Vec<usize>,
        mut mats: BTreeMap<usize, QMat>,
        vdims: Vec<usize>,
    ) -> Result<Self, RepError> {
        let m = qp.quiver.m;
        if dims.len() != m || vdims.len() != m {
            return Err(RepError::Shape(format!("expected {m} vertices")));
        }
        for (id, a) in qp.quiver.arrows() {
            let mat = mats.entry(id).or_insert_with(|| QMat::zeros(dims[a.tgt], dims[a.src]));
            if (mat.rows(), mat.cols()) != (dims[a.tgt], dims[a.src]) {
                return Err(RepError::Shape(format!("arrow {id}")));
            }
        }
        if let Some(id) = mats.keys().find(|id| qp.quiver.arrow(**id).is_err()) {
            return Err(RepError::Shape(format!("unknown arrow {id}")));
        }
        let d = Self { qp, dims, mats, vdims };
        d.check()?;
        Ok(d)
    }

    pub fn zero(qp: QPData) -> Self {
        let m = qp.quiver.m;
        let mats = qp.quiver.arrows().map(|(id, _)| (id, QMat::zeros(0, 0))).collect();
        Self { qp, dims: vec![0; m], mats, vdims: vec![0; m] }
    }

    /// `(0, e_j)`.
    pub fn negative_simple(qp: QPData, j: usize) -> Self {
        let mut d = Self::zero(qp);
        d.vdims[j] = 1;
        d
    }

    /// `(S_j, 0)`.
    pub fn simple(qp: QPData, j: usize) -> Self {
        let mut d = Self::zero(qp);
        d.dims[j] = 1;
        d.refresh_zero_shapes();
        d
    }

    fn refresh_zero_shapes(&mut self) {
        for (id, a) in self.qp.quiver.arrows() {
            let (r, c) = (self.dims[a.tgt], self.dims[a.src]);
            let mat = self.mats.entry(id).or_insert_with(|| QMat::zeros(r, c));
            if (mat.rows(), mat.cols()) != (r, c) {
                *mat = QMat::zeros(r, c);
            }
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Matrix of a nonempty path.
    pub fn eval_path(&self, path: &[usize]) -> QMat {
        eval_with(&self.mats, path)
    }

    /// Matrix of a combination of parallel paths from `src` to `tgt`.
    pub fn eval_combo(&self, combo: &PathCombo, src: usize, tgt: usize) -> QMat {
        combo_matrix(&self.mats, combo, self.dims[src], self.dims[tgt])
    }

    /// Jacobi relations up to the degree cap, then nilpotency.
    pub fn check(&self) -> Result<(), RepError> {
        for (id, a) in self.qp.quiver.arrows() {
            let rel = self.qp.potential.cyclic_derivative(id);
            if !self.eval_combo(&rel, a.tgt, a.src).is_zero() {
                return Err(RepError::RelationViolation(format!("d/d{id} W")));
            }
        }
        if self.is_nilpotent() {
            Ok(())
        } else {
            Err(RepError::NotNilpotent)
        }
    }

    /// Radical filtration reaches zero.
    pub fn is_nilpotent(&self) -> bool {
        let m = self.qp.quiver.m;
        let mut layer: Vec<QMat> = self.dims.iter().map(|&d| QMat::identity(d)).collect();
        for _ in 0..=self.total_dim() {
            if layer.iter().all(|l| l.cols() == 0) {
                return true;
            }
            let mut next: Vec<Vec<QMat>> = vec![Vec::new(); m];
            for (id, a) in self.qp.quiver.arrows() {
                next[a.tgt].push(&self.mats[&id] * &layer[a.src]);
            }
            layer = next
                .into_iter()
                .enumerate()
                .map(|(v, parts)| QMat::hstack(&parts, self.dims[v]).image())
                .collect();
        }
        layer.iter().all(|l| l.cols() == 0)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, RepError> {
        if self.qp != other.qp {
            return Err(RepError::Shape("direct sum over different QPs".into()));
        }
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let vdims = self.vdims.iter().zip(&other.vdims).map(|(a, b)| a + b).collect();
        let mut mats = BTreeMap::new();
        for (id, a) in self.qp.quiver.arrows() {
            let mut mat = QMat::zeros(dims[a.tgt], dims[a.src]);
            mat.set_block(0, 0, &self.mats[&id]);
            mat.set_block(self.dims[a.tgt], self.dims[a.src], &other.mats[&id]);
            mats.insert(id, mat);
        }
        Ok(Self { qp: self.qp.clone(), dims, mats, vdims })
    }

    pub fn mutate(&self, k: usize) -> Result<Self, RepError> {
        self.mutate_with(k, Splitting::Leftmost)
    }

    /// DWZ mutation at `k`: premutate the representation, carry it along the
    /// reduction of the premutated QP, and re-verify the result.
    pub fn mutate_with(&self, k: usize, split: Splitting) -> Result<Self, RepError> {
        let (pre, map) = premutate(&self.qp, k)?;
        let incident: Vec<usize> =
            map.incoming.iter().chain(&map.outgoing).map(|(id, _)| *id).collect();

        // M(a) on unaffected arrows, M(b) M(a) on composites
        let mut bracket = self.mats.clone();
        for (&(ia, ib), &comp) in &map.composites {
            bracket.insert(comp, &self.mats[&ib] * &self.mats[&ia]);
        }
        let in_dims: Vec<usize> = map.incoming.iter().map(|(_, a)| self.dims[a.src]).collect();
        let out_dims: Vec<usize> = map.outgoing.iter().map(|(_, b)| self.dims[b.tgt]).collect();
        let (din, dout, dk) = (in_dims.iter().sum(), out_dims.iter().sum(), self.dims[k]);

        let alpha = QMat::hstack(
            &map.incoming.iter().map(|(id, _)| self.mats[id].clone()).collect::<Vec<_>>(),
            dk,
        );
        let beta = QMat::vstack(
            &map.outgoing.iter().map(|(id, _)| self.mats[id].clone()).collect::<Vec<_>>(),
            dk,
        );
        // γ: M_out -> M_in, block (s, t) evaluates d/d[b_t a_s] of [W]
        let w2 = pre.potential.terms().iter().filter(|(w, _)| !w.iter().any(|a| incident.contains(a)));
        let w2 = crate::quiver_qp::Potential::from_terms(
            pre.potential.cap,
            w2.map(|(w, c)| (w.clone(), c.clone())),
        );
        let mut gamma = QMat::zeros(din, dout);
        let mut r0 = 0;
        for (s, (ia, _)) in map.incoming.iter().enumerate() {
            let mut c0 = 0;
            for (t, (ib, _)) in map.outgoing.iter().enumerate() {
                let comp = map.composites[&(*ia, *ib)];
                let block = combo_matrix(&bracket, &w2.cyclic_derivative(comp), out_dims[t], in_dims[s]);
                gamma.set_block(r0, c0, &block);
                c0 += out_dims[t];
            }
            r0 += in_dims[s];
        }
        if !(&alpha * &gamma).is_zero() || !(&gamma * &beta).is_zero() {
            return Err(RepError::RelationViolation(format!("alpha gamma, gamma beta at vertex {k}")));
        }

        // ker γ / im β
        let ker_g = split.kernel(&gamma);
        let rho = split.left_inverse(&ker_g);
        let im_b = split.image(&(&rho * &beta));
        let c1 = split.complement(&im_b);
        let t1 = QMat::hstack(&[im_b.clone(), c1.clone()], ker_g.cols());
        let t1_inv = t1.inverse().expect("basis of ker gamma");
        let pi = t1_inv.block(im_b.cols(), ker_g.cols(), 0, ker_g.cols());
        // im γ
        let im_g = split.image(&gamma);
        let l_iota = split.left_inverse(&im_g);
        // ker α / im γ
        let ker_a = split.kernel(&alpha);
        let g_in_ka = &split.left_inverse(&ker_a) * &im_g;
        let e = &ker_a * &split.complement(&g_in_ka);

        let (s1, s2, s3, s4) = (c1.cols(), im_g.cols(), e.cols(), self.vdims[k]);
        let new_dk = s1 + s2 + s3 + s4;
        let alpha_bar = QMat::vstack(
            &[-&(&pi * &rho), -&(&l_iota * &gamma), QMat::zeros(s3 + s4, dout)],
            dout,
        );
        let beta_bar = QMat::hstack(&[QMat::zeros(din, s1), im_g, e, QMat::zeros(din, s4)], din);

        let rank_a = alpha.rank();
        let rank_ba = (&beta * &alpha).rank();
        let new_vk = (dk - beta.rank()) - (rank_a - rank_ba);

        let mut mats = bracket;
        let mut r0 = 0;
        for (s, (ia, _)) in map.incoming.iter().enumerate() {
            mats.insert(*ia, beta_bar.block(r0, r0 + in_dims[s], 0, new_dk));
            r0 += in_dims[s];
        }
        let mut c0 = 0;
        for (t, (ib, _)) in map.outgoing.iter().enumerate() {
            mats.insert(*ib, alpha_bar.block(0, new_dk, c0, c0 + out_dims[t]));
            c0 += out_dims[t];
        }
        let mut dims = self.dims.clone();
        dims[k] = new_dk;
        let mut vdims = self.vdims.clone();
        vdims[k] = new_vk;

        let (reduced, steps) = crate::quiver_qp::reduce(&pre)?;
        for step in &steps {
            match step {
                ReductionStep::Substitute(subs) => transport(&mut mats, subs, &pre, &dims)?,
                ReductionStep::Delete(x, y) => {
                    for a in [x, y] {
                        if !mats.remove(a).is_some_and(|m| m.is_zero()) {
                            return Err(RepError::RelationViolation(format!("deleted arrow {a}")));
                        }
                    }
                }
            }
        }
        let out = Self { qp: reduced, dims, mats, vdims };
        out.check()?;
        Ok(out)
    }

    /// Canonical text: dims, vdims, then every arrow matrix row-major.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dims {:?}", self.dims);
        let _ = writeln!(s, "vdims {:?}", self.vdims);
        for (id, a) in self.qp.quiver.arrows() {
            let rows = self.mats[&id].to_rows_text();
            let _ = writeln!(s, "arrow {} {}->{} {:?}", id, a.src + 1, a.tgt + 1, rows);
        }
        s
    }
}

fn eval_with(mats: &BTreeMap<usize, QMat>, path: &[usize]) -> QMat {
    let mut acc = mats[&path[0]].clone();
    for a in &path[1..] {
        acc = &mats[a] * &acc;
    }
    acc
}

fn combo_matrix(mats: &BTreeMap<usize, QMat>, combo: &PathCombo, src_dim: usize, tgt_dim: usize) -> QMat {
    let mut out = QMat::zeros(tgt_dim, src_dim);
    for (path, c) in combo {
        if path.is_empty() || src_dim == 0 || tgt_dim == 0 {
            continue;
        }
        out = &out + &eval_with(mats, path).scale(c);
    }
    out
}

/// Replace the representation `M` by `N` with `N(φ(c)) = M(c)` for every
/// arrow. Solved as a fixpoint, which converges because the higher parts of
/// `φ` act nilpotently.
fn transport(
    mats: &mut BTreeMap<usize, QMat>,
    subs: &BTreeMap<usize, PathCombo>,
    pre: &QPData,
    dims: &[usize],
) -> Result<(), RepError> {
    let original = mats.clone();
    let total: usize = dims.iter().sum();
    for _ in 0..=total + 1 {
        let mut next = mats.clone();
        for (&c, img) in subs {
            let a = pre.quiver.arrow(c)?;
            let lead = img.get(&vec![c]).cloned().unwrap_or_else(Q::zero);
            if lead.is_zero() {
                return Err(RepError::Shape(format!("substitution for {c} is not invertible")));
            }
            let mut rest = img.clone();
            rest.remove(&vec![c]);
            let other = combo_matrix(mats, &rest, dims[a.src], dims[a.tgt]);
            next.insert(c, (&original[&c] - &other).scale(&lead.recip()));
        }
        if next == *mats {
            return Ok(());
        }
        *mats = next;
    }
    Err(RepError::NotNilpotent)
}

/// Follow `ks` forward on the QP, then mutate the negative simple `(0, e_j)`
/// back along the reversed sequence. The result is the module `H^1` attached
/// to the cluster variable at position `j`, as a representation of a QP
/// right-equivalent to `qp0`. Vertices outside the quiver give zero.
pub fn h1_gamma(qp0: &QPData, ks: &[usize], j: usize) -> Result<DecRep, RepError> {
    h1_gamma_with(qp0, ks, j, Splitting::Leftmost)
}

pub fn h1_gamma_with(
    qp0: &QPData,
    ks: &[usize],
    j: usize,
    split: Splitting,
) -> Result<DecRep, RepError> {
    let mut qp = qp0.clone();
    for &k in ks {
        let out = mutate_qp(&qp, k)?;
        if !out.well_mutable {
            return Err(RepError::NotWellMutable(k));
        }
        qp = out.qp;
    }
    if j >= qp.quiver.m {
        return backtrack_zero(qp, ks);
    }
    let mut d = DecRep::negative_simple(qp, j);
    for &k in ks.iter().rev() {
        d = d.mutate_with(k, split)?;
    }
    Ok(d)
}

fn backtrack_zero(mut qp: QPData, ks: &[usize]) -> Result<DecRep, RepError> {
    for &k in ks.iter().rev() {
        qp = mutate_qp(&qp, k)?.qp;
    }
    Ok(DecRep::zero(qp))
}

/// `⊕_j λ_j · H^1(j)`; entries of `lam` past the quiver's vertices are
/// ignored (they contribute nothing).
pub fn h1_lambda(qp0: &QPData, ks: &[usize], lam: &[i64]) -> Result<DecRep, RepError> {
    let mut acc = backtrack_zero(forward(qp0, ks)?, ks)?;
    for (j, &l) in lam.iter().enumerate().take(qp0.quiver.m) {
        if l > 0 {
            let h = h1_gamma(qp0, ks, j)?;
            for _ in 0..l {
                acc = acc.direct_sum(&h)?;
            }
        }
    }
    Ok(acc)
}

fn forward(qp0: &QPData, ks: &[usize]) -> Result<QPData, RepError> {
    let mut qp = qp0.clone();
    for &k in ks {
        qp = mutate_qp(&qp, k)?.qp;
    }
    Ok(qp)
}
