use std::collections::BTreeMap;

use super::{PathCombo, QPData, QpError};
use crate::linalg::{QMat, Q};

/// A path of length zero is identified by its vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Path {
    Trivial(usize),
    Arrows(Vec<usize>),
}

/// Graded dimensions of the completed Jacobian algebra, computed on the
/// finite quotient `A / (J(W) + m^(up_to+1))`. Entry `L` is the dimension in
/// path length `L`.
pub fn jacobi_dims(qp: &QPData, up_to: usize) -> Result<Vec<usize>, QpError> {
    let cap = qp.potential.cap;
    let maxdeg = qp.potential.max_degree();
    if maxdeg > 0 && up_to + maxdeg > cap + 1 {
        return Err(QpError::DegreeCapExceeded(cap));
    }
    let q = &qp.quiver;
    let arrows: Vec<(usize, super::Arrow)> = q.arrows().collect();

    // paths by length, each with its (source, target)
    let mut by_len: Vec<Vec<(Vec<usize>, usize, usize)>> = vec![Vec::new(); up_to + 1];
    for v in 0..q.m {
        by_len[0].push((Vec::new(), v, v));
    }
    if up_to >= 1 {
        by_len[1] = arrows.iter().map(|(id, a)| (vec![*id], a.src, a.tgt)).collect();
    }
    for len in 2..=up_to {
        let mut cur = Vec::new();
        for (p, s, t) in &by_len[len - 1] {
            for &(id, a) in &arrows {
                if a.src == *t {
                    let mut np = p.clone();
                    np.push(id);
                    cur.push((np, *s, a.tgt));
                }
            }
        }
        by_len[len] = cur;
    }

    let mut column: BTreeMap<Path, usize> = BTreeMap::new();
    let mut col_len = Vec::new();
    for (len, paths) in by_len.iter().enumerate() {
        for (p, s, _) in paths {
            let key = if len == 0 { Path::Trivial(*s) } else { Path::Arrows(p.clone()) };
            column.insert(key, col_len.len());
            col_len.push(len);
        }
    }

    let mut rows: Vec<BTreeMap<usize, Q>> = Vec::new();
    for &(id, a) in &arrows {
        let rel: PathCombo = qp.potential.cyclic_derivative(id);
        if rel.is_empty() {
            continue;
        }
        let min_len = rel.keys().map(Vec::len).min().unwrap_or(0);
        // ∂_a W runs from t(a) to s(a)
        let (rs, rt) = (a.tgt, a.src);
        for ul in 0..=up_to.saturating_sub(min_len) {
            for (u, _, ut) in &by_len[ul] {
                if *ut != rs {
                    continue;
                }
                for wl in 0..=(up_to - min_len - ul) {
                    for (wp, ws, _) in &by_len[wl] {
                        if *ws != rt {
                            continue;
                        }
                        let mut row = BTreeMap::new();
                        for (r, c) in &rel {
                            let len = ul + r.len() + wl;
                            if len > up_to {
                                continue;
                            }
                            let mut path = u.clone();
                            path.extend_from_slice(r);
                            path.extend_from_slice(wp);
                            row.insert(column[&Path::Arrows(path)], c.clone());
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }

    let ncols = col_len.len();
    let mut mat = QMat::zeros(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        for (&j, c) in row {
            mat[(i, j)] = c.clone();
        }
    }
    let (_, pivots) = mat.rref();
    let mut dims = vec![0usize; up_to + 1];
    for &l in &col_len {
        dims[l] += 1;
    }
    for p in pivots {
        dims[col_len[p]] -= 1;
    }
    Ok(dims)
}
