//! Dense matrices over `Q` with exact Gaussian elimination.
//!
//! Pivots are always chosen as the leftmost usable column and the topmost
//! usable row, so every basis produced here is deterministic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMat{}x{}{:?}", self.rows, self.cols, self.to_rows_text())
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, vals: Vec<Q>) -> Self {
        assert_eq!(vals.len(), rows * cols);
        Self { rows, cols, data: vals }
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|row| row.iter().map(|&x| q(x))).collect();
        Self { rows: r, cols: c, data }
    }

    /// Permutation matrix reversing the coordinate order.
    pub fn reversal(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, n - 1 - i)] = Q::one();
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_cols(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut b = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        b
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &QMat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn hstack(parts: &[QMat], rows: usize) -> Self {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows);
            m.set_block(0, c0, p);
            c0 += p.cols;
        }
        m
    }

    pub fn vstack(parts: &[QMat], cols: usize) -> Self {
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut m = Self::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols);
            m.set_block(r0, 0, p);
            r0 += p.rows;
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let x = &m[(r, j)] * &inv;
                m[(r, j)] = x;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let x = &m[(r, j)] * &f;
                        m[(i, j)] -= x;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, as the columns of a `cols x k` matrix.
    pub fn kernel(&self) -> QMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = QMat::zeros(self.cols, free.len());
        for (t, &f) in free.iter().enumerate() {
            k[(f, t)] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                k[(p, t)] = -r[(i, f)].clone();
            }
        }
        k
    }

    /// Basis of the column space, chosen among the original columns.
    pub fn image(&self) -> QMat {
        let (_, pivots) = self.rref();
        let cols: Vec<Vec<Q>> = pivots.iter().map(|&c| self.col(c)).collect();
        QMat::from_cols(self.rows, &cols)
    }

    /// A left inverse `L` (with `L * self = I`) of a matrix with independent
    /// columns, supported on the pivot rows of `self`.
    pub fn left_inverse(&self) -> QMat {
        let (_, pivots) = self.transpose().rref();
        assert_eq!(pivots.len(), self.cols, "columns must be independent");
        let square = QMat::from_cols(
            self.cols,
            &(0..self.cols)
                .map(|j| pivots.iter().map(|&p| self[(p, j)].clone()).collect())
                .collect::<Vec<_>>(),
        );
        let inv = square.inverse().expect("pivot rows form an invertible block");
        let mut l = QMat::zeros(self.cols, self.rows);
        for (t, &p) in pivots.iter().enumerate() {
            for i in 0..self.cols {
                l[(i, p)] = inv[(i, t)].clone();
            }
        }
        l
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return Some(QMat::zeros(0, 0));
        }
        let aug = QMat::hstack(&[self.clone(), QMat::identity(n)], n);
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(r.block(0, n, n, 2 * n))
    }

    /// Standard basis vectors completing the (independent) columns of `self`
    /// to a basis of `Q^rows`; returned as columns.
    pub fn complement(&self) -> QMat {
        let n = self.rows;
        let aug = QMat::hstack(&[self.clone(), QMat::identity(n)], n);
        let (_, pivots) = aug.rref();
        let cols: Vec<Vec<Q>> = pivots
            .iter()
            .filter(|&&c| c >= self.cols)
            .map(|&c| aug.col(c))
            .collect();
        QMat::from_cols(n, &cols)
    }

    /// Solve `self * x = b` for a matrix `x`, if a solution exists.
    pub fn solve(&self, b: &QMat) -> Option<QMat> {
        assert_eq!(self.rows, b.rows);
        let aug = QMat::hstack(&[self.clone(), b.clone()], self.rows);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = QMat::zeros(self.cols, b.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = r[(i, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn to_rows_text(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMat {
    type Output = QMat;
    fn mul(self, rhs: &QMat) -> QMat {
        assert_eq!(self.cols, rhs.rows, "matrix product shapes");
        let mut out = QMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &QMat {
    type Output = QMat;
    fn add(self, rhs: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &QMat {
    type Output = QMat;
    fn sub(self, rhs: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &QMat {
    type Output = QMat;
    fn neg(self) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}
