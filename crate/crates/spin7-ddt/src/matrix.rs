//! Small dense matrices over an abstract scalar.
//!
//! Sizes in this crate are tiny (at most 70x70, the degree-4 projectors),
//! so everything is a plain row-major `Vec`. Rational instantiations get
//! exact Gaussian elimination; float spectral work (SVD, eigenvalues) goes
//! through nalgebra via [`Mat::to_nalgebra`].

use crate::scalar::Scalar;
use nalgebra::DMatrix;
use std::ops::{Index, IndexMut};

#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| c.clone() * self[(i, j)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc = acc + self[(i, j)].clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Stack `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn trace(&self) -> S {
        assert!(self.is_square());
        let mut t = S::zero();
        for i in 0..self.rows {
            t = t + self[(i, i)].clone();
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::abs_f64).fold(0.0, f64::max)
    }

    /// Row echelon reduction in place; returns (rank, pivot column list).
    /// Pivoting: largest |entry| (well-defined in both modes; harmless for
    /// exact scalars, essential for floats). Entries below `tol` in
    /// absolute value count as zero in float mode.
    fn row_reduce(&mut self, tol: f64) -> (usize, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            // find best pivot in column c at row >= r
            let mut best: Option<(usize, f64)> = None;
            for i in r..self.rows {
                let a = self[(i, c)].abs_f64();
                let nonzero = if S::EXACT {
                    !self[(i, c)].is_zero()
                } else {
                    a > tol
                };
                if nonzero && best.map_or(true, |(_, b)| a > b) {
                    best = Some((i, a));
                }
            }
            let Some((p, _)) = best else { continue };
            self.swap_rows(r, p);
            let inv = S::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].clone() * inv.clone();
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        self[(i, j)] = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                    }
                    self[(i, c)] = S::zero();
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        (r, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Rank; exact in rational mode, entry-threshold `tol` in float mode.
    /// (Float callers that need a spectral rank should use SVD instead.)
    pub fn rank(&self, tol: f64) -> usize {
        let mut m = self.clone();
        m.row_reduce(tol).0
    }

    /// Nullspace basis (columns of the returned matrices are not packed: each
    /// `Vec<S>` is one kernel vector of length `ncols`).
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<S>> {
        let mut m = self.clone();
        let (_, pivots) = m.row_reduce(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![S::zero(); self.cols];
            v[f] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = S::zero() - m[(r, f)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Exact inverse; panics on non-square, returns None when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Mat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = S::one();
        }
        let (_, pivots) = aug.row_reduce(1e-13);
        if pivots != (0..n).collect::<Vec<_>>() {
            return None;
        }
        Some(Self::from_fn(n, n, |i, j| aug[(i, n + j)].clone()))
    }

    pub fn det(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let mut best: Option<(usize, f64)> = None;
            for i in c..n {
                let a = m[(i, c)].abs_f64();
                if !m[(i, c)].is_zero() && best.map_or(true, |(_, b)| a > b) {
                    best = Some((i, a));
                }
            }
            let Some((p, _)) = best else { return S::zero() };
            if p != c {
                m.swap_rows(c, p);
                det = S::zero() - det;
            }
            det = det * m[(c, c)].clone();
            let inv = S::one() / m[(c, c)].clone();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone() * inv.clone();
                for j in c..n {
                    m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                }
            }
        }
        det
    }

    pub fn map_to_f64(&self) -> Mat<f64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }

    /// Comma-separated dump, one row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

impl Mat<f64> {
    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Rank by singular values: count sigma > rel_tol * sigma_max.
    pub fn rank_svd(&self, rel_tol: f64) -> usize {
        let svd = self.to_nalgebra().svd(false, false);
        let smax = svd.singular_values.max();
        if smax == 0.0 {
            return 0;
        }
        svd.singular_values.iter().filter(|&&s| s > rel_tol * smax).count()
    }

    /// Orthonormal nullspace basis from the SVD (rows of V^T with small
    /// sigma). Wide matrices are padded with zero rows so the thin SVD
    /// still produces the full V^T; padding does not change the kernel.
    pub fn nullspace_svd(&self, rel_tol: f64) -> Vec<Vec<f64>> {
        if self.nrows() < self.ncols() {
            let mut padded = Mat::zeros(self.ncols(), self.ncols());
            for i in 0..self.nrows() {
                for j in 0..self.ncols() {
                    padded[(i, j)] = self[(i, j)];
                }
            }
            return padded.nullspace_svd(rel_tol);
        }
        let svd = self.to_nalgebra().svd(false, true);
        let vt = svd.v_t.expect("svd computed with V");
        let smax = svd.singular_values.max().max(f64::MIN_POSITIVE);
        let mut basis = Vec::new();
        for i in 0..vt.nrows() {
            let sigma = if i < svd.singular_values.len() {
                svd.singular_values[i]
            } else {
                0.0
            };
            if sigma <= rel_tol * smax {
                basis.push(vt.row(i).iter().copied().collect());
            }
        }
        basis
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Scalar> std::fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio, Rat};

    #[test]
    fn exact_inverse_round_trip() {
        let m = Mat::from_rows(vec![
            vec![rat(2), rat(1), rat(0)],
            vec![rat(1), rat(3), rat(1)],
            vec![rat(0), rat(1), rat(2)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Mat::<Rat>::identity(3));
        assert_eq!(m.det(), rat(8));
    }

    #[test]
    fn exact_nullspace() {
        // rank-1 matrix, 3x3 => 2-dim kernel
        let m = Mat::from_rows(vec![
            vec![rat(1), rat(2), rat(3)],
            vec![rat(2), rat(4), rat(6)],
            vec![rat(-1), rat(-2), rat(-3)],
        ]);
        assert_eq!(m.rank(0.0), 1);
        let ns = m.nullspace(0.0);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let out = m.matvec(v);
            assert!(out.iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = Mat::from_rows(vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]]);
        assert!(m.inverse().is_none());
        assert!(m.det().is_zero());
    }

    #[test]
    fn fractional_pivots_stay_exact() {
        let m = Mat::from_rows(vec![
            vec![ratio(1, 3), ratio(1, 7)],
            vec![ratio(2, 5), ratio(3, 11)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Mat::<Rat>::identity(2));
    }

    #[test]
    fn float_svd_rank() {
        let m = Mat::<f64>::from_rows(vec![
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 2.0],
        ]);
        assert_eq!(m.rank_svd(1e-8), 2);
        let ns = m.nullspace_svd(1e-8);
        assert_eq!(ns.len(), 1);
    }
}
