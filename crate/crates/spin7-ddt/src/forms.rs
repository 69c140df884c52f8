//! Exterior algebra on R^8 and R^7 with metric-dependent operations.
//!
//! A [`KForm`] stores dense coefficients over the strictly increasing index
//! tuples of its degree, in lexicographic tuple order. The R^8 context uses
//! indices 0..=7; the R^7 context uses 1..=7, so that the standard 4-form
//! splits as `e^0 ^ varphi + *7 varphi` verbatim. Orientation is fixed by
//! vol8 = e^{01234567} and vol7 = e^{1234567}.
//!
//! Index tuples are packed into bitmasks (bit i = index i); signs come from
//! inversion counts on the masks. All operations are pure.

use crate::matrix::Mat;
use crate::scalar::Scalar;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

/// Ambient space: R^8 (indices 0..=7) or the R^7 slice (indices 1..=7).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Dim {
    R7,
    R8,
}

impl Dim {
    pub fn n(self) -> usize {
        match self {
            Dim::R7 => 7,
            Dim::R8 => 8,
        }
    }
    /// Smallest valid basis index (1 for R^7, 0 for R^8).
    pub fn offset(self) -> usize {
        match self {
            Dim::R7 => 1,
            Dim::R8 => 0,
        }
    }
    pub fn index_range(self) -> std::ops::Range<usize> {
        self.offset()..self.offset() + self.n()
    }
    /// Bitmask of the full index set.
    pub fn full_mask(self) -> u16 {
        match self {
            Dim::R7 => 0b1111_1110,
            Dim::R8 => 0b1111_1111,
        }
    }
    fn table_slot(self) -> usize {
        match self {
            Dim::R7 => 0,
            Dim::R8 => 1,
        }
    }
}

/// Lexicographically ordered index-tuple masks for each (dim, degree).
struct BasisTable {
    masks: Vec<u16>,
    /// mask -> position in `masks`, 0xFF when absent.
    pos: [u8; 256],
}

static TABLES: OnceLock<Vec<Vec<BasisTable>>> = OnceLock::new();

fn tables() -> &'static Vec<Vec<BasisTable>> {
    TABLES.get_or_init(|| {
        [Dim::R7, Dim::R8]
            .iter()
            .map(|&dim| {
                (0..=8)
                    .map(|deg| {
                        let mut masks = Vec::new();
                        let idx: Vec<usize> = dim.index_range().collect();
                        combinations(&idx, deg, &mut masks);
                        let mut pos = [u8::MAX; 256];
                        for (p, &m) in masks.iter().enumerate() {
                            pos[m as usize] = p as u8;
                        }
                        BasisTable { masks, pos }
                    })
                    .collect()
            })
            .collect()
    })
}

fn combinations(idx: &[usize], k: usize, out: &mut Vec<u16>) {
    fn rec(idx: &[usize], k: usize, start: usize, cur: u16, out: &mut Vec<u16>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..idx.len() {
            rec(idx, k - 1, i + 1, cur | (1 << idx[i]), out);
        }
    }
    rec(idx, k, 0, 0, out);
}

fn basis(dim: Dim, deg: usize) -> &'static BasisTable {
    &tables()[dim.table_slot()][deg]
}

/// Number of basis monomials of the given degree.
pub fn basis_len(dim: Dim, deg: usize) -> usize {
    basis(dim, deg).masks.len()
}

/// The mask of the `p`-th basis monomial.
pub fn basis_mask(dim: Dim, deg: usize, p: usize) -> u16 {
    basis(dim, deg).masks[p]
}

fn mask_of_tuple(t: &[usize]) -> u16 {
    let mut m = 0u16;
    for w in t.windows(2) {
        assert!(w[0] < w[1], "index tuple must be strictly increasing: {:?}", t);
    }
    for &i in t {
        assert!(i < 8, "index {} out of range", i);
        m |= 1 << i;
    }
    m
}

pub fn tuple_of_mask(mut m: u16) -> Vec<usize> {
    let mut t = Vec::new();
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        t.push(i);
        m &= m - 1;
    }
    t
}

/// Sign of the merge of two disjoint ascending tuples (as masks) into one
/// ascending tuple: (-1)^{#inversions}.
fn merge_sign(i_mask: u16, j_mask: u16) -> i32 {
    debug_assert_eq!(i_mask & j_mask, 0);
    let mut inv = 0;
    let mut jm = j_mask;
    while jm != 0 {
        let y = jm.trailing_zeros();
        inv += (i_mask >> (y + 1)).count_ones();
        jm &= jm - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A degree-k alternating form with dense coefficients.
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    dim: Dim,
    deg: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(dim: Dim, deg: usize) -> Self {
        assert!(deg <= 8);
        KForm {
            dim,
            deg,
            coeffs: vec![S::zero(); basis_len(dim, deg)],
        }
    }

    /// Build from (tuple, coefficient) terms. Tuples must be strictly
    /// increasing and within the dimension's index set.
    pub fn from_terms(dim: Dim, deg: usize, terms: &[(&[usize], S)]) -> Self {
        let mut f = Self::zero(dim, deg);
        for (t, c) in terms {
            assert_eq!(t.len(), deg, "tuple length must equal degree");
            let m = mask_of_tuple(t);
            assert_eq!(m & !dim.full_mask(), 0, "index outside dimension: {:?}", t);
            let p = basis(dim, deg).pos[m as usize];
            assert_ne!(p, u8::MAX);
            f.coeffs[p as usize] = f.coeffs[p as usize].clone() + c.clone();
        }
        f
    }

    /// Integer-coefficient helper for the hard-coded model forms.
    pub fn from_int_terms(dim: Dim, deg: usize, terms: &[(i64, &[usize])]) -> Self {
        let with_scalars: Vec<(&[usize], S)> =
            terms.iter().map(|(c, t)| (*t, S::from_int(*c))).collect();
        Self::from_terms(dim, deg, &with_scalars)
    }

    /// Single basis monomial e^{t}.
    pub fn monomial(dim: Dim, t: &[usize]) -> Self {
        Self::from_terms(dim, t.len(), &[(t, S::one())])
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }
    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn coeff_at(&self, p: usize) -> &S {
        &self.coeffs[p]
    }
    pub fn set_coeff(&mut self, p: usize, v: S) {
        self.coeffs[p] = v;
    }

    /// Coefficient of the monomial with the given ascending tuple.
    pub fn get(&self, t: &[usize]) -> S {
        assert_eq!(t.len(), self.deg);
        let m = mask_of_tuple(t);
        let p = basis(self.dim, self.deg).pos[m as usize];
        if p == u8::MAX {
            S::zero()
        } else {
            self.coeffs[p as usize].clone()
        }
    }

    /// Nonzero terms as (ascending tuple, coefficient), lexicographic order.
    pub fn terms(&self) -> Vec<(Vec<usize>, S)> {
        let tb = basis(self.dim, self.deg);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| (tuple_of_mask(tb.masks[p]), c.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, c: &S) -> Self {
        KForm {
            dim: self.dim,
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|x| c.clone() * x.clone()).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in wedge");
        let deg = self.deg + other.deg;
        if deg > self.dim.n() {
            // no monomials of this degree: the zero form (clamped at top+1
            // only when representable; degree > 8 collapses to empty too)
            return KForm::zero(self.dim, deg.min(8));
        }
        let mut out: KForm<S> = KForm::zero(self.dim, deg);
        let tb_a = basis(self.dim, self.deg);
        let tb_b = basis(self.dim, other.deg);
        let tb_o = basis(self.dim, deg);
        for (pa, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ma = tb_a.masks[pa];
            for (pb, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let mb = tb_b.masks[pb];
                if ma & mb != 0 {
                    continue;
                }
                let sign = merge_sign(ma, mb);
                let po = tb_o.pos[(ma | mb) as usize] as usize;
                let term = ca.clone() * cb.clone();
                out.coeffs[po] = if sign > 0 {
                    out.coeffs[po].clone() + term
                } else {
                    out.coeffs[po].clone() - term
                };
            }
        }
        out
    }

    /// Interior product with the basis vector e_v.
    pub fn interior_basis(&self, v: usize) -> Self {
        assert!(self.deg >= 1, "interior product needs degree >= 1");
        let mut out: KForm<S> = KForm::zero(self.dim, self.deg - 1);
        let tb = basis(self.dim, self.deg);
        let tb_o = basis(self.dim, self.deg - 1);
        let bit = 1u16 << v;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = tb.masks[p];
            if m & bit == 0 {
                continue;
            }
            let posn = (m & (bit - 1)).count_ones();
            let po = tb_o.pos[(m & !bit) as usize] as usize;
            let term = c.clone();
            out.coeffs[po] = if posn % 2 == 0 {
                out.coeffs[po].clone() + term
            } else {
                out.coeffs[po].clone() - term
            };
        }
        out
    }

    /// Interior product with a general vector (components over the
    /// dimension's index range, matrix-indexed from 0).
    pub fn interior(&self, v: &[S]) -> Self {
        assert_eq!(v.len(), self.dim.n());
        let mut out = KForm::zero(self.dim, self.deg - 1);
        for (k, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out = out.add_form(&self.interior_basis(k + self.dim.offset()).scale(c));
        }
        out
    }

    pub fn add_form(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.deg, other.deg, "degree mismatch");
        KForm {
            dim: self.dim,
            deg: self.deg,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub_form(&self, other: &Self) -> Self {
        self.add_form(&other.neg_form())
    }

    pub fn neg_form(&self) -> Self {
        KForm {
            dim: self.dim,
            deg: self.deg,
            coeffs: self.coeffs.iter().map(|a| S::zero() - a.clone()).collect(),
        }
    }

    /// Euclidean (standard-metric) inner product: coefficient dot product.
    pub fn dot(&self, other: &Self) -> S {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.deg, other.deg, "degree mismatch");
        let mut acc = S::zero();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            if !a.is_zero() && !b.is_zero() {
                acc = acc + a.clone() * b.clone();
            }
        }
        acc
    }

    /// Inner product induced by a general metric.
    pub fn inner(&self, other: &Self, m: &MetricData<S>) -> S {
        assert_eq!(self.dim, m.dim);
        if m.is_standard {
            return self.dot(other);
        }
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.deg, other.deg, "degree mismatch");
        let tb = basis(self.dim, self.deg);
        let mut acc = S::zero();
        for (pa, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            let ta = tuple_of_mask(tb.masks[pa]);
            for (pb, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let tc = tuple_of_mask(tb.masks[pb]);
                acc = acc + ca.clone() * cb.clone() * m.gram_minor(&ta, &tc);
            }
        }
        acc
    }

    pub fn norm_sq(&self, m: &MetricData<S>) -> S {
        self.inner(self, m)
    }

    /// Euclidean norm of the coefficient vector as f64 (diagnostics).
    pub fn norm_f64(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    /// Hodge star with respect to the metric.
    pub fn hodge_star(&self, m: &MetricData<S>) -> Self {
        assert_eq!(self.dim, m.dim);
        let n = self.dim.n();
        let k = self.deg;
        assert!(k <= n);
        let full = self.dim.full_mask();
        let tb = basis(self.dim, k);
        let tb_o = basis(self.dim, n - k);
        let mut out: KForm<S> = KForm::zero(self.dim, n - k);
        if m.is_standard {
            for (p, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mi = tb.masks[p];
                let mk = full & !mi;
                let sign = merge_sign(mi, mk);
                let po = tb_o.pos[mk as usize] as usize;
                out.coeffs[po] = if sign > 0 {
                    out.coeffs[po].clone() + c.clone()
                } else {
                    out.coeffs[po].clone() - c.clone()
                };
            }
            return out;
        }
        // general metric: (*beta)_K = vol_coeff * sign(comp(K), K)
        //                  * sum_I det(g^{-1}[comp(K), I]) beta_I
        for (po, &mk) in tb_o.masks.iter().enumerate() {
            let mj = full & !mk;
            let tj = tuple_of_mask(mj);
            let mut raised = S::zero();
            for (p, c) in self.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let ti = tuple_of_mask(tb.masks[p]);
                raised = raised + c.clone() * m.gram_minor(&tj, &ti);
            }
            let sign = merge_sign(mj, mk);
            let v = m.vol_coeff.clone() * raised;
            out.coeffs[po] = if sign > 0 { v } else { S::zero() - v };
        }
        out
    }

    /// Pullback along the linear map sigma (matrix in the standard basis,
    /// column convention). Defined for arbitrary sigma; functorial:
    /// (sigma tau)^* = tau^* sigma^*.
    pub fn pullback(&self, sigma: &Mat<S>) -> Self {
        let n = self.dim.n();
        assert_eq!((sigma.nrows(), sigma.ncols()), (n, n));
        if self.deg == 0 {
            return self.clone();
        }
        // sigma^* e^i = sum_j sigma[i][j] e^j (matrix indices)
        let off = self.dim.offset();
        let pulled: Vec<KForm<S>> = (0..n)
            .map(|i| {
                let mut f = KForm::zero(self.dim, 1);
                for j in 0..n {
                    let c = sigma[(i, j)].clone();
                    if !c.is_zero() {
                        let p = basis(self.dim, 1).pos[(1u16 << (j + off)) as usize] as usize;
                        f.coeffs[p] = c;
                    }
                }
                f
            })
            .collect();
        let tb = basis(self.dim, self.deg);
        let mut out = KForm::zero(self.dim, self.deg);
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = tuple_of_mask(tb.masks[p]);
            let mut w = pulled[t[0] - off].clone();
            for &i in &t[1..] {
                w = w.wedge(&pulled[i - off]);
            }
            out = out.add_form(&w.scale(c));
        }
        out
    }

    /// Embed an R^7 form into R^8 (indices 1..=7 are shared).
    pub fn embed_r8(&self) -> KForm<S> {
        assert_eq!(self.dim, Dim::R7);
        let mut out = KForm::zero(Dim::R8, self.deg);
        let tb7 = basis(Dim::R7, self.deg);
        let tb8 = basis(Dim::R8, self.deg);
        for (p, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let po = tb8.pos[tb7.masks[p] as usize] as usize;
                out.coeffs[po] = c.clone();
            }
        }
        out
    }

    /// Restrict an R^8 form to R^7: keeps only monomials avoiding index 0.
    pub fn restrict_r7(&self) -> KForm<S> {
        assert_eq!(self.dim, Dim::R8);
        let mut out = KForm::zero(Dim::R7, self.deg);
        let tb8 = basis(Dim::R8, self.deg);
        let tb7 = basis(Dim::R7, self.deg);
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = tb8.masks[p];
            if m & 1 == 0 {
                let po = tb7.pos[m as usize] as usize;
                out.coeffs[po] = c.clone();
            }
        }
        out
    }

    pub fn map_to_f64(&self) -> KForm<f64> {
        KForm {
            dim: self.dim,
            deg: self.deg,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Coefficient vector in basis order (dense, includes zeros).
    pub fn coeff_vec(&self) -> Vec<S> {
        self.coeffs.clone()
    }

    pub fn from_coeff_vec(dim: Dim, deg: usize, coeffs: Vec<S>) -> Self {
        assert_eq!(coeffs.len(), basis_len(dim, deg));
        KForm { dim, deg, coeffs }
    }

    /// Coefficient matrix A with A[i][j] = F(e_i, e_j) of a 2-form
    /// (matrix indices; skew-symmetric).
    pub fn two_form_matrix(&self) -> Mat<S> {
        assert_eq!(self.deg, 2);
        let n = self.dim.n();
        let off = self.dim.offset();
        let mut a = Mat::zeros(n, n);
        for (t, c) in self.terms() {
            let (i, j) = (t[0] - off, t[1] - off);
            a[(i, j)] = c.clone();
            a[(j, i)] = S::zero() - c;
        }
        a
    }

    /// Inverse of [`two_form_matrix`].
    pub fn from_two_form_matrix(dim: Dim, a: &Mat<S>) -> Self {
        let n = dim.n();
        assert_eq!((a.nrows(), a.ncols()), (n, n));
        let off = dim.offset();
        let mut f = KForm::zero(dim, 2);
        for i in 0..n {
            for j in i + 1..n {
                if !a[(i, j)].is_zero() {
                    let p = basis(dim, 2).pos
                        [(1u16 << (i + off) | 1u16 << (j + off)) as usize]
                        as usize;
                    f.coeffs[p] = a[(i, j)].clone();
                }
            }
        }
        f
    }
}

impl<S: Scalar> Add for &KForm<S> {
    type Output = KForm<S>;
    fn add(self, rhs: Self) -> KForm<S> {
        self.add_form(rhs)
    }
}

impl<S: Scalar> Sub for &KForm<S> {
    type Output = KForm<S>;
    fn sub(self, rhs: Self) -> KForm<S> {
        self.sub_form(rhs)
    }
}

impl<S: Scalar> Neg for &KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        self.neg_form()
    }
}

impl<S: Scalar> std::fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let idx: String = t.iter().map(|i| i.to_string()).collect();
            if self.deg == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "({})e{}", c, idx)?;
            }
        }
        Ok(())
    }
}

/// Metric data: symmetric positive-definite matrix, its inverse, and the
/// (oriented) volume coefficient so vol = vol_coeff * e^{0...n-1}.
#[derive(Clone)]
pub struct MetricData<S> {
    pub dim: Dim,
    pub g: Mat<S>,
    pub g_inv: Mat<S>,
    pub vol_coeff: S,
    is_standard: bool,
}

impl<S: Scalar> MetricData<S> {
    pub fn standard(dim: Dim) -> Self {
        let n = dim.n();
        MetricData {
            dim,
            g: Mat::identity(n),
            g_inv: Mat::identity(n),
            vol_coeff: S::one(),
            is_standard: true,
        }
    }

    /// Metric pulled back along an invertible conjugator: g = sigma^T sigma,
    /// vol = det(sigma) e^{0..n-1}. Exact in rational mode.
    pub fn from_conjugator(dim: Dim, sigma: &Mat<S>) -> Self {
        let n = dim.n();
        assert_eq!((sigma.nrows(), sigma.ncols()), (n, n));
        let g = sigma.transpose().matmul(sigma);
        let g_inv = g.inverse().expect("conjugator must be invertible");
        let vol_coeff = sigma.det();
        let is_standard = g == Mat::identity(n) && vol_coeff == S::one();
        MetricData {
            dim,
            g,
            g_inv,
            vol_coeff,
            is_standard,
        }
    }

    /// General symmetric positive-definite metric with caller-supplied
    /// volume coefficient (must equal sqrt(det g) for the usual orientation).
    pub fn from_matrix(dim: Dim, g: Mat<S>, vol_coeff: S) -> Self {
        let n = dim.n();
        assert_eq!((g.nrows(), g.ncols()), (n, n));
        assert!(g == g.transpose(), "metric must be symmetric");
        if S::EXACT {
            // leading principal minors > 0
            for k in 1..=n {
                let sub = Mat::from_fn(k, k, |i, j| g[(i, j)].clone());
                assert!(sub.det().to_f64() > 0.0, "metric not positive definite");
            }
        }
        let g_inv = g.inverse().expect("metric must be invertible");
        let is_standard = g == Mat::identity(n) && vol_coeff == S::one();
        MetricData {
            dim,
            g,
            g_inv,
            vol_coeff,
            is_standard,
        }
    }

    pub fn is_standard(&self) -> bool {
        self.is_standard
    }

    /// Volume form vol_coeff * e^{0..n-1}.
    pub fn volume_form(&self) -> KForm<S> {
        let t: Vec<usize> = self.dim.index_range().collect();
        KForm::monomial(self.dim, &t).scale(&self.vol_coeff)
    }

    /// det of the g^{-1} submatrix with rows/cols given by index tuples
    /// (ambient indices): the induced Gram entry on monomials.
    fn gram_minor(&self, ti: &[usize], tj: &[usize]) -> S {
        let off = self.dim.offset();
        let k = ti.len();
        if k == 0 {
            return S::one();
        }
        let sub = Mat::from_fn(k, k, |a, b| self.g_inv[(ti[a] - off, tj[b] - off)].clone());
        sub.det()
    }

    /// Lower a vector: v_flat = g(v, .).
    pub fn flat(&self, v: &[S]) -> KForm<S> {
        let n = self.dim.n();
        assert_eq!(v.len(), n);
        let coeffs = self.g.matvec(v);
        let off = self.dim.offset();
        let mut f = KForm::zero(self.dim, 1);
        for (i, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                let p = basis(self.dim, 1).pos[(1u16 << (i + off)) as usize] as usize;
                f.coeffs[p] = c;
            }
        }
        f
    }

    /// Raise a 1-form: alpha_sharp with g(alpha_sharp, .) = alpha.
    pub fn sharp(&self, alpha: &KForm<S>) -> Vec<S> {
        assert_eq!(alpha.deg, 1);
        assert_eq!(alpha.dim, self.dim);
        let off = self.dim.offset();
        let n = self.dim.n();
        let mut comps = vec![S::zero(); n];
        for (t, c) in alpha.terms() {
            comps[t[0] - off] = c;
        }
        self.g_inv.matvec(&comps)
    }
}

/// Endomorphism F_sharp of a 2-form: g(F_sharp(u), v) = F(u, v).
/// Returned in column convention: (F_sharp v)_i = sum_j M[i][j] v_j.
/// With the standard metric, M = A^T for A[i][j] = F(e_i, e_j); it is
/// skew-symmetric with respect to the metric, and det(I + M) > 0.
pub fn two_form_sharp<S: Scalar>(f: &KForm<S>, m: &MetricData<S>) -> Mat<S> {
    assert_eq!(f.degree(), 2);
    assert_eq!(f.dim(), m.dim);
    let a = f.two_form_matrix();
    m.g_inv.matmul(&a.transpose())
}

/// I + F_sharp (always invertible since F_sharp is skew).
pub fn one_plus_sharp<S: Scalar>(f: &KForm<S>, m: &MetricData<S>) -> Mat<S> {
    let n = f.dim().n();
    Mat::identity(n).add(&two_form_sharp(f, m))
}

/// Matrix of the pullback sigma^* acting on degree-`deg` forms, in the
/// lexicographic monomial basis. Used to conjugate projectors.
pub fn pullback_matrix<S: Scalar>(dim: Dim, deg: usize, sigma: &Mat<S>) -> Mat<S> {
    let len = basis_len(dim, deg);
    let mut m = Mat::zeros(len, len);
    for p in 0..len {
        let t = tuple_of_mask(basis_mask(dim, deg, p));
        let col = KForm::<S>::monomial(dim, &t).pullback(sigma);
        for (i, c) in col.coeff_vec().into_iter().enumerate() {
            m[(i, p)] = c;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio, Rat};
    use crate::test_oracle as oracle;
    use proptest::prelude::*;

    fn sample_form(dim: Dim, deg: usize, seed: u64) -> KForm<Rat> {
        // cheap deterministic pseudo-random rational form
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(deg as u64);
        let mut f = KForm::zero(dim, deg);
        for p in 0..basis_len(dim, deg) {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = ((state >> 33) % 7) as i64 - 3;
            f.set_coeff(p, rat(v));
        }
        f
    }

    #[test]
    fn wedge_disjoint_monomials() {
        let a = KForm::<Rat>::monomial(Dim::R8, &[0, 1]);
        let b = KForm::<Rat>::monomial(Dim::R8, &[2, 3]);
        assert_eq!(a.wedge(&b), KForm::monomial(Dim::R8, &[0, 1, 2, 3]));
    }

    #[test]
    fn wedge_repeated_index_is_zero() {
        let a = KForm::<Rat>::monomial(Dim::R8, &[0, 1]);
        let b = KForm::<Rat>::monomial(Dim::R8, &[1, 2]);
        assert!(a.wedge(&b).is_zero());
    }

    #[test]
    fn omega_cubed_brute_force() {
        // Oracle-first: expand omega^3 with the naive permutation wedge,
        // then check the fast path agrees and matches the frozen value.
        let omega = KForm::<Rat>::from_int_terms(
            Dim::R8,
            2,
            &[(1, &[0, 1]), (1, &[2, 3]), (1, &[4, 5]), (1, &[6, 7])],
        );
        let naive = oracle::naive_wedge(&oracle::naive_wedge(&omega, &omega), &omega);
        let fast = omega.wedge(&omega).wedge(&omega);
        assert_eq!(naive, fast);
        let expected = KForm::<Rat>::from_int_terms(
            Dim::R8,
            6,
            &[
                (6, &[0, 1, 2, 3, 4, 5]),
                (6, &[0, 1, 2, 3, 6, 7]),
                (6, &[0, 1, 4, 5, 6, 7]),
                (6, &[2, 3, 4, 5, 6, 7]),
            ],
        );
        assert_eq!(fast, expected);
    }

    #[test]
    fn interior_of_monomial() {
        let f = KForm::<Rat>::monomial(Dim::R8, &[0, 1, 2, 3]);
        assert_eq!(f.interior_basis(0), KForm::monomial(Dim::R8, &[1, 2, 3]));
        // i(e_1) e^{0123} = -e^{023}
        assert_eq!(
            f.interior_basis(1),
            KForm::<Rat>::monomial(Dim::R8, &[0, 2, 3]).neg_form()
        );
    }

    #[test]
    fn hodge_star_standard_monomial() {
        let m = MetricData::<Rat>::standard(Dim::R8);
        let f = KForm::monomial(Dim::R8, &[0, 1, 2, 3]);
        assert_eq!(f.hodge_star(&m), KForm::monomial(Dim::R8, &[4, 5, 6, 7]));
    }

    #[test]
    fn flat_sharp_inverse_and_scaling() {
        let m = MetricData::<Rat>::standard(Dim::R8);
        let e1 = {
            let mut v = vec![rat(0); 8];
            v[1] = rat(1);
            v
        };
        assert_eq!(m.flat(&e1), KForm::monomial(Dim::R8, &[1]));
        // doubled metric: flat multiplies by 2
        let m2 = MetricData::from_matrix(Dim::R8, Mat::identity(8).scale(&rat(2)), rat(16));
        assert_eq!(m2.flat(&e1), KForm::<Rat>::monomial(Dim::R8, &[1]).scale(&rat(2)));
        let alpha = KForm::<Rat>::from_terms(Dim::R8, 1, &[(&[2], ratio(3, 5)), (&[7], rat(-2))]);
        assert_eq!(m.flat(&m.sharp(&alpha)), alpha);
    }

    #[test]
    fn two_form_sharp_convention() {
        // g(F#(u), v) = F(u, v); for F = e^{01}: F#(e_0) = e_1, F#(e_1) = -e_0.
        let m = MetricData::<Rat>::standard(Dim::R8);
        let f = KForm::monomial(Dim::R8, &[0, 1]);
        let sharp = two_form_sharp(&f, &m);
        let mut e0 = vec![rat(0); 8];
        e0[0] = rat(1);
        let img = sharp.matvec(&e0);
        let mut expect = vec![rat(0); 8];
        expect[1] = rat(1);
        assert_eq!(img, expect);
        // defining relation on all basis pairs
        for u in 0..8 {
            for v in 0..8 {
                let mut uu = vec![rat(0); 8];
                uu[u] = rat(1);
                let img = sharp.matvec(&uu);
                let lhs = img[v].clone(); // g standard
                let a = f.two_form_matrix();
                assert_eq!(lhs, a[(u, v)]);
            }
        }
        // skewness: g(F#u, v) = -g(u, F#v) <=> matrix skew for standard g
        assert_eq!(sharp.transpose(), sharp.scale(&rat(-1)));
    }

    #[test]
    fn pullback_functorial_and_identity() {
        let f = sample_form(Dim::R8, 3, 11);
        let id = Mat::<Rat>::identity(8);
        assert_eq!(f.pullback(&id), f);
        let sigma = Mat::from_fn(8, 8, |i, j| {
            rat(((i * 3 + j * 5 + 1) % 4) as i64 - 1)
        });
        let tau = Mat::from_fn(8, 8, |i, j| rat(((i + 2 * j) % 3) as i64));
        // (sigma tau)^* = tau^* sigma^*
        let st = sigma.matmul(&tau);
        assert_eq!(f.pullback(&st), f.pullback(&sigma).pullback(&tau));
    }

    #[test]
    fn pullback_diag_scales() {
        let mut d = Mat::<Rat>::identity(8);
        d[(0, 0)] = rat(2);
        let f = KForm::<Rat>::monomial(Dim::R8, &[0, 1]);
        assert_eq!(f.pullback(&d), f.scale(&rat(2)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn star_star_sign(seed in 0u64..1000, k in 0usize..=8) {
            let m = MetricData::<Rat>::standard(Dim::R8);
            let f = sample_form(Dim::R8, k, seed);
            let ss = f.hodge_star(&m).hodge_star(&m);
            let sign = if (k * (8 - k)) % 2 == 0 { rat(1) } else { rat(-1) };
            prop_assert_eq!(ss, f.scale(&sign));
        }

        #[test]
        fn star_isometry(seed in 0u64..1000, k in 0usize..=8) {
            let m = MetricData::<Rat>::standard(Dim::R8);
            let a = sample_form(Dim::R8, k, seed);
            let b = sample_form(Dim::R8, k, seed.wrapping_add(77));
            prop_assert_eq!(a.hodge_star(&m).dot(&b.hodge_star(&m)), a.dot(&b));
        }

        #[test]
        fn inner_vol_is_wedge_star(seed in 0u64..1000, k in 0usize..=8) {
            let m = MetricData::<Rat>::standard(Dim::R8);
            let a = sample_form(Dim::R8, k, seed);
            let b = sample_form(Dim::R8, k, seed.wrapping_add(13));
            let lhs = m.volume_form().scale(&a.dot(&b));
            let rhs = a.wedge(&b.hodge_star(&m));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wedge_graded_commutative(sa in 0u64..500, sb in 0u64..500, p in 0usize..=4, q in 0usize..=4) {
            let a = sample_form(Dim::R8, p, sa);
            let b = sample_form(Dim::R8, q, sb);
            let ab = a.wedge(&b);
            let ba = b.wedge(&a);
            let sign = if (p * q) % 2 == 0 { rat(1) } else { rat(-1) };
            prop_assert_eq!(ab, ba.scale(&sign));
        }

        #[test]
        fn wedge_matches_naive(sa in 0u64..500, sb in 0u64..500, p in 1usize..=3, q in 1usize..=3) {
            let a = sample_form(Dim::R8, p, sa);
            let b = sample_form(Dim::R8, q, sb);
            prop_assert_eq!(a.wedge(&b), oracle::naive_wedge(&a, &b));
        }

        #[test]
        fn interior_antiderivation(sv in 0usize..8, sa in 0u64..500, sb in 0u64..500, p in 1usize..=3, q in 1usize..=3) {
            let a = sample_form(Dim::R8, p, sa);
            let b = sample_form(Dim::R8, q, sb);
            let lhs = a.wedge(&b).interior_basis(sv);
            let mut rhs = a.interior_basis(sv).wedge(&b);
            let t = a.wedge(&b.interior_basis(sv));
            rhs = if p % 2 == 0 { rhs.add_form(&t) } else { rhs.sub_form(&t) };
            prop_assert_eq!(lhs, rhs);
            // i(v) i(v) = 0
            prop_assert!(a.wedge(&b).interior_basis(sv).interior_basis(sv).is_zero());
        }

        #[test]
        fn interior_matches_naive(sv in 0usize..8, sa in 0u64..500, p in 1usize..=4) {
            let a = sample_form(Dim::R8, p, sa);
            prop_assert_eq!(a.interior_basis(sv), oracle::naive_interior(sv, &a));
        }

        #[test]
        fn pullback_respects_wedge(sa in 0u64..500, sb in 0u64..500) {
            let a = sample_form(Dim::R8, 2, sa);
            let b = sample_form(Dim::R8, 2, sb);
            let sigma = Mat::from_fn(8, 8, |i, j| rat(((i * 5 + j * 7 + sa as usize) % 5) as i64 - 2));
            prop_assert_eq!(
                a.wedge(&b).pullback(&sigma),
                a.pullback(&sigma).wedge(&b.pullback(&sigma))
            );
        }

        #[test]
        fn star_identities_with_vector(sv in 0usize..8, sa in 0u64..500, k in 1usize..=7) {
            // i(v) * a = (-1)^k * (v_flat ^ a);  *(i(v) a) = (-1)^{k+1} v_flat ^ *a
            let m = MetricData::<Rat>::standard(Dim::R8);
            let a = sample_form(Dim::R8, k, sa);
            let vflat = KForm::<Rat>::monomial(Dim::R8, &[sv]);
            let lhs1 = a.hodge_star(&m).interior_basis(sv);
            let rhs1 = vflat.wedge(&a).hodge_star(&m);
            let s1 = if k % 2 == 0 { rat(1) } else { rat(-1) };
            prop_assert_eq!(lhs1, rhs1.scale(&s1));
            let lhs2 = a.interior_basis(sv).hodge_star(&m);
            let rhs2 = vflat.wedge(&a.hodge_star(&m));
            let s2 = if (k + 1) % 2 == 0 { rat(1) } else { rat(-1) };
            prop_assert_eq!(lhs2, rhs2.scale(&s2));
        }
    }

    #[test]
    fn general_metric_star_consistency() {
        // conjugated metric: star_{sigma} = sigma^* o star o (sigma^{-1})^*
        let sigma = Mat::from_rows(vec![
            vec![rat(1), rat(1), rat(0), rat(0), rat(0), rat(0), rat(0), rat(0)],
            vec![rat(0), rat(2), rat(0), rat(0), rat(0), rat(0), rat(0), rat(0)],
            vec![rat(0), rat(0), rat(1), rat(0), rat(0), rat(0), rat(0), rat(1)],
            vec![rat(0), rat(0), rat(0), rat(1), rat(0), rat(0), rat(0), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(0), rat(1), rat(0), rat(0), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(1), rat(0), rat(1), rat(0), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(0), rat(0), rat(0), rat(1), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(0), rat(0), rat(0), rat(0), rat(1)],
        ]);
        let m = MetricData::from_conjugator(Dim::R8, &sigma);
        let std = MetricData::<Rat>::standard(Dim::R8);
        let sigma_inv = sigma.inverse().unwrap();
        for seed in 0..4u64 {
            for k in [1usize, 2, 4] {
                let f = sample_form(Dim::R8, k, seed);
                let lhs = f.hodge_star(&m);
                let rhs = f.pullback(&sigma_inv).hodge_star(&std).pullback(&sigma);
                assert_eq!(lhs, rhs, "k={} seed={}", k, seed);
            }
        }
    }

    #[test]
    fn r7_embedding_and_vol() {
        let m7 = MetricData::<Rat>::standard(Dim::R7);
        assert_eq!(m7.volume_form(), KForm::monomial(Dim::R7, &[1, 2, 3, 4, 5, 6, 7]));
        let f = KForm::<Rat>::monomial(Dim::R7, &[1, 2]);
        assert_eq!(f.embed_r8().restrict_r7(), f);
    }
}
