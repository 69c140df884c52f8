//! Infinitesimal variation of Spin(7)-structures: the maps j1, j2, j3 and
//! the derivative of the Hodge star along a metric path.
//!
//! For A in W^* (x) W^* (an 8x8 matrix A[i][j] = A(e_i, e_j)):
//!   j1(A) = sum_ij A[i][j] e^i ^ i(e_j) Phi,
//! which kills the Lambda^2_21 part and restricts to isomorphisms
//! R g -> L4_1, S^2_0 -> L4_35, L2_7 -> L4_7.
//!
//! j2(h) extends alpha |-> h^*(alpha, .)^flat as a degree-preserving
//! derivation; j3 pairs two p-forms into a symmetric 2-tensor. For a path
//! of structures with metric derivative 2h the Hodge star moves by
//!   d/dt *_t beta |_0 = *(-2 j2(h) beta + tr(h^sharp) beta).
//!
//! Everything here is for the standard base structure; conjugated
//! quantities come from pulling forms back first.

use crate::forms::{Dim, KForm, MetricData};
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::structures::{standard_phi4, Irrep, Spin7Structure};

/// Split a symmetric matrix into (trace scalar, traceless part):
/// h = (tr/8) g + h0.
pub fn trace_split<S: Scalar>(h: &Mat<S>) -> (S, Mat<S>) {
    assert!(h.is_square());
    let n = h.nrows();
    let tr = h.trace();
    let mean = tr.clone() / S::from_int(n as i64);
    let mut h0 = h.clone();
    for i in 0..n {
        h0[(i, i)] = h0[(i, i)].clone() - mean.clone();
    }
    (tr, h0)
}

/// Decomposition of a bilinear 2-tensor A into the four summands
/// (tr/8) g + A0 + A7 + A21 of R g + S^2_0 + L2_7 + L2_21.
pub struct BilinearSplit<S> {
    pub trace: S,
    pub sym0: Mat<S>,
    pub skew7: KForm<S>,
    pub skew21: KForm<S>,
}

pub fn bilinear_split<S: Scalar>(a: &Mat<S>, s: &Spin7Structure<S>) -> BilinearSplit<S> {
    assert!(s.is_standard(), "bilinear split is defined over the standard structure");
    let at = a.transpose();
    let sym = a.add(&at).scale(&S::from_ratio(1, 2));
    let skew = a.sub(&at).scale(&S::from_ratio(1, 2));
    let (trace, sym0) = trace_split(&sym);
    let skew_form = KForm::from_two_form_matrix(Dim::R8, &skew);
    BilinearSplit {
        trace,
        sym0,
        skew7: s.project(Irrep::L2_7, &skew_form),
        skew21: s.project(Irrep::L2_21, &skew_form),
    }
}

/// j1(A) = sum_ij A[i][j] e^i ^ i(e_j) Phi for the standard Phi.
pub fn j1<S: Scalar>(a: &Mat<S>) -> KForm<S> {
    assert_eq!((a.nrows(), a.ncols()), (8, 8));
    let phi4 = standard_phi4::<S>();
    let mut out: KForm<S> = KForm::zero(Dim::R8, 4);
    for j in 0..8 {
        let ij_phi = phi4.interior_basis(j);
        for i in 0..8 {
            let c = a[(i, j)].clone();
            if c.is_zero() {
                continue;
            }
            let ei = KForm::monomial(Dim::R8, &[i]);
            out = out.add_form(&ei.wedge(&ij_phi).scale(&c));
        }
    }
    out
}

/// j1 of a 2-form viewed as a bilinear tensor.
pub fn j1_of_form<S: Scalar>(f: &KForm<S>) -> KForm<S> {
    j1(&f.two_form_matrix())
}

/// j2(h)(a): the derivation extension of alpha |-> h^*(alpha, .)^flat. The
/// matrix argument is the replacement matrix in the standard basis
/// (e^a |-> sum_b h[a][b] e^b); for symmetric h over the standard metric
/// this is h itself. Works for arbitrary (not necessarily symmetric)
/// replacement matrices, which is what pullback derivatives need.
pub fn j2<S: Scalar>(h: &Mat<S>, a: &KForm<S>) -> KForm<S> {
    assert_eq!((h.nrows(), h.ncols()), (8, 8));
    assert_eq!(a.dim(), Dim::R8);
    let deg = a.degree();
    let mut out: KForm<S> = KForm::zero(Dim::R8, deg);
    if deg == 0 {
        return out;
    }
    for (tuple, c) in a.terms() {
        for pos in 0..deg {
            let slot = tuple[pos];
            for b in 0..8 {
                let coef = h[(slot, b)].clone();
                if coef.is_zero() {
                    continue;
                }
                // e^{t_0} ^ .. ^ e^b (at pos) ^ .. with resorting sign
                if tuple.iter().enumerate().any(|(q, &x)| q != pos && x == b) {
                    continue;
                }
                let mut seq = tuple.clone();
                seq[pos] = b;
                let mut sign = 1i32;
                let mut sorted = seq.clone();
                for x in 0..sorted.len() {
                    for y in x + 1..sorted.len() {
                        if sorted[x] > sorted[y] {
                            sorted.swap(x, y);
                            sign = -sign;
                        }
                    }
                }
                let term = c.clone() * coef;
                let mono: KForm<S> = KForm::monomial(Dim::R8, &sorted);
                out = out.add_form(&mono.scale(&if sign > 0 { term } else { S::zero() - term }));
            }
        }
    }
    out
}

/// j3(a (x) b) for p-forms a, b: the symmetric 2-tensor
/// sum_{j,k} (-1)^{j+k} <a_{without j}, b_{without k}> (a_j (x) b_k + b_k (x) a_j),
/// extended bilinearly over basis monomials.
pub fn j3<S: Scalar>(a: &KForm<S>, b: &KForm<S>) -> Mat<S> {
    assert_eq!(a.degree(), b.degree(), "degree mismatch in j3");
    assert_eq!(a.dim(), Dim::R8);
    let p = a.degree();
    let mut out: Mat<S> = Mat::zeros(8, 8);
    for (ta, ca) in a.terms() {
        for (tb, cb) in b.terms() {
            for jp in 0..p {
                let mut ia = ta.clone();
                let aj = ia.remove(jp);
                for kp in 0..p {
                    let mut ib = tb.clone();
                    let bk = ib.remove(kp);
                    if ia != ib {
                        continue;
                    }
                    let term = ca.clone() * cb.clone();
                    let signed = if (jp + kp) % 2 == 0 {
                        term
                    } else {
                        S::zero() - term
                    };
                    out[(aj, bk)] = out[(aj, bk)].clone() + signed.clone();
                    out[(bk, aj)] = out[(bk, aj)].clone() + signed;
                }
            }
        }
    }
    out
}

/// d/dt *_t beta |_0 = *(-2 j2(h) beta + tr(h^sharp) beta) along a path of
/// structures whose metric derivative is 2h (standard base point).
pub fn hodge_derivative<S: Scalar>(h: &Mat<S>, beta: &KForm<S>, m: &MetricData<S>) -> KForm<S> {
    assert!(m.is_standard(), "hodge derivative is taken at the standard metric");
    let tr = h.trace();
    let inner = j2(h, beta).scale(&S::from_int(-2)).add_form(&beta.scale(&tr));
    inner.hodge_star(m)
}

/// Finite-difference oracle for [`hodge_derivative`]: central differences of
/// *_{g + 2 t h} beta. Float only. With `richardson`, combines two step
/// sizes for an O(step^4) estimate.
pub fn hodge_derivative_fd(h: &Mat<f64>, beta: &KForm<f64>, step: f64, richardson: bool) -> KForm<f64> {
    let central = |d: f64| -> KForm<f64> {
        let star_at = |t: f64| -> KForm<f64> {
            let g = Mat::from_fn(8, 8, |i, j| {
                (if i == j { 1.0 } else { 0.0 }) + 2.0 * t * h[(i, j)]
            });
            let det = g.to_nalgebra().determinant();
            let m = MetricData::from_matrix(Dim::R8, g, det.sqrt());
            beta.hodge_star(&m)
        };
        star_at(d).sub_form(&star_at(-d)).scale(&(1.0 / (2.0 * d)))
    };
    if richardson {
        let d1 = central(step);
        let d2 = central(step / 2.0);
        d2.scale(&(4.0 / 3.0)).sub_form(&d1.scale(&(1.0 / 3.0)))
    } else {
        central(step)
    }
}

/// Finite-difference volume derivative: should equal tr(h^sharp) vol.
pub fn volume_derivative_fd(h: &Mat<f64>, step: f64) -> f64 {
    let vol = |t: f64| -> f64 {
        let g = Mat::from_fn(8, 8, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) + 2.0 * t * h[(i, j)]
        });
        g.to_nalgebra().determinant().sqrt()
    };
    (vol(step) - vol(-step)) / (2.0 * step)
}

/// The norm identity
/// <j1(A), j1(B)> = (7/2) tr(A#) tr(B#) + 4 tr(A0# B0#) - 16 tr(A7# B7#).
/// Returns (lhs, rhs); they agree exactly in rational mode.
pub fn j1_norm_sides<S: Scalar>(a: &Mat<S>, b: &Mat<S>, s: &Spin7Structure<S>) -> (S, S) {
    let lhs = j1(a).dot(&j1(b));
    let sa = bilinear_split(a, s);
    let sb = bilinear_split(b, s);
    let term1 = S::from_ratio(7, 2) * sa.trace.clone() * sb.trace.clone();
    let term2 = S::from_int(4) * sa.sym0.matmul(&sb.sym0).trace();
    // A7# in column convention is the transpose of the coefficient matrix;
    // tr(A7# B7#) is transpose-invariant, so the coefficient matrices serve.
    let a7 = sa.skew7.two_form_matrix();
    let b7 = sb.skew7.two_form_matrix();
    let term3 = S::from_int(16) * a7.matmul(&b7).trace();
    (lhs, term1 + term2 - term3)
}

/// The two identities of the pi35 lemma:
/// (j1 o j3)(*gamma (x) *gamma') = 6 <gamma, gamma'> Phi       (gammas in L2_7)
/// (j1 o j3)(*gamma (x) *delta)  = -4 pi435(gamma ^ delta)     (delta in L2_21)
/// Returns violated labels (exact in rational mode).
pub fn pi35_identities_check<S: Scalar>(
    gamma: &KForm<S>,
    gamma2: &KForm<S>,
    delta: &KForm<S>,
    s: &Spin7Structure<S>,
) -> Vec<&'static str> {
    let m = s.metric();
    let phi4 = standard_phi4::<S>();
    let mut bad = Vec::new();
    let lhs1 = j1(&j3(&gamma.hodge_star(m), &gamma2.hodge_star(m)));
    let rhs1 = phi4.scale(&(S::from_int(6) * gamma.dot(gamma2)));
    if lhs1 != rhs1 {
        bad.push("(j1 j3)(*g (x) *g') = 6 <g, g'> Phi");
    }
    let lhs2 = j1(&j3(&gamma.hodge_star(m), &delta.hodge_star(m)));
    let rhs2 = s
        .project(Irrep::L4_35, &gamma.wedge(delta))
        .scale(&S::from_int(-4));
    if lhs2 != rhs2 {
        bad.push("(j1 j3)(*g (x) *d) = -4 pi435(g ^ d)");
    }
    bad
}
