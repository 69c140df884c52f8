//! The linearized operators at a dDT solution and their kernels.
//!
//! For a real 2-form F,
//!   T_F(beta) = pi27(beta - *(F^2/2 ^ beta)),
//!   S_F(beta) = 2 pi47(F ^ beta).
//! On solutions of the first equation, ker T_F = (I + F#)^* Lambda^2_21
//! when *F^4/24 != 1, and ker T_F n ker S_F = (I + F#)^* Lambda^2_21
//! always; equivalently T_F factors as P_F o pi27 o ((I+F#)^{-1})^* with
//! P_F = T_F o (I+F#)^*|_{Lambda^2_7} invertible.
//!
//! With the iR-valued curvature convention of line-bundle connections, the
//! linearization of the deformation map at F_curv = i F is
//! delta(i b) = i T_F(d b); its principal symbol in a covector xi is
//! b |-> T_F(xi ^ b), assembled here as a 7x8 matrix in the unit
//! lambda^2 frame.
//!
//! The structure-direction linearization (varying Phi instead of the
//! connection) and the pointwise surjectivity obstruction of the generic
//! perturbation argument are also here.

use crate::ddt::{ddt_residual, standard_structure_f64};
use crate::forms::{basis_len, basis_mask, one_plus_sharp, pullback_matrix, tuple_of_mask, two_form_sharp, Dim, KForm, MetricData};
use crate::matrix::Mat;
use crate::scalar::Scalar;
use crate::structures::{lambda2_doubled, lambda4_scaled, standard_phi4, Irrep, Spin7Structure};
use crate::variation::{j1, j2, trace_split};

/// A dense operator matrix with labeled frames.
#[derive(Clone)]
pub struct LinOp<S> {
    pub mat: Mat<S>,
    pub domain: &'static str,
    pub codomain: &'static str,
}

impl<S: Scalar> LinOp<S> {
    pub fn to_csv(&self) -> String {
        self.mat.to_csv()
    }
}

/// Orthonormal frame vector of Lambda^2_7: lambda^2(e^mu) = (e^{0mu} + i(e_mu)varphi)/2.
pub fn l27_unit<S: Scalar>(mu: usize) -> KForm<S> {
    lambda2_doubled::<S>(mu).scale(&S::from_ratio(1, 2))
}

/// Coordinates of (the Lambda^2_7 part of) a 2-form in the unit frame.
pub fn l27_coords<S: Scalar>(f: &KForm<S>) -> Vec<S> {
    (1..=7).map(|mu| f.dot(&l27_unit::<S>(mu))).collect()
}

/// Rebuild a Lambda^2_7 form from unit-frame coordinates.
pub fn l27_from_coords<S: Scalar>(c: &[S]) -> KForm<S> {
    let mut f: KForm<S> = KForm::zero(Dim::R8, 2);
    for (k, v) in c.iter().enumerate() {
        f = f.add_form(&l27_unit::<S>(k + 1).scale(v));
    }
    f
}

/// Direct evaluation of T_F.
pub fn t_apply<S: Scalar>(f: &KForm<S>, beta: &KForm<S>, s: &Spin7Structure<S>) -> KForm<S> {
    let m = s.metric();
    let half_f2 = f.wedge(f).scale(&S::from_ratio(1, 2));
    s.project(Irrep::L2_7, &beta.sub_form(&half_f2.wedge(beta).hodge_star(m)))
}

/// Direct evaluation of S_F.
pub fn s_apply<S: Scalar>(f: &KForm<S>, beta: &KForm<S>, s: &Spin7Structure<S>) -> KForm<S> {
    s.project(Irrep::L4_7, &f.wedge(beta)).scale(&S::from_int(2))
}

/// T_F as a 7x28 matrix: row mu = <T_F(e^I), lambda^2(e^mu)> over the
/// monomial basis of Lambda^2 (unit lambda^2 frame).
pub fn build_t<S: Scalar>(f: &KForm<S>) -> LinOp<S> {
    let m = MetricData::<S>::standard(Dim::R8);
    let half_f2 = f.wedge(f).scale(&S::from_ratio(1, 2));
    let n = basis_len(Dim::R8, 2);
    let units: Vec<KForm<S>> = (1..=7).map(l27_unit::<S>).collect();
    let mut mat = Mat::zeros(7, n);
    for col in 0..n {
        let e: KForm<S> = KForm::monomial(Dim::R8, &tuple_of_mask(basis_mask(Dim::R8, 2, col)));
        let img = e.sub_form(&half_f2.wedge(&e).hodge_star(&m));
        for (row, u) in units.iter().enumerate() {
            mat[(row, col)] = img.dot(u);
        }
    }
    LinOp {
        mat,
        domain: "Lambda^2 (monomials)",
        codomain: "Lambda^2_7 (unit lambda^2 frame)",
    }
}

/// S_F as a 7x28 matrix: row mu = <2 F ^ e^I, sqrt8 lambda^4(e^mu)>
/// (scaled lambda^4 frame; kernel and rank are frame-independent).
pub fn build_s<S: Scalar>(f: &KForm<S>) -> LinOp<S> {
    let n = basis_len(Dim::R8, 2);
    let lam4: Vec<KForm<S>> = (1..=7).map(lambda4_scaled::<S>).collect();
    let mut mat = Mat::zeros(7, n);
    for col in 0..n {
        let e: KForm<S> = KForm::monomial(Dim::R8, &tuple_of_mask(basis_mask(Dim::R8, 2, col)));
        let img = f.wedge(&e).scale(&S::from_int(2));
        for (row, l) in lam4.iter().enumerate() {
            mat[(row, col)] = img.dot(l);
        }
    }
    LinOp {
        mat,
        domain: "Lambda^2 (monomials)",
        codomain: "Lambda^4_7 (sqrt8 lambda^4 frame)",
    }
}

/// Kernel data of an operator matrix.
pub struct KernelReport<S> {
    pub dimension: usize,
    pub basis: Vec<Vec<S>>,
    /// Largest principal-angle sine against a reference subspace, when one
    /// was supplied.
    pub comparison: Option<f64>,
}

/// Nullspace: exact elimination in rational mode, SVD threshold in float
/// mode (`tol_rank` relative to the largest singular value).
pub fn kernel<S: Scalar>(op: &LinOp<S>, tol_rank: f64) -> KernelReport<S> {
    let basis = if S::EXACT {
        op.mat.nullspace(0.0)
    } else {
        // route through f64 SVD and map back
        let f = op.mat.map_to_f64();
        f.nullspace_svd(tol_rank)
            .into_iter()
            .map(|v| v.into_iter().map(|x| float_to_s::<S>(x)).collect())
            .collect()
    };
    KernelReport {
        dimension: basis.len(),
        basis,
        comparison: None,
    }
}

fn float_to_s<S: Scalar>(x: f64) -> S {
    // only used in float mode where S = f64; the round-trip through a
    // rational here would be lossy, so rational mode never calls this
    assert!(!S::EXACT);
    let mut v = S::zero();
    // reconstruct via ratio of scaled integers to stay within the trait
    let scaled = (x * 1e18).round() as i64;
    v = v + S::from_ratio(scaled, 1_000_000_000_000_000_000);
    v
}

/// The image subspace (I + F#)^* Lambda^2_21 as a 28 x 21 matrix of
/// coefficient columns.
pub fn pulled_l221_basis(f: &KForm<f64>) -> Mat<f64> {
    let sigma = one_plus_sharp(f, &MetricData::standard(Dim::R8));
    let basis = crate::cartan::lambda221_basis_rat();
    let mut m = Mat::zeros(28, 21);
    for (j, b) in basis.iter().enumerate() {
        let col = b.map_to_f64().pullback(&sigma);
        for (i, c) in col.coeff_vec().into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    m
}

/// Largest principal-angle sine between the column span of `a` and of `b`,
/// computed as the norm of the projection residual (I - Qa Qa^T) Qb to
/// avoid the sqrt(1 - sigma^2) cancellation at machine-precision angles.
pub fn subspace_distance(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let qa = orthonormal_columns(a).to_nalgebra();
    let qb = orthonormal_columns(b).to_nalgebra();
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    let resid = &qb - &qa * (qa.transpose() * &qb);
    resid.svd(false, false).singular_values.max()
}

fn orthonormal_columns(a: &Mat<f64>) -> Mat<f64> {
    let qr = a.to_nalgebra().qr();
    let q = qr.q();
    Mat::from_nalgebra(&q)
}

/// Kernel of T_F with the comparison against (I + F#)^* Lambda^2_21.
pub fn kernel_t_with_comparison(f: &KForm<f64>, tol_rank: f64) -> KernelReport<f64> {
    let op = build_t(f);
    let mut rep = kernel(&op, tol_rank);
    if rep.dimension == 21 {
        let mut km = Mat::zeros(28, 21);
        for (j, v) in rep.basis.iter().enumerate() {
            for i in 0..28 {
                km[(i, j)] = v[i];
            }
        }
        rep.comparison = Some(subspace_distance(&km, &pulled_l221_basis(f)));
    }
    rep
}

/// Kernel of (T_F, S_F) stacked, compared against (I + F#)^* Lambda^2_21.
pub fn kernel_ts_with_comparison(f: &KForm<f64>, tol_rank: f64) -> KernelReport<f64> {
    let t = build_t(f);
    let s = build_s(f);
    let op = LinOp {
        mat: t.mat.vstack(&s.mat),
        domain: "Lambda^2 (monomials)",
        codomain: "Lambda^2_7 + Lambda^4_7",
    };
    let mut rep = kernel(&op, tol_rank);
    if rep.dimension == 21 {
        let mut km = Mat::zeros(28, 21);
        for (j, v) in rep.basis.iter().enumerate() {
            for i in 0..28 {
                km[(i, j)] = v[i];
            }
        }
        rep.comparison = Some(subspace_distance(&km, &pulled_l221_basis(f)));
    }
    rep
}

/// P_F = T_F o (I + F#)^*|_{Lambda^2_7} as a 7x7 matrix in the unit frame.
pub fn build_p<S: Scalar>(f: &KForm<S>) -> LinOp<S> {
    let s = Spin7Structure::<S>::standard();
    let m = s.metric();
    let sigma = one_plus_sharp(f, m);
    let mut mat = Mat::zeros(7, 7);
    for nu in 1..=7 {
        let img = t_apply(f, &l27_unit::<S>(nu).pullback(&sigma), &s);
        let coords = l27_coords(&img);
        for mu in 0..7 {
            mat[(mu, nu - 1)] = coords[mu].clone();
        }
    }
    LinOp {
        mat,
        domain: "Lambda^2_7 (unit frame)",
        codomain: "Lambda^2_7 (unit frame)",
    }
}

/// Q_F = (T_F, S_F) o (I + F#)^*|_{Lambda^2_7} as a stacked 14x7 matrix.
pub fn build_q<S: Scalar>(f: &KForm<S>) -> LinOp<S> {
    let s = Spin7Structure::<S>::standard();
    let m = s.metric();
    let sigma = one_plus_sharp(f, m);
    let lam4: Vec<KForm<S>> = (1..=7).map(lambda4_scaled::<S>).collect();
    let mut mat = Mat::zeros(14, 7);
    for nu in 1..=7 {
        let pulled = l27_unit::<S>(nu).pullback(&sigma);
        let timg = t_apply(f, &pulled, &s);
        let coords = l27_coords(&timg);
        let simg = f.wedge(&pulled).scale(&S::from_int(2));
        for mu in 0..7 {
            mat[(mu, nu - 1)] = coords[mu].clone();
            mat[(7 + mu, nu - 1)] = simg.dot(&lam4[mu]);
        }
    }
    LinOp {
        mat,
        domain: "Lambda^2_7 (unit frame)",
        codomain: "Lambda^2_7 + Lambda^4_7",
    }
}

/// Condition number of P_F (float).
pub fn p_condition(f: &KForm<f64>) -> f64 {
    let p = build_p(f);
    let svd = p.mat.to_nalgebra().svd(false, false);
    let max = svd.singular_values.max();
    let min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    max / min
}

/// Max residual of the factorization T_F = P_F o pi27 o ((I+F#)^{-1})^*
/// over the 28 monomial probes.
pub fn factorization_residual(f: &KForm<f64>) -> f64 {
    let s = standard_structure_f64();
    let m = s.metric();
    let sigma = one_plus_sharp(f, m);
    let sigma_inv = sigma.inverse().expect("I + F# is invertible");
    let p = build_p(f);
    let mut worst = 0.0f64;
    for col in 0..basis_len(Dim::R8, 2) {
        let e: KForm<f64> = KForm::monomial(Dim::R8, &tuple_of_mask(basis_mask(Dim::R8, 2, col)));
        let lhs = t_apply(f, &e, s);
        let pulled = s.project(Irrep::L2_7, &e.pullback(&sigma_inv));
        let rhs = l27_from_coords(&p.mat.matvec(&l27_coords(&pulled)));
        worst = worst.max(lhs.sub_form(&rhs).norm_f64());
    }
    worst
}

/// Principal symbol of the linearized deformation operator in covector xi:
/// the 7x8 matrix of b |-> T_F(xi ^ b) in the unit lambda^2 frame.
pub fn symbol_delta(f: &KForm<f64>, xi: &KForm<f64>) -> LinOp<f64> {
    assert_eq!(xi.degree(), 1);
    let s = standard_structure_f64();
    let mut mat = Mat::zeros(7, 8);
    for b in 0..8 {
        let eb: KForm<f64> = KForm::monomial(Dim::R8, &[b]);
        let img = t_apply(f, &xi.wedge(&eb), s);
        for (mu, c) in l27_coords(&img).into_iter().enumerate() {
            mat[(mu, b)] = c;
        }
    }
    LinOp {
        mat,
        domain: "Lambda^1",
        codomain: "Lambda^2_7 (unit frame)",
    }
}

/// The same symbol through the factorized route
/// P_F o pi27 o ((I+F#)^{-1})^* o (xi ^ .).
pub fn symbol_delta_factorized(f: &KForm<f64>, xi: &KForm<f64>) -> LinOp<f64> {
    let s = standard_structure_f64();
    let sigma = one_plus_sharp(f, s.metric());
    let sigma_inv = sigma.inverse().expect("invertible");
    let p = build_p(f);
    let mut mat = Mat::zeros(7, 8);
    for b in 0..8 {
        let eb: KForm<f64> = KForm::monomial(Dim::R8, &[b]);
        let pulled = s.project(Irrep::L2_7, &xi.wedge(&eb).pullback(&sigma_inv));
        let col = p.mat.matvec(&l27_coords(&pulled));
        for (mu, c) in col.into_iter().enumerate() {
            mat[(mu, b)] = c;
        }
    }
    LinOp {
        mat,
        domain: "Lambda^1",
        codomain: "Lambda^2_7 (unit frame)",
    }
}

/// Closed-form linearization in the structure direction j1(A), A = h + beta
/// (h symmetric, beta in Lambda^2_7), at a solution F of the first
/// equation:
/// 4 delta = *((F - *F^3/6) ^ j1(A)) + tr(h)(-F - *((*F^3) ^ Phi)/6)
///         + 2 *( j2(h)(*F) + *( j2(h)(F^3) ) ^ Phi / 6 ).
pub fn structure_direction_linearization(
    f: &KForm<f64>,
    h: &Mat<f64>,
    beta7: &KForm<f64>,
) -> KForm<f64> {
    let s = standard_structure_f64();
    let m = s.metric();
    let phi4 = standard_phi4::<f64>();
    let a_tensor = h.add(&beta7.two_form_matrix());
    let f3 = f.wedge(f).wedge(f);
    let star_f3 = f3.hodge_star(m);
    let (tr, _) = trace_split(h);

    let core = f.sub_form(&star_f3.scale(&(1.0 / 6.0)));
    let term1 = core.wedge(&j1(&a_tensor)).hodge_star(m);
    let term2 = f
        .add_form(&star_f3.wedge(&phi4).hodge_star(m).scale(&(1.0 / 6.0)))
        .neg_form()
        .scale(&tr);
    let inner = j2(h, &f.hodge_star(m)).add_form(
        &j2(h, &f3)
            .hodge_star(m)
            .wedge(&phi4)
            .scale(&(1.0 / 6.0)),
    );
    let term3 = inner.hodge_star(m).scale(&2.0);
    term1.add_form(&term2).add_form(&term3).scale(&0.25)
}

/// Finite-difference oracle for the structure-direction linearization:
/// central differences of Phi_t |-> pi^2_{7,Phi_t}(F - *_t F^3/6) along the
/// honest conjugator path sigma_t = exp(t (h + beta#)), whose derivative
/// at t = 0 is exactly j1(h + beta).
pub fn structure_direction_fd(
    f: &KForm<f64>,
    h: &Mat<f64>,
    beta7: &KForm<f64>,
    step: f64,
) -> KForm<f64> {
    let m = MetricData::<f64>::standard(Dim::R8);
    let b = h.add(&two_form_sharp(beta7, &m));
    let p27_std = &standard_structure_f64().projectors().p2_7;
    let residual_at = |t: f64| -> KForm<f64> {
        let sigma = crate::cartan::matrix_exp(&b.scale(&t));
        let sigma_inv = sigma.inverse().expect("invertible");
        let mt = MetricData::from_conjugator(Dim::R8, &sigma);
        // pi^2_{7,sigma} = sigma^* o pi27 o (sigma^{-1})^*
        let fwd = pullback_matrix(Dim::R8, 2, &sigma);
        let bwd = pullback_matrix(Dim::R8, 2, &sigma_inv);
        let p27 = fwd.matmul(p27_std).matmul(&bwd);
        let f3 = f.wedge(f).wedge(f);
        let arg = f.sub_form(&f3.hodge_star(&mt).scale(&(1.0 / 6.0)));
        KForm::from_coeff_vec(Dim::R8, 2, p27.matvec(&arg.coeff_vec()))
    };
    residual_at(step)
        .sub_form(&residual_at(-step))
        .scale(&(1.0 / (2.0 * step)))
}

/// The stacked pointwise obstruction system over gamma in Lambda^2_7:
/// pi41(F ^ gamma) = 0, pi47((6F - *F^3) ^ gamma) = 0,
/// pi435((6F + *F^3) ^ gamma) = 0; returns its kernel.
pub fn surjectivity_obstruction(f: &KForm<f64>, tol_rank: f64) -> KernelReport<f64> {
    let op = obstruction_matrix(f);
    kernel(
        &LinOp {
            mat: op,
            domain: "Lambda^2_7 (unit frame)",
            codomain: "stacked obstruction rows",
        },
        tol_rank,
    )
}

pub fn obstruction_matrix(f: &KForm<f64>) -> Mat<f64> {
    let s = standard_structure_f64();
    let m = s.metric();
    let phi4 = standard_phi4::<f64>();
    let f3 = f.wedge(f).wedge(f);
    let star_f3 = f3.hodge_star(m);
    let six_minus = f.scale(&6.0).sub_form(&star_f3);
    let six_plus = f.scale(&6.0).add_form(&star_f3);
    let lam4: Vec<KForm<f64>> = (1..=7).map(lambda4_scaled::<f64>).collect();
    // rows: 1 (pi41) + 7 (pi47 frame) + 70 (pi435 coefficients)
    let mut mat = Mat::zeros(1 + 7 + basis_len(Dim::R8, 4), 7);
    for nu in 1..=7 {
        let u = l27_unit::<f64>(nu);
        mat[(0, nu - 1)] = f.wedge(&u).dot(&phi4);
        let w7 = six_minus.wedge(&u);
        for mu in 0..7 {
            mat[(1 + mu, nu - 1)] = w7.dot(&lam4[mu]);
        }
        let w35 = s.project(Irrep::L4_35, &six_plus.wedge(&u));
        for (i, c) in w35.coeff_vec().into_iter().enumerate() {
            mat[(8 + i, nu - 1)] = c;
        }
    }
    mat
}

/// The closed T'-system (paper-normalized rows
/// <B - *(F^2/2 ^ B), 2 lambda^2(e^mu)> with B = (I+F#)^*(2 lambda^2(eta))
/// for F = C1 e01 + C2 e23 + C3 e45 + C4 e67). T'_1 includes the
/// unconditional correction term -(sum C) xi(C), which vanishes on
/// solutions.
pub fn t_prime_closed<S: Scalar>(c: &[S; 4], eta: &[S; 7]) -> [S; 7] {
    let [c1, c2, c3, c4] = c.clone();
    let one = S::one();
    let prod = c1.clone() * c2.clone() * c3.clone() * c4.clone();
    let sum_pairs = c1.clone() * c2.clone()
        + c1.clone() * c3.clone()
        + c1.clone() * c4.clone()
        + c2.clone() * c3.clone()
        + c2.clone() * c4.clone()
        + c3.clone() * c4.clone();
    let sum = c1.clone() + c2.clone() + c3.clone() + c4.clone();
    let e3 = c1.clone() * c2.clone() * c3.clone()
        + c1.clone() * c2.clone() * c4.clone()
        + c1.clone() * c3.clone() * c4.clone()
        + c2.clone() * c3.clone() * c4.clone();
    let xi = e3 - sum.clone();
    let four = S::from_int(4);
    let two = S::from_int(2);

    let brace23 = (c1.clone() * c2.clone() - one.clone()) * (c3.clone() + c4.clone())
        + (c1.clone() + c2.clone()) * (one.clone() - c3.clone() * c4.clone());
    let brace45 = (c1.clone() * c2.clone() + one.clone()) * (c3.clone() - c4.clone())
        + (c1.clone() - c2.clone()) * (c3.clone() * c4.clone() + one.clone());
    let brace67 = (c1.clone() * c2.clone() + one.clone()) * (c4.clone() - c3.clone())
        + (c1.clone() - c2.clone()) * (c3.clone() * c4.clone() + one.clone());
    let d23 = (c1.clone() * c2.clone() - one.clone()) * (c3.clone() * c4.clone() - one.clone());
    let d45 = (c1.clone() * c3.clone() - one.clone()) * (c2.clone() * c4.clone() - one.clone());
    let d67 = (c1.clone() * c4.clone() - one.clone()) * (c2.clone() * c3.clone() - one.clone());

    [
        (four.clone() * (prod - sum_pairs + one) - sum * xi) * eta[0].clone(),
        four.clone() * d23.clone() * eta[1].clone() + two.clone() * brace23.clone() * eta[2].clone(),
        S::zero() - two.clone() * brace23 * eta[1].clone() + four.clone() * d23 * eta[2].clone(),
        four.clone() * d45.clone() * eta[3].clone() + two.clone() * brace45.clone() * eta[4].clone(),
        S::zero() - two.clone() * brace45 * eta[3].clone() + four.clone() * d45 * eta[4].clone(),
        four.clone() * d67.clone() * eta[5].clone() + two.clone() * brace67.clone() * eta[6].clone(),
        S::zero() - two * brace67 * eta[5].clone() + four * d67 * eta[6].clone(),
    ]
}

/// The closed S'-system (rows <F ^ B, sqrt8 lambda^4(e^mu)>).
pub fn s_prime_closed<S: Scalar>(c: &[S; 4], eta: &[S; 7]) -> [S; 7] {
    let [c1, c2, c3, c4] = c.clone();
    let one = S::one();
    let four = S::from_int(4);
    let two = S::from_int(2);
    let brace23 = (c1.clone() * c2.clone() - one.clone()) * (c3.clone() + c4.clone())
        + (c1.clone() + c2.clone()) * (one.clone() - c3.clone() * c4.clone());
    let brace45 = (c1.clone() * c2.clone() + one.clone()) * (c3.clone() - c4.clone())
        + (c1.clone() - c2.clone()) * (c3.clone() * c4.clone() + one.clone());
    let brace67 = (c1.clone() * c2.clone() + one.clone()) * (c4.clone() - c3.clone())
        + (c1.clone() - c2.clone()) * (c3.clone() * c4.clone() + one.clone());
    let s23 = (c1.clone() + c2.clone()) * (c3.clone() + c4.clone());
    let s45 = (c1.clone() + c3.clone()) * (c2.clone() + c4.clone());
    let s67 = (c1.clone() + c4.clone()) * (c2.clone() + c3.clone());
    [
        S::zero(),
        S::zero() - four.clone() * s23.clone() * eta[1].clone() - two.clone() * brace23.clone() * eta[2].clone(),
        two.clone() * brace23 * eta[1].clone() - four.clone() * s23 * eta[2].clone(),
        S::zero() - four.clone() * s45.clone() * eta[3].clone() - two.clone() * brace45.clone() * eta[4].clone(),
        two.clone() * brace45 * eta[3].clone() - four.clone() * s45 * eta[4].clone(),
        S::zero() - four.clone() * s67.clone() * eta[5].clone() - two.clone() * brace67.clone() * eta[6].clone(),
        two * brace67 * eta[5].clone() - four * s67 * eta[6].clone(),
    ]
}

/// Numeric T'/S' rows: evaluate the defining inner products for
/// F = sum C_j e^{pair_j} on the input eta.
pub fn t_s_prime_numeric<S: Scalar>(c: &[S; 4], eta: &[S; 7]) -> ([S; 7], [S; 7]) {
    let m = MetricData::<S>::standard(Dim::R8);
    let f = crate::cartan::cartan_form(c);
    let sigma = one_plus_sharp(&f, &m);
    let mut b: KForm<S> = KForm::zero(Dim::R8, 2);
    for (j, e) in eta.iter().enumerate() {
        b = b.add_form(&lambda2_doubled::<S>(j + 1).scale(e));
    }
    let b = b.pullback(&sigma);
    let half_f2 = f.wedge(&f).scale(&S::from_ratio(1, 2));
    let t_arg = b.sub_form(&half_f2.wedge(&b).hodge_star(&m));
    let fb = f.wedge(&b);
    let mut t_rows = core::array::from_fn(|_| S::zero());
    let mut s_rows: [S; 7] = core::array::from_fn(|_| S::zero());
    for mu in 1..=7 {
        t_rows[mu - 1] = t_arg.dot(&lambda2_doubled::<S>(mu));
        s_rows[mu - 1] = fb.dot(&lambda4_scaled::<S>(mu));
    }
    (t_rows, s_rows)
}

/// Report of the kernel theorem verification at a solution F.
pub struct KernelTheoremReport {
    pub dim_ker_t: usize,
    pub dist_t: Option<f64>,
    pub dim_ker_ts: usize,
    pub dist_ts: Option<f64>,
    pub quartic: f64,
}

pub fn verify_kernel_theorem(f: &KForm<f64>, tol_rank: f64) -> KernelTheoremReport {
    let s = standard_structure_f64();
    let res = ddt_residual(f, s);
    let t = kernel_t_with_comparison(f, tol_rank);
    let ts = kernel_ts_with_comparison(f, tol_rank);
    KernelTheoremReport {
        dim_ker_t: t.dimension,
        dist_t: t.comparison,
        dim_ker_ts: ts.dimension,
        dist_ts: ts.comparison,
        quartic: res.quartic,
    }
}

/// Expected row values of the stacked obstruction system for a normal-form
/// solution with C_j = alpha_1 + mu_j (the eta-system of the pointwise
/// obstruction lemma). Returns the labels of mismatching blocks.
pub fn obstruction_eta_system_check(c: &[f64; 4], tol: f64) -> Vec<&'static str> {
    let f = crate::cartan::cartan_form(c);
    let mat = obstruction_matrix(&f);
    let [c1, c2, c3, c4] = *c;
    let mut bad = Vec::new();

    // pi41 row: 3 (sum C) on eta_1, zero elsewhere
    let sum = c1 + c2 + c3 + c4;
    if (mat[(0, 0)] - 1.5 * sum).abs() > tol {
        bad.push("pi41 eta1 coefficient");
    }
    if (1..7).any(|j| mat[(0, j)].abs() > tol) {
        bad.push("pi41 off-eta1 coefficients");
    }

    // pi47 block: one nonzero row per eta in the paired lambda^4 slot
    let p23 = (c1 * c2 - 1.0) * (c3 + c4) + (c1 + c2) * (1.0 - c3 * c4);
    let p45 = (c1 * c2 + 1.0) * (c3 - c4) + (c1 - c2) * (c3 * c4 + 1.0);
    let p67 = (c1 * c2 + 1.0) * (c4 - c3) + (c1 - c2) * (c3 * c4 + 1.0);
    let expect47: [(usize, usize, f64); 6] = [
        (2, 3, 6.0 * p23),
        (3, 2, -6.0 * p23),
        (4, 5, 6.0 * p45),
        (5, 4, -6.0 * p45),
        (6, 7, 6.0 * p67),
        (7, 6, -6.0 * p67),
    ];
    for (eta, mu, val) in expect47 {
        if (mat[(mu, eta - 1)] - val).abs() > tol {
            bad.push("pi47 block");
            break;
        }
    }

    // pi435 rows for eta_1: +-3 x the three on4pt1 braces on the pair monomials
    let brace1 = (c1 + c2) * (c3 * c4 + 1.0) - (c3 + c4) * (c1 * c2 + 1.0);
    let brace2 = (c1 + c3) * (c2 * c4 + 1.0) - (c2 + c4) * (c1 * c3 + 1.0);
    let brace3 = (c1 + c4) * (c2 * c3 + 1.0) - (c2 + c3) * (c1 * c4 + 1.0);
    let pair_row = |pair: &[usize]| -> usize {
        let target: u16 = pair.iter().map(|&i| 1u16 << i).sum();
        8 + (0..basis_len(Dim::R8, 4))
            .position(|p| basis_mask(Dim::R8, 4, p) == target)
            .unwrap()
    };
    let expected35: [(Vec<usize>, f64); 6] = [
        (vec![0, 1, 2, 3], 1.5 * brace1),
        (vec![0, 1, 4, 5], 1.5 * brace2),
        (vec![0, 1, 6, 7], 1.5 * brace3),
        (vec![2, 3, 4, 5], -1.5 * brace3),
        (vec![2, 3, 6, 7], -1.5 * brace2),
        (vec![4, 5, 6, 7], -1.5 * brace1),
    ];
    for (pair, val) in &expected35 {
        if (mat[(pair_row(pair), 0)] - val).abs() > tol {
            bad.push("pi435 eta1 rows");
            break;
        }
    }

    // pi435 rows for eta_2, eta_4, eta_6: the on4pt2 product pairs
    let on4pt2: [(usize, Vec<usize>, f64); 6] = [
        (2, vec![0, 1, 4, 6], -1.5 * (c1 - c2) * (c3 * c4 - 1.0)),
        (2, vec![0, 2, 4, 5], -1.5 * (c3 - c4) * (c1 * c2 - 1.0)),
        (4, vec![0, 1, 2, 6], 1.5 * (c1 - c3) * (c2 * c4 - 1.0)),
        (4, vec![0, 2, 3, 4], -1.5 * (c2 - c4) * (c1 * c3 - 1.0)),
        (6, vec![0, 1, 2, 4], -1.5 * (c1 - c4) * (c2 * c3 - 1.0)),
        (6, vec![0, 2, 3, 6], -1.5 * (c2 - c3) * (c1 * c4 - 1.0)),
    ];
    for (eta, pair, val) in &on4pt2 {
        if (mat[(pair_row(pair), eta - 1)] - val).abs() > tol {
            bad.push("pi435 on4pt2 rows");
            break;
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddt::{quartic_value, sample_generic_solution, sample_solution, CaseId, SampleOptions};
    use crate::scalar::{rat, ratio, Rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn omega() -> KForm<f64> {
        lambda2_doubled::<f64>(1)
    }

    #[test]
    fn t_at_zero_is_projection() {
        let zero: KForm<Rat> = KForm::zero(Dim::R8, 2);
        let t = build_t(&zero);
        assert_eq!(t.mat.rank(0.0), 7);
        let k = kernel(&t, 1e-8);
        assert_eq!(k.dimension, 21);
        let s = build_s(&zero);
        assert!(s.mat.rank(0.0) == 0);
    }

    #[test]
    fn t_matrix_agrees_with_direct_evaluation() {
        let s = crate::ddt::standard_structure_rat();
        let f = crate::ddt::reconstruct::<Rat>(
            &[ratio(1, 2), rat(0), rat(0), rat(0)],
            &[rat(-1), rat(0), rat(0), rat(1)],
        );
        let t = build_t(&f);
        for col in [0usize, 5, 13, 27] {
            let e: KForm<Rat> =
                KForm::monomial(Dim::R8, &tuple_of_mask(basis_mask(Dim::R8, 2, col)));
            let direct = t_apply(&f, &e, s);
            let coords = l27_coords(&direct);
            for mu in 0..7 {
                assert_eq!(t.mat[(mu, col)], coords[mu], "col {} mu {}", col, mu);
            }
        }
    }

    #[test]
    fn t_omega_on_omega() {
        // omega^3 = 6 * omega, so *(omega^2/2 ^ omega) = 3 omega and
        // T_omega(omega) = pi27(-2 omega) = -2 omega: the eta_1 direction
        // is NOT in the kernel (T1' = -16 at C = (1,1,1,1)); the
        // 27-dimensional kernel consists of the other directions.
        let s = standard_structure_f64();
        let img = t_apply(&omega(), &omega(), s);
        assert!(img.add_form(&omega().scale(&2.0)).norm_f64() < 1e-12);
    }

    #[test]
    fn kernel_dimensions_at_special_points() {
        // generic case-(1) solution with quartic != 1: dim ker = 21
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let opts = SampleOptions::default();
        let f = sample_generic_solution(&mut rng, &opts);
        let rep = kernel_t_with_comparison(&f, 1e-8);
        assert_eq!(rep.dimension, 21);
        assert!(rep.comparison.unwrap() < 1e-8, "distance {:e}", rep.comparison.unwrap());
        // omega: quartic = 1, kernel jumps to 27
        let rep = kernel_t_with_comparison(&omega(), 1e-8);
        assert_eq!(rep.dimension, 27);
        // but ker T n ker S stays 21 even at omega
        let rep = kernel_ts_with_comparison(&omega(), 1e-8);
        assert_eq!(rep.dimension, 21);
        assert!(rep.comparison.unwrap() < 1e-8);
    }

    #[test]
    fn exact_kernel_of_t_omega_in_rational_mode() {
        let om = lambda2_doubled::<Rat>(1);
        let t = build_t(&om);
        let k = kernel(&t, 0.0);
        assert_eq!(k.dimension, 27);
    }

    #[test]
    fn factorization_and_conditioning() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let opts = SampleOptions::default();
        for _ in 0..3 {
            let f = sample_generic_solution(&mut rng, &opts);
            assert!(factorization_residual(&f) < 1e-9);
            assert!(p_condition(&f).is_finite());
        }
        // F = 0: P = identity
        let p0 = build_p(&KForm::<f64>::zero(Dim::R8, 2));
        assert!(p0.mat.sub(&Mat::identity(7)).max_abs() < 1e-12);
    }

    #[test]
    fn t_s_prime_systems_match_closed_forms_exactly() {
        // random rational C and eta: assembled rows equal the closed
        // polynomials (T1' carries the unconditional xi correction)
        for seed in 0..12i64 {
            let c = [
                ratio(seed % 5 - 2, 2),
                ratio((seed * 3) % 7 - 3, 4),
                ratio((seed * 5) % 9 - 4, 3),
                ratio((seed * 7) % 11 - 5, 5),
            ];
            let eta: [Rat; 7] = core::array::from_fn(|k| ratio((seed + k as i64) % 5 - 2, 3));
            let (t_num, s_num) = t_s_prime_numeric(&c, &eta);
            let t_cl = t_prime_closed(&c, &eta);
            let s_cl = s_prime_closed(&c, &eta);
            for mu in 0..7 {
                assert_eq!(t_num[mu], t_cl[mu], "T' row {} seed {}", mu + 1, seed);
                assert_eq!(s_num[mu], s_cl[mu], "S' row {} seed {}", mu + 1, seed);
            }
        }
    }

    #[test]
    fn t_prime_eta1_coefficient_at_omega() {
        // C = (1,1,1,1): T1' = 4 eta1 (1 - 6 + 1) = -16 eta1; eta2..eta7 rows vanish
        let c = [rat(1), rat(1), rat(1), rat(1)];
        let eta: [Rat; 7] = core::array::from_fn(|_| rat(1));
        let t = t_prime_closed(&c, &eta);
        assert_eq!(t[0], rat(-16));
        for row in &t[1..] {
            assert_eq!(row, &rat(0));
        }
    }

    #[test]
    fn symbol_direct_vs_factorized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let opts = SampleOptions::default();
        let f = sample_generic_solution(&mut rng, &opts);
        for trial in 0..4 {
            let xi = KForm::from_coeff_vec(
                Dim::R8,
                1,
                (0..8).map(|_| rng.random_range(-1.0..1.0)).collect(),
            );
            let a = symbol_delta(&f, &xi);
            let b = symbol_delta_factorized(&f, &xi);
            assert!(a.mat.sub(&b.mat).max_abs() < 1e-9, "trial {}", trial);
        }
        // zero covector: zero map
        let z = symbol_delta(&f, &KForm::zero(Dim::R8, 1));
        assert!(z.mat.max_abs() == 0.0);
        // F = 0, xi = e0: rank 7
        let s0 = symbol_delta(&KForm::zero(Dim::R8, 2), &KForm::monomial(Dim::R8, &[0]));
        assert_eq!(s0.mat.rank_svd(1e-10), 7);
    }

    #[test]
    fn structure_direction_formula_vs_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let opts = SampleOptions::default();
        let s = standard_structure_f64();
        for trial in 0..6 {
            let f = sample_solution(CaseId::One, &mut rng, &opts);
            // random symmetric h and beta in Lambda^2_7
            let mut h = Mat::<f64>::zeros(8, 8);
            for i in 0..8 {
                for j in i..8 {
                    let v = rng.random_range(-0.5..0.5);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
            let mut beta: KForm<f64> = KForm::zero(Dim::R8, 2);
            for mu in 1..=7 {
                beta = beta.add_form(&l27_unit::<f64>(mu).scale(&rng.random_range(-0.5..0.5)));
            }
            let exact = structure_direction_linearization(&f, &h, &beta);
            let fd = structure_direction_fd(&f, &h, &beta, 1e-5);
            let err = exact.sub_form(&fd).norm_f64();
            let scale = exact.norm_f64().max(1.0);
            assert!(err / scale < 1e-5, "trial {} rel err {:e}", trial, err / scale);
            // output lands in Lambda^2_7
            let off = exact.sub_form(&s.project(Irrep::L2_7, &exact)).norm_f64();
            assert!(off < 1e-9);
        }
    }

    #[test]
    fn structure_direction_conformal_identity() {
        // A = g: delta = 4 pi27(F) on solutions of the first equation
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let opts = SampleOptions::default();
        let s = standard_structure_f64();
        for _ in 0..4 {
            let f = sample_solution(CaseId::One, &mut rng, &opts);
            let got = structure_direction_linearization(&f, &Mat::identity(8), &KForm::zero(Dim::R8, 2));
            let want = s.project(Irrep::L2_7, &f).scale(&4.0);
            assert!(got.sub_form(&want).norm_f64() < 1e-9);
        }
        // A = 0 gives 0
        let f = sample_solution(CaseId::One, &mut rng, &opts);
        let zero = structure_direction_linearization(&f, &Mat::zeros(8, 8), &KForm::zero(Dim::R8, 2));
        assert!(zero.norm_f64() < 1e-12);
    }

    #[test]
    fn obstruction_nullity_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let opts = SampleOptions::default();
        // F = 0: all conditions vacuous, nullity 7
        let rep = surjectivity_obstruction(&KForm::zero(Dim::R8, 2), 1e-8);
        assert_eq!(rep.dimension, 7);
        // generic solutions, F != 0, quartic != 1: nullity 0
        for _ in 0..5 {
            let f = sample_generic_solution(&mut rng, &opts);
            let rep = surjectivity_obstruction(&f, 1e-8);
            assert_eq!(rep.dimension, 0);
        }
    }

    #[test]
    fn obstruction_eta_system_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..6 {
            // arbitrary C (the row identities are unconditional algebra)
            let c: [f64; 4] = core::array::from_fn(|_| rng.random_range(-1.5..1.5));
            let bad = obstruction_eta_system_check(&c, 1e-9);
            assert!(bad.is_empty(), "mismatch: {:?} at C {:?}", bad, c);
        }
    }

    #[test]
    fn q_full_rank_on_solutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let opts = SampleOptions::default();
        // includes quartic = 1 points (omega)
        let q = build_q(&omega());
        assert_eq!(q.mat.rank_svd(1e-8), 7);
        for _ in 0..3 {
            let f = sample_solution(CaseId::One, &mut rng, &opts);
            let q = build_q(&f);
            assert_eq!(q.mat.rank_svd(1e-8), 7);
        }
    }

    #[test]
    fn quartic_grading_sanity() {
        // the kernel-theorem hypothesis separator
        let s = standard_structure_f64();
        assert!((quartic_value(&omega(), s) - 1.0).abs() < 1e-12);
    }
}
