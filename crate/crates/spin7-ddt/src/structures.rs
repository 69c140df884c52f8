//! The model G2 and Spin(7) structures, the lambda maps, and the
//! irreducible projections.
//!
//! The standard 3-form is
//!   varphi = e^{123} + e^{145} + e^{167} + e^{246} - e^{257} - e^{347} - e^{356}
//! on R^7 (indices 1..=7), and the Spin(7) 4-form on R^8 is
//!   Phi = e^0 ^ varphi + *7 varphi,
//! which is self-dual with |Phi|^2 = 14.
//!
//! Degree 2, 4 and 6 forms decompose into irreducibles of dimensions
//! (7, 21), (1, 7, 27, 35) and (7, 21). The degree-2 projections have the
//! closed form pi^2_7 = (1 + *(Phi ^ .))/4; the 7-dimensional summands in
//! every degree are also spanned by the isometries lambda^k applied to an
//! orthonormal basis of (e^0)^perp, which is what the projector assembly
//! uses in degree 4 and 6. pi^4_27 is the complement of the other three
//! degree-4 projectors.
//!
//! A [`Spin7Structure`] is always created through a conjugator sigma with
//! Phi = sigma^* Phi_std; its metric is sigma^T sigma, its volume form
//! det(sigma) e^{01234567}, and its projectors are the conjugates
//! sigma^* o pi^k_l o (sigma^{-1})^* of the standard ones. This keeps every
//! derived quantity exact in rational mode.

use crate::forms::{basis_len, basis_mask, one_plus_sharp, pullback_matrix, tuple_of_mask, Dim, KForm, MetricData};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// The seven basis 3-form terms of the standard varphi.
pub const VARPHI_TERMS: [(i64, [usize; 3]); 7] = [
    (1, [1, 2, 3]),
    (1, [1, 4, 5]),
    (1, [1, 6, 7]),
    (1, [2, 4, 6]),
    (-1, [2, 5, 7]),
    (-1, [3, 4, 7]),
    (-1, [3, 5, 6]),
];

/// The standard G2 3-form on R^7.
pub fn standard_varphi<S: Scalar>() -> KForm<S> {
    let terms: Vec<(i64, &[usize])> = VARPHI_TERMS.iter().map(|(c, t)| (*c, &t[..])).collect();
    KForm::from_int_terms(Dim::R7, 3, &terms)
}

/// *7 varphi, computed from the standard metric on R^7.
pub fn standard_star_varphi<S: Scalar>() -> KForm<S> {
    standard_varphi::<S>().hodge_star(&MetricData::standard(Dim::R7))
}

/// The standard Spin(7) 4-form Phi = e^0 ^ varphi + *7 varphi on R^8.
pub fn standard_phi4<S: Scalar>() -> KForm<S> {
    let e0 = KForm::monomial(Dim::R8, &[0]);
    let phi = standard_varphi::<S>().embed_r8();
    let star_phi = standard_star_varphi::<S>().embed_r8();
    e0.wedge(&phi).add_form(&star_phi)
}

/// A G2 structure on R^7: the 3-form, its induced metric and volume form.
#[derive(Clone)]
pub struct G2Structure<S> {
    pub varphi: KForm<S>,
    pub metric: MetricData<S>,
}

impl<S: Scalar> G2Structure<S> {
    pub fn standard() -> Self {
        G2Structure {
            varphi: standard_varphi(),
            metric: MetricData::standard(Dim::R7),
        }
    }

    /// Recover the metric from the cubic formula
    /// g(u,v) vol = (1/6) i(u)varphi ^ i(v)varphi ^ varphi,
    /// using the stored volume form. Returns the Gram matrix.
    pub fn metric_from_varphi(&self) -> Mat<S> {
        let vol_inv = S::one() / self.metric.vol_coeff.clone();
        let sixth = S::from_ratio(1, 6);
        Mat::from_fn(7, 7, |i, j| {
            let iu = self.varphi.interior_basis(i + 1);
            let iv = self.varphi.interior_basis(j + 1);
            let top = iu.wedge(&iv).wedge(&self.varphi);
            let c = top.get(&[1, 2, 3, 4, 5, 6, 7]);
            sixth.clone() * c * vol_inv.clone()
        })
    }

    /// The three identities of the G2 lemma for a vector u (components over
    /// indices 1..=7): varphi ^ i(u)*varphi = -4 * u_flat,
    /// *varphi ^ i(u)varphi = 3 * u_flat, and
    /// varphi ^ i(u)varphi = 2 *(i(u)varphi) = 2 u_flat ^ *varphi.
    /// Returns the list of violated identity names (empty = all hold).
    pub fn identities_check(&self, u: &[S]) -> Vec<&'static str> {
        let m = &self.metric;
        let sphi = self.varphi.hodge_star(m);
        let iu_phi = self.varphi.interior(u);
        let iu_sphi = sphi.interior(u);
        let uflat = m.flat(u);
        let star_uflat = uflat.hodge_star(m);
        let mut bad = Vec::new();
        if self.varphi.wedge(&iu_sphi) != star_uflat.scale(&S::from_int(-4)) {
            bad.push("varphi ^ i(u)*varphi = -4 * u_flat");
        }
        if sphi.wedge(&iu_phi) != star_uflat.scale(&S::from_int(3)) {
            bad.push("*varphi ^ i(u)varphi = 3 * u_flat");
        }
        let lhs = self.varphi.wedge(&iu_phi);
        let rhs1 = iu_phi.hodge_star(m).scale(&S::from_int(2));
        let rhs2 = uflat.wedge(&sphi).scale(&S::from_int(2));
        if lhs != rhs1 || lhs != rhs2 {
            bad.push("varphi ^ i(u)varphi = 2 *(i(u)varphi) = 2 u_flat ^ *varphi");
        }
        bad
    }
}

/// Labels for the irreducible summands used in this crate.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Irrep {
    L2_7,
    L2_21,
    L4_1,
    L4_7,
    L4_27,
    L4_35,
    L6_7,
    L6_21,
}

impl Irrep {
    pub fn degree(self) -> usize {
        match self {
            Irrep::L2_7 | Irrep::L2_21 => 2,
            Irrep::L4_1 | Irrep::L4_7 | Irrep::L4_27 | Irrep::L4_35 => 4,
            Irrep::L6_7 | Irrep::L6_21 => 6,
        }
    }

    pub fn rank(self) -> usize {
        match self {
            Irrep::L4_1 => 1,
            Irrep::L2_7 | Irrep::L4_7 | Irrep::L6_7 => 7,
            Irrep::L2_21 | Irrep::L6_21 => 21,
            Irrep::L4_27 => 27,
            Irrep::L4_35 => 35,
        }
    }

    pub fn from_pair(k: usize, l: usize) -> Option<Irrep> {
        match (k, l) {
            (2, 7) => Some(Irrep::L2_7),
            (2, 21) => Some(Irrep::L2_21),
            (4, 1) => Some(Irrep::L4_1),
            (4, 7) => Some(Irrep::L4_7),
            (4, 27) => Some(Irrep::L4_27),
            (4, 35) => Some(Irrep::L4_35),
            (6, 7) => Some(Irrep::L6_7),
            (6, 21) => Some(Irrep::L6_21),
            _ => None,
        }
    }

    pub fn all() -> [Irrep; 8] {
        [
            Irrep::L2_7,
            Irrep::L2_21,
            Irrep::L4_1,
            Irrep::L4_7,
            Irrep::L4_27,
            Irrep::L4_35,
            Irrep::L6_7,
            Irrep::L6_21,
        ]
    }
}

/// 2 lambda^2(e^j) = e^{0j} + i(e_j) varphi for j in 1..=7.
pub fn lambda2_doubled<S: Scalar>(j: usize) -> KForm<S> {
    assert!((1..=7).contains(&j));
    let e0j = KForm::monomial(Dim::R8, &[0.min(j), 0.max(j)]);
    let ij_phi = standard_varphi::<S>().interior_basis(j).embed_r8();
    e0j.add_form(&ij_phi)
}

/// sqrt(8) lambda^4(e^j) = e^0 ^ i(e_j) *7 varphi - e^j ^ varphi.
pub fn lambda4_scaled<S: Scalar>(j: usize) -> KForm<S> {
    assert!((1..=7).contains(&j));
    let e0 = KForm::monomial(Dim::R8, &[0]);
    let a = e0.wedge(&standard_star_varphi::<S>().interior_basis(j).embed_r8());
    let b = KForm::monomial(Dim::R8, &[j]).wedge(&standard_varphi::<S>().embed_r8());
    a.sub_form(&b)
}

/// 2 lambda^6(e^j) = *8 (2 lambda^2(e^j)).
pub fn lambda6_doubled<S: Scalar>(j: usize) -> KForm<S> {
    lambda2_doubled::<S>(j).hodge_star(&MetricData::standard(Dim::R8))
}

/// lambda^k applied to a 1-form with no e^0 component, for the standard
/// structure. In rational mode k = 4 is only available up to the sqrt(8)
/// factor, so this returns the exact scaled image together with the scale:
/// the pair (form, s) means lambda^k(alpha) = form / s with s^2 rational.
/// For k in {2, 6} the scale is 2; for k = 4 it is sqrt(8), which only
/// divides out in float mode (see [`lambda_f64`]).
pub fn lambda_scaled<S: Scalar>(k: usize, alpha: &KForm<S>) -> KForm<S> {
    assert_eq!(alpha.degree(), 1);
    let coeffs: Vec<(usize, S)> = alpha
        .terms()
        .into_iter()
        .map(|(t, c)| {
            assert_ne!(t[0], 0, "lambda input must have no e^0 component");
            (t[0], c)
        })
        .collect();
    let deg = match k {
        2 => 2,
        4 => 4,
        6 => 6,
        _ => panic!("lambda degree must be 2, 4 or 6"),
    };
    let mut out: KForm<S> = KForm::zero(Dim::R8, deg);
    for (j, c) in coeffs {
        let basis_img = match k {
            2 => lambda2_doubled::<S>(j),
            4 => lambda4_scaled::<S>(j),
            6 => lambda6_doubled::<S>(j),
            _ => unreachable!(),
        };
        out = out.add_form(&basis_img.scale(&c));
    }
    out
}

/// The scale s with lambda^k = (scaled image)/s: 2, sqrt(8), 2.
pub fn lambda_scale(k: usize) -> f64 {
    match k {
        2 | 6 => 2.0,
        4 => 8f64.sqrt(),
        _ => panic!("lambda degree must be 2, 4 or 6"),
    }
}

/// Float-mode lambda^k with the isometry normalization.
pub fn lambda_f64(k: usize, alpha: &KForm<f64>) -> KForm<f64> {
    lambda_scaled(k, alpha).scale(&(1.0 / lambda_scale(k)))
}

/// The Spin(7)-equivariant isomorphism mu: Lambda^2 V^* -> Lambda^2_21 W^*,
/// mu(beta) = -e^0 ^ *7(beta ^ *7 varphi) - beta + *7(varphi ^ beta).
pub fn mu_21<S: Scalar>(beta: &KForm<S>) -> KForm<S> {
    assert_eq!(beta.dim(), Dim::R7);
    assert_eq!(beta.degree(), 2);
    let m7 = MetricData::standard(Dim::R7);
    let e0 = KForm::monomial(Dim::R8, &[0]);
    let sphi = standard_star_varphi::<S>();
    let phi = standard_varphi::<S>();
    let first = e0
        .wedge(&beta.wedge(&sphi).hodge_star(&m7).embed_r8())
        .neg_form();
    let second = beta.embed_r8().neg_form();
    let third = phi.wedge(beta).hodge_star(&m7).embed_r8();
    first.add_form(&second).add_form(&third)
}

/// The element -e^0 ^ *7(beta ^ *7 varphi) + beta of Lambda^2_21
/// (the non-equivariant parameterization).
pub fn lambda221_element<S: Scalar>(beta: &KForm<S>) -> KForm<S> {
    assert_eq!(beta.dim(), Dim::R7);
    assert_eq!(beta.degree(), 2);
    let m7 = MetricData::standard(Dim::R7);
    let e0 = KForm::monomial(Dim::R8, &[0]);
    let sphi = standard_star_varphi::<S>();
    e0.wedge(&beta.wedge(&sphi).hodge_star(&m7).embed_r8())
        .neg_form()
        .add_form(&beta.embed_r8())
}

/// Cached projector matrices for one structure, degree (2, 4, 6).
#[derive(Clone)]
pub struct Projectors<S> {
    pub p2_7: Mat<S>,
    pub p2_21: Mat<S>,
    pub p4_1: Mat<S>,
    pub p4_7: Mat<S>,
    pub p4_27: Mat<S>,
    pub p4_35: Mat<S>,
    pub p6_7: Mat<S>,
    pub p6_21: Mat<S>,
}

impl<S: Scalar> Projectors<S> {
    pub fn get(&self, which: Irrep) -> &Mat<S> {
        match which {
            Irrep::L2_7 => &self.p2_7,
            Irrep::L2_21 => &self.p2_21,
            Irrep::L4_1 => &self.p4_1,
            Irrep::L4_7 => &self.p4_7,
            Irrep::L4_27 => &self.p4_27,
            Irrep::L4_35 => &self.p4_35,
            Irrep::L6_7 => &self.p6_7,
            Irrep::L6_21 => &self.p6_21,
        }
    }

    fn standard() -> Self {
        let m = MetricData::<S>::standard(Dim::R8);
        let phi4 = standard_phi4::<S>();
        let quarter = S::from_ratio(1, 4);
        // degree 2 closed formula: pi27 = (a + *(Phi ^ a))/4
        let n2 = basis_len(Dim::R8, 2);
        let mut p2_7 = Mat::zeros(n2, n2);
        for p in 0..n2 {
            let a: KForm<S> = KForm::monomial(Dim::R8, &tuple_of_mask(basis_mask(Dim::R8, 2, p)));
            let img = a.add_form(&phi4.wedge(&a).hodge_star(&m)).scale(&quarter);
            for (i, c) in img.coeff_vec().into_iter().enumerate() {
                p2_7[(i, p)] = c;
            }
        }
        let p2_21 = Mat::identity(n2).sub(&p2_7);

        // degree 4: pi41 = <., Phi> Phi / 14; pi435 = anti-self-dual part;
        // pi47 from the scaled lambda^4 frame; pi427 by complement.
        let n4 = basis_len(Dim::R8, 4);
        let lam4: Vec<KForm<S>> = (1..=7).map(lambda4_scaled::<S>).collect();
        let c14 = S::from_ratio(1, 14);
        let c8 = S::from_ratio(1, 8);
        let half = S::from_ratio(1, 2);
        let mut p4_1 = Mat::zeros(n4, n4);
        let mut p4_7 = Mat::zeros(n4, n4);
        let mut p4_35 = Mat::zeros(n4, n4);
        for p in 0..n4 {
            let a: KForm<S> = KForm::monomial(Dim::R8, &tuple_of_mask(basis_mask(Dim::R8, 4, p)));
            let img1 = phi4.scale(&(a.dot(&phi4) * c14.clone()));
            let mut img7: KForm<S> = KForm::zero(Dim::R8, 4);
            for l in &lam4 {
                img7 = img7.add_form(&l.scale(&(a.dot(l) * c8.clone())));
            }
            let img35 = a.sub_form(&a.hodge_star(&m)).scale(&half);
            for i in 0..n4 {
                p4_1[(i, p)] = img1.coeff_at(i).clone();
                p4_7[(i, p)] = img7.coeff_at(i).clone();
                p4_35[(i, p)] = img35.coeff_at(i).clone();
            }
        }
        let p4_27 = Mat::identity(n4).sub(&p4_1).sub(&p4_7).sub(&p4_35);

        // degree 6 from the lambda^6 frame (norm 2 per doubled generator).
        let n6 = basis_len(Dim::R8, 6);
        let lam6: Vec<KForm<S>> = (1..=7).map(lambda6_doubled::<S>).collect();
        let mut p6_7 = Mat::zeros(n6, n6);
        for p in 0..n6 {
            let a: KForm<S> = KForm::monomial(Dim::R8, &tuple_of_mask(basis_mask(Dim::R8, 6, p)));
            let mut img: KForm<S> = KForm::zero(Dim::R8, 6);
            for l in &lam6 {
                img = img.add_form(&l.scale(&(a.dot(l) * S::from_ratio(1, 4))));
            }
            for i in 0..n6 {
                p6_7[(i, p)] = img.coeff_at(i).clone();
            }
        }
        let p6_21 = Mat::identity(n6).sub(&p6_7);

        Projectors {
            p2_7,
            p2_21,
            p4_1,
            p4_7,
            p4_27,
            p4_35,
            p6_7,
            p6_21,
        }
    }

    fn conjugate(&self, dim: Dim, sigma: &Mat<S>, sigma_inv: &Mat<S>) -> Self {
        let conj = |deg: usize, p: &Mat<S>| {
            let fwd = pullback_matrix(dim, deg, sigma);
            let bwd = pullback_matrix(dim, deg, sigma_inv);
            fwd.matmul(p).matmul(&bwd)
        };
        Projectors {
            p2_7: conj(2, &self.p2_7),
            p2_21: conj(2, &self.p2_21),
            p4_1: conj(4, &self.p4_1),
            p4_7: conj(4, &self.p4_7),
            p4_27: conj(4, &self.p4_27),
            p4_35: conj(4, &self.p4_35),
            p6_7: conj(6, &self.p6_7),
            p6_21: conj(6, &self.p6_21),
        }
    }
}

/// A Spin(7) structure on R^8, created through a conjugator sigma with
/// Phi = sigma^* Phi_std.
#[derive(Clone)]
pub struct Spin7Structure<S> {
    conjugator: Mat<S>,
    conjugator_inv: Mat<S>,
    phi4: KForm<S>,
    metric: MetricData<S>,
    projectors: Projectors<S>,
}

impl<S: Scalar> Spin7Structure<S> {
    pub fn standard() -> Self {
        Spin7Structure {
            conjugator: Mat::identity(8),
            conjugator_inv: Mat::identity(8),
            phi4: standard_phi4(),
            metric: MetricData::standard(Dim::R8),
            projectors: Projectors::standard(),
        }
    }

    /// Pull the structure back along an invertible sigma:
    /// Phi' = sigma^* Phi, projectors sigma^* o pi o (sigma^{-1})^*,
    /// metric sigma^* g.
    pub fn pullback_structure(&self, sigma: &Mat<S>) -> Self {
        let total = self.conjugator.matmul(sigma);
        let sigma_inv = sigma.inverse().expect("conjugator must be invertible");
        let total_inv = sigma_inv.matmul(&self.conjugator_inv);
        let phi4 = self.phi4.pullback(sigma);
        let metric = MetricData::from_conjugator(Dim::R8, &total);
        let projectors = self.projectors.conjugate(Dim::R8, sigma, &sigma_inv);
        Spin7Structure {
            conjugator: total,
            conjugator_inv: total_inv,
            phi4,
            metric,
            projectors,
        }
    }

    /// The deformed structure Phi_F = (I + F_sharp)^* Phi built from a real
    /// 2-form F over the *standard* structure.
    pub fn deformed(f: &KForm<S>) -> Self {
        let std = Self::standard();
        let sigma = one_plus_sharp(f, &std.metric);
        std.pullback_structure(&sigma)
    }

    pub fn phi4(&self) -> &KForm<S> {
        &self.phi4
    }
    pub fn metric(&self) -> &MetricData<S> {
        &self.metric
    }
    pub fn conjugator(&self) -> &Mat<S> {
        &self.conjugator
    }
    pub fn conjugator_inv(&self) -> &Mat<S> {
        &self.conjugator_inv
    }
    pub fn is_standard(&self) -> bool {
        self.conjugator == Mat::identity(8)
    }
    pub fn projectors(&self) -> &Projectors<S> {
        &self.projectors
    }

    /// Apply the projection onto the given irreducible summand.
    pub fn project(&self, which: Irrep, a: &KForm<S>) -> KForm<S> {
        assert_eq!(a.degree(), which.degree(), "form degree does not match projector");
        assert_eq!(a.dim(), Dim::R8);
        let p = self.projectors.get(which);
        KForm::from_coeff_vec(Dim::R8, which.degree(), p.matvec(&a.coeff_vec()))
    }

    /// Verify the wedge-range inclusions on a pair (beta in L2_7,
    /// gamma in L2_21): pi47(beta ^ beta') = pi435(beta ^ beta') = 0 and
    /// pi41(beta ^ gamma) = pi427(beta ^ gamma) = 0.
    /// Returns violated labels.
    pub fn wedge_range_check(
        &self,
        beta: &KForm<S>,
        beta2: &KForm<S>,
        gamma: &KForm<S>,
        tol: f64,
    ) -> Vec<&'static str> {
        let mut bad = Vec::new();
        let bb = beta.wedge(beta2);
        if !self.project(Irrep::L4_7, &bb).norm_f64().abs().le(&tol) {
            bad.push("pi47(L27 ^ L27) = 0");
        }
        if !self.project(Irrep::L4_35, &bb).norm_f64().abs().le(&tol) {
            bad.push("pi435(L27 ^ L27) = 0");
        }
        let bg = beta.wedge(gamma);
        if !self.project(Irrep::L4_1, &bg).norm_f64().abs().le(&tol) {
            bad.push("pi41(L27 ^ L221) = 0");
        }
        if !self.project(Irrep::L4_27, &bg).norm_f64().abs().le(&tol) {
            bad.push("pi427(L27 ^ L221) = 0");
        }
        bad
    }

    /// The four norm identities for beta in L2_7 and gamma in L2_21:
    /// beta^3 = (3/2)|beta|^2 * beta;   |beta|^4 = (2/3)|beta^2|^2;
    /// |gamma|^4 = |gamma^2|^2 - (1/3)*gamma^4;
    /// |beta|^2 |gamma|^2 = 2 |beta ^ gamma|^2.
    /// Exact in rational mode. Returns violated labels.
    pub fn two_form_norm_check(&self, beta: &KForm<S>, gamma: &KForm<S>) -> Vec<&'static str> {
        let m = &self.metric;
        let mut bad = Vec::new();
        let b2 = beta.wedge(beta);
        let b3 = b2.wedge(beta);
        let bn = beta.norm_sq(m);
        let rhs = beta.hodge_star(m).scale(&(S::from_ratio(3, 2) * bn.clone()));
        if b3 != rhs {
            bad.push("beta^3 = (3/2)|beta|^2 * beta");
        }
        if bn.clone() * bn.clone() != S::from_ratio(2, 3) * b2.norm_sq(m) {
            bad.push("|beta|^4 = (2/3)|beta^2|^2");
        }
        let g2 = gamma.wedge(gamma);
        let g4 = g2.wedge(&g2);
        let gn = gamma.norm_sq(m);
        let star_g4 = g4.hodge_star(m);
        let star_g4_val = if star_g4.degree() == 0 {
            star_g4.get(&[])
        } else {
            S::zero()
        };
        if gn.clone() * gn.clone() != g2.norm_sq(m) - S::from_ratio(1, 3) * star_g4_val {
            bad.push("|gamma|^4 = |gamma^2|^2 - (1/3)*gamma^4");
        }
        let bg = beta.wedge(gamma);
        if bn * gn != S::from_int(2) * bg.norm_sq(m) {
            bad.push("|beta|^2 |gamma|^2 = 2|beta ^ gamma|^2");
        }
        bad
    }
}
