//! Desk-scale Fourier model of the canonical and deformation complexes on
//! the flat 8-torus.
//!
//! With constant coefficients, d acts on the mode with frequency k as
//! wedging by the covector xi = 2 pi k and d^* as minus the contraction.
//! The two-term operator (pi^2_7 o d, d^*) therefore becomes, per mode,
//! the 8x8 real matrix b |-> (symbol rows, -<xi, b>). Ellipticity makes
//! every nonzero mode contribute zero to cohomology, so the zero mode
//! carries everything: h0 = 1, h1 = 8 (= b^1), and the seven constant
//! Lambda^2_7 forms give h27 = 7 and index -1 + 8 - 7 = 0.
//!
//! For a constant curvature form F the deformation operator's symbol is
//! T_F(xi ^ .); the canonical complex of the deformed structure Phi_F has
//! symbol pi27(((I+F#)^{-1})^*(xi ^ .)) in the fixed base frame, and the
//! two differ by the invertible factor P_F (when *F^4/24 != 1). Indices
//! are computed along the homotopy Phi(s) = (I + s F#)^* Phi, which stays
//! elliptic since det(I + s F#) > 0.
//!
//! The model deliberately ignores Chern-class integrality of F / 2 pi:
//! it tests the linear-algebraic content (kernels, indices, mode counts),
//! not line-bundle topology.

use crate::forms::{one_plus_sharp, Dim, KForm, MetricData};
use crate::linearize::{l27_coords, symbol_delta};
use crate::matrix::Mat;
use crate::structures::{Irrep, Spin7Structure};
use rand::Rng;
use serde::Serialize;

/// An integer frequency vector with covector 2 pi k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FourierMode(pub [i64; 8]);

impl FourierMode {
    pub fn covector(&self) -> KForm<f64> {
        KForm::from_coeff_vec(
            Dim::R8,
            1,
            self.0.iter().map(|&k| 2.0 * std::f64::consts::PI * k as f64).collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }
}

/// Symbol rows of the canonical complex of `s` in the fixed base frame:
/// 7x8 matrix of b |-> pi27((sigma^{-1})^*(xi ^ b)).
pub fn canonical_symbol(s: &Spin7Structure<f64>, xi: &KForm<f64>) -> Mat<f64> {
    let base = crate::ddt::standard_structure_f64();
    let sigma_inv = s.conjugator_inv();
    let mut mat = Mat::zeros(7, 8);
    for b in 0..8 {
        let eb: KForm<f64> = KForm::monomial(Dim::R8, &[b]);
        let img = base.project(Irrep::L2_7, &xi.wedge(&eb).pullback(sigma_inv));
        for (mu, c) in l27_coords(&img).into_iter().enumerate() {
            mat[(mu, b)] = c;
        }
    }
    mat
}

/// Same symbol with an explicit degree-2 projector matrix in place of the
/// structure's own; test hook for corrupted-projector negative controls.
pub fn canonical_symbol_with_projector(
    p27: &Mat<f64>,
    sigma_inv: &Mat<f64>,
    xi: &KForm<f64>,
) -> Mat<f64> {
    let mut mat = Mat::zeros(7, 8);
    for b in 0..8 {
        let eb: KForm<f64> = KForm::monomial(Dim::R8, &[b]);
        let arg = xi.wedge(&eb).pullback(sigma_inv);
        let img = KForm::from_coeff_vec(Dim::R8, 2, p27.matvec(&arg.coeff_vec()));
        for (mu, c) in l27_coords(&img).into_iter().enumerate() {
            mat[(mu, b)] = c;
        }
    }
    mat
}

/// The per-mode 8x8 matrix of the two-term operator: symbol rows on top,
/// the d^* row -<xi, .> (flat metric) at the bottom. For F = 0 this is
/// the canonical-complex symbol of `s`; for nonzero F (over the standard
/// base) it is the deformation operator's symbol T_F(xi ^ .).
pub fn mode_operator(s: &Spin7Structure<f64>, f: &KForm<f64>, xi: &KForm<f64>) -> Mat<f64> {
    let sym = if f.is_zero() {
        canonical_symbol(s, xi)
    } else {
        assert!(
            s.is_standard(),
            "deformation symbol is defined over the standard base structure"
        );
        symbol_delta(f, xi).mat
    };
    let mut m = Mat::zeros(8, 8);
    for i in 0..7 {
        for j in 0..8 {
            m[(i, j)] = sym[(i, j)];
        }
    }
    let xiv = xi.coeff_vec();
    for j in 0..8 {
        m[(7, j)] = -xiv[j];
    }
    m
}

/// Ellipticity probe: min |det| of the mode operator over unit covector
/// directions. Elliptic symbols keep this bounded away from zero.
pub struct EllipticityReport {
    pub directions: usize,
    pub min_abs_det: f64,
    pub pass: bool,
}

pub fn ellipticity_check(
    s: &Spin7Structure<f64>,
    f: &KForm<f64>,
    directions: usize,
    rng: &mut impl Rng,
) -> EllipticityReport {
    let mut min_det = f64::INFINITY;
    for _ in 0..directions {
        let mut v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0f64..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-6 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= n);
        let xi = KForm::from_coeff_vec(Dim::R8, 1, v);
        let det = mode_operator(s, f, &xi).to_nalgebra().determinant().abs();
        min_det = min_det.min(det);
    }
    EllipticityReport {
        directions,
        min_abs_det: min_det,
        pass: min_det > 1e-10,
    }
}

/// Cohomology counts of the three-term complex assembled from modes.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexReport {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub index: i64,
    /// dim of the harmonic Lambda^2_7 space (zero-mode constants).
    pub h27: usize,
    /// h2 - h27: the obstruction-space dimension of the subcomplex.
    pub h2_sub: usize,
    pub truncation: usize,
    pub modes_checked: usize,
    /// Modes with nonzero contributions (empty in the elliptic case).
    pub exceptional_modes: Vec<(FourierMode, usize, usize)>,
}

/// All integer vectors with |k|_1 <= radius (lexicographic enumeration).
pub fn l1_ball(radius: usize) -> Vec<FourierMode> {
    let mut out = Vec::new();
    let mut k = [0i64; 8];
    fn rec(pos: usize, budget: i64, k: &mut [i64; 8], out: &mut Vec<FourierMode>) {
        if pos == 8 {
            out.push(FourierMode(*k));
            return;
        }
        for v in -budget..=budget {
            k[pos] = v;
            rec(pos + 1, budget - v.abs(), k, out);
        }
        k[pos] = 0;
    }
    rec(0, radius as i64, &mut k, &mut out);
    out
}

/// Assemble cohomology from the l1 ball of the given radius plus extra
/// random modes with entries in [-big, big].
pub fn torus_cohomology(
    s: &Spin7Structure<f64>,
    f: &KForm<f64>,
    truncation: usize,
    random_modes: usize,
    rng: &mut impl Rng,
) -> ComplexReport {
    let mut modes = l1_ball(truncation);
    for _ in 0..random_modes {
        let k: [i64; 8] = core::array::from_fn(|_| rng.random_range(-10i64..=10));
        modes.push(FourierMode(k));
    }
    let mut h1 = 8usize; // zero mode: all constant 1-forms are closed
    let mut h2 = 7usize; // zero mode: constant Lambda^2_7 forms
    let h27 = 7usize;
    let mut exceptional = Vec::new();
    let mut checked = 1usize;
    for mode in &modes {
        if mode.is_zero() {
            continue;
        }
        checked += 1;
        let xi = mode.covector();
        let sym = {
            let full = mode_operator(s, f, &xi);
            Mat::from_fn(7, 8, |i, j| full[(i, j)])
        };
        let rank = sym.rank_svd(1e-8);
        // the complex property puts xi in the kernel of the symbol rows;
        // per-mode h1 counts kernel directions beyond that gauge direction
        let ker = 8 - rank;
        let mode_h1 = ker - 1;
        let mode_h2 = 7 - rank;
        if mode_h1 > 0 || mode_h2 > 0 {
            exceptional.push((mode.clone(), mode_h1, mode_h2));
            h1 += mode_h1;
            h2 += mode_h2;
        }
    }
    let h0 = 1usize;
    ComplexReport {
        h0,
        h1,
        h2,
        index: -(h0 as i64) + h1 as i64 - h2 as i64,
        h27,
        h2_sub: h2 - h27,
        truncation,
        modes_checked: checked,
        exceptional_modes: exceptional,
    }
}

/// The expected dimension h1 - (h2 - h27) of the deformation subcomplex,
/// with the consistency certificate value 1 + h27 - A2 (A2 = 0 on the
/// flat torus, where the Pontryagin forms vanish).
pub struct ExpectedDimension {
    pub value: i64,
    pub certificate: i64,
}

pub fn expected_dimension(report: &ComplexReport) -> ExpectedDimension {
    ExpectedDimension {
        value: report.h1 as i64 - report.h2_sub as i64,
        certificate: 1 + report.h27 as i64,
    }
}

/// Index of the canonical complex along Phi(s) = (I + s F#)^* Phi for s on
/// a uniform grid; the family stays elliptic, so the index is constant.
pub fn homotopy_index_scan(
    f: &KForm<f64>,
    steps: usize,
    truncation: usize,
    random_modes: usize,
    rng: &mut impl Rng,
) -> Vec<(f64, i64)> {
    let base = crate::ddt::standard_structure_f64();
    let metric = MetricData::<f64>::standard(Dim::R8);
    (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            let sigma = one_plus_sharp(&f.scale(&t), &metric);
            let st = base.pullback_structure(&sigma);
            let report = torus_cohomology(&st, &KForm::zero(Dim::R8, 2), truncation, random_modes, rng);
            (t, report.index)
        })
        .collect()
}

/// Coclosure has no kernel on Lambda^2_7 at nonzero modes: the 8x7 matrix
/// of beta |-> i(xi#) beta has rank 7. The zero mode contributes exactly
/// the 7 constants. Returns (rank deficiencies found, modes checked).
pub fn harmonic_27_check(modes: &[FourierMode]) -> (usize, usize) {
    let mut bad = 0usize;
    let mut checked = 0usize;
    for mode in modes {
        if mode.is_zero() {
            continue;
        }
        checked += 1;
        let xi = mode.covector();
        let xiv = xi.coeff_vec();
        let mut m = Mat::<f64>::zeros(8, 7);
        for nu in 1..=7 {
            let u = crate::linearize::l27_unit::<f64>(nu);
            let contracted = u.interior(&xiv);
            for (i, c) in contracted.coeff_vec().into_iter().enumerate() {
                m[(i, nu - 1)] = c;
            }
        }
        if m.rank_svd(1e-8) != 7 {
            bad += 1;
        }
    }
    (bad, checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddt::{sample_generic_solution, standard_structure_f64, SampleOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mode_operator_shapes_and_zero() {
        let s = standard_structure_f64();
        let zero2 = KForm::zero(Dim::R8, 2);
        let xi0 = KForm::zero(Dim::R8, 1);
        let m = mode_operator(s, &zero2, &xi0);
        assert_eq!(m.max_abs(), 0.0);
        let e0 = KForm::monomial(Dim::R8, &[0]);
        let m = mode_operator(s, &zero2, &e0);
        assert!(m.to_nalgebra().determinant().abs() > 1e-6);
    }

    #[test]
    fn flat_symbol_det_homogeneous_over_directions() {
        let s = standard_structure_f64();
        let zero2 = KForm::zero(Dim::R8, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut dets = Vec::new();
        for _ in 0..100 {
            let mut v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0f64..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            let xi = KForm::from_coeff_vec(Dim::R8, 1, v);
            dets.push(mode_operator(s, &zero2, &xi).to_nalgebra().determinant().abs());
        }
        let (min, max) = dets
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
        assert!((max - min) / max < 1e-9, "direction dependence: {} vs {}", min, max);
    }

    #[test]
    fn gauge_direction_in_symbol_kernel() {
        // xi itself is killed by the symbol rows (d o d = 0 at symbol level)
        let s = standard_structure_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let opts = SampleOptions::default();
        let f = sample_generic_solution(&mut rng, &opts);
        for _ in 0..20 {
            let v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0f64..1.0)).collect();
            let xi = KForm::from_coeff_vec(Dim::R8, 1, v);
            let m = mode_operator(s, &f, &xi);
            let out = Mat::from_fn(7, 8, |i, j| m[(i, j)]).matvec(&xi.coeff_vec());
            assert!(out.iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn cohomology_flat_and_deformed() {
        let s = standard_structure_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let zero2 = KForm::zero(Dim::R8, 2);
        for n in [1usize, 2] {
            let rep = torus_cohomology(s, &zero2, n, 50, &mut rng);
            assert_eq!((rep.h0, rep.h1, rep.h2, rep.h27), (1, 8, 7, 7), "N = {}", n);
            assert_eq!(rep.index, 0);
            assert!(rep.exceptional_modes.is_empty());
            let dim = expected_dimension(&rep);
            assert_eq!(dim.value, 8);
            assert_eq!(dim.certificate, 8);
        }
        // constant dDT curvature with quartic != 1
        let opts = SampleOptions::default();
        let f = sample_generic_solution(&mut rng, &opts);
        let rep = torus_cohomology(s, &f, 1, 100, &mut rng);
        assert_eq!(rep.index, 0);
        assert_eq!(rep.h1, 8);
        assert_eq!(rep.h2_sub, 0);
        // deformed structure's canonical complex
        let st = Spin7Structure::deformed(&f);
        let rep = torus_cohomology(&st, &zero2, 1, 100, &mut rng);
        assert_eq!(rep.index, 0);
        assert_eq!((rep.h1, rep.h2), (8, 7));
    }

    #[test]
    fn ellipticity_standard_deformed_and_corrupted() {
        let s = standard_structure_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let zero2 = KForm::zero(Dim::R8, 2);
        let rep = ellipticity_check(s, &zero2, 200, &mut rng);
        assert!(rep.pass, "flat symbol min det {}", rep.min_abs_det);
        let opts = SampleOptions::default();
        let f = sample_generic_solution(&mut rng, &opts);
        let rep = ellipticity_check(s, &f, 200, &mut rng);
        assert!(rep.pass, "deformation symbol min det {}", rep.min_abs_det);
        let st = Spin7Structure::deformed(&f);
        let rep = ellipticity_check(&st, &zero2, 200, &mut rng);
        assert!(rep.pass, "deformed canonical symbol min det {}", rep.min_abs_det);
        // negative control: project a whole lambda^2 direction out of pi27,
        // leaving a rank-6 "projector" that kills one codomain direction
        let u = crate::linearize::l27_unit::<f64>(3).coeff_vec();
        let kill = Mat::from_fn(28, 28, |i, j| {
            (if i == j { 1.0 } else { 0.0 }) - u[i] * u[j]
        });
        let p27 = kill.matmul(&s.projectors().p2_7);
        let xi = KForm::monomial(Dim::R8, &[2]);
        let sym = canonical_symbol_with_projector(&p27, &Mat::identity(8), &xi);
        let mut full = Mat::<f64>::zeros(8, 8);
        for i in 0..7 {
            for j in 0..8 {
                full[(i, j)] = sym[(i, j)];
            }
        }
        for j in 0..8 {
            full[(7, j)] = -xi.coeff_vec()[j];
        }
        assert!(full.to_nalgebra().determinant().abs() < 1e-10, "corruption must break ellipticity");
    }

    #[test]
    fn homotopy_scan_constant_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let opts = SampleOptions::default();
        let f = sample_generic_solution(&mut rng, &opts);
        let scan = homotopy_index_scan(&f, 5, 1, 30, &mut rng);
        assert!(scan.iter().all(|&(_, idx)| idx == 0), "{:?}", scan);
        // large deformation stays elliptic: det(I + s F#) > 0 for all s
        let scan = homotopy_index_scan(&f.scale(&5.0), 5, 1, 30, &mut rng);
        assert!(scan.iter().all(|&(_, idx)| idx == 0), "{:?}", scan);
    }

    #[test]
    fn harmonic_27_trivial_at_nonzero_modes() {
        let mut modes = l1_ball(1);
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for _ in 0..100 {
            modes.push(FourierMode(core::array::from_fn(|_| rng.random_range(-10i64..=10))));
        }
        let (bad, checked) = harmonic_27_check(&modes);
        assert_eq!(bad, 0);
        assert!(checked >= 100);
    }

    #[test]
    fn l1_ball_counts() {
        assert_eq!(l1_ball(0).len(), 1);
        assert_eq!(l1_ball(1).len(), 17);
        assert_eq!(l1_ball(2).len(), 145);
    }
}
