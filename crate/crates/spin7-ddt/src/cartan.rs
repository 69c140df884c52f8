//! Conjugation of 2-forms into Spin(7) normal position.
//!
//! The stabilizer algebra of the standard Phi inside so(8) is the sharp
//! image of Lambda^2_21; its rank-3 Cartan subalgebra is spanned by the
//! pair forms mu_1 e^{01} + mu_2 e^{23} + mu_3 e^{45} + mu_4 e^{67} with
//! sum(mu) = 0. `cartanize` conjugates the Lambda^2_21 part of a 2-form
//! into that subalgebra: gradient ascent of <Y, T> on the adjoint orbit
//! (T a fixed regular ascending target) with a step-halving line search,
//! then a Newton polish solving [Z, C] = -E in least squares.
//!
//! The SU(4) elements used afterwards (block permutations of the four
//! coordinate 2-planes and diagonal phases) fix Phi, permute the Cartan
//! coefficients, and rotate the lambda^2 planes span{lam2(e^2), lam2(e^3)}
//! etc. exactly as needed to kill the alpha_2, alpha_4, alpha_6
//! coordinates of the Lambda^2_7 part.

use crate::forms::{basis_len, basis_mask, tuple_of_mask, two_form_sharp, Dim, KForm, MetricData};
use crate::matrix::Mat;
use crate::scalar::{Rat, Scalar};
use crate::structures::{lambda221_element, lambda2_doubled, standard_phi4};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CartanError {
    #[error("cartanization did not converge: off-Cartan residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
}

/// The four coordinate 2-planes: indices (0,1), (2,3), (4,5), (6,7).
pub const PAIRS: [[usize; 2]; 4] = [[0, 1], [2, 3], [4, 5], [6, 7]];

/// Cartan form sum_j c_j e^{2j, 2j+1}.
pub fn cartan_form<S: Scalar>(c: &[S; 4]) -> KForm<S> {
    let mut f: KForm<S> = KForm::zero(Dim::R8, 2);
    for (j, pair) in PAIRS.iter().enumerate() {
        f = f.add_form(&KForm::monomial(Dim::R8, pair).scale(&c[j]));
    }
    f
}

/// The four pair coefficients of a 2-form.
pub fn pair_coefficients<S: Scalar>(f: &KForm<S>) -> [S; 4] {
    [
        f.get(&PAIRS[0]),
        f.get(&PAIRS[1]),
        f.get(&PAIRS[2]),
        f.get(&PAIRS[3]),
    ]
}

/// Norm of the part of a 2-form outside the Cartan pair monomials.
pub fn off_cartan_norm(f: &KForm<f64>) -> f64 {
    let c = pair_coefficients(f);
    f.sub_form(&cartan_form(&c)).norm_f64()
}

/// A fixed exact basis of Lambda^2_21 (rational coefficients).
pub fn lambda221_basis_rat() -> &'static Vec<KForm<Rat>> {
    static BASIS: OnceLock<Vec<KForm<Rat>>> = OnceLock::new();
    BASIS.get_or_init(|| {
        (0..basis_len(Dim::R7, 2))
            .map(|p| {
                let t = tuple_of_mask(basis_mask(Dim::R7, 2, p));
                let beta: KForm<Rat> = KForm::monomial(Dim::R7, &t);
                lambda221_element(&beta)
            })
            .collect()
    })
}

/// The same basis in floats, with the sharp matrices (spin(7) in so(8)).
pub fn spin7_basis_f64() -> &'static (Vec<KForm<f64>>, Vec<Mat<f64>>) {
    static BASIS: OnceLock<(Vec<KForm<f64>>, Vec<Mat<f64>>)> = OnceLock::new();
    BASIS.get_or_init(|| {
        let m = MetricData::<f64>::standard(Dim::R8);
        let forms: Vec<KForm<f64>> = lambda221_basis_rat()
            .iter()
            .map(KForm::map_to_f64)
            .collect();
        let sharps = forms.iter().map(|f| two_form_sharp(f, &m)).collect();
        (forms, sharps)
    })
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn matrix_exp(a: &Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    assert!(a.is_square());
    let norm = a.max_abs() * n as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let b = a.scale(&scale);
    let mut term = Mat::<f64>::identity(n);
    let mut sum = Mat::<f64>::identity(n);
    for k in 1..=14 {
        term = term.matmul(&b).scale(&(1.0 / k as f64));
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// exp(gamma^sharp) for a 2-form gamma; lands in Spin(7) when gamma is in
/// Lambda^2_21.
pub fn exp_sharp(gamma: &KForm<f64>) -> Mat<f64> {
    let m = MetricData::<f64>::standard(Dim::R8);
    matrix_exp(&two_form_sharp(gamma, &m))
}

/// A random Spin(7) element exp(gamma^sharp) with gamma a random
/// combination of the Lambda^2_21 basis, coefficients in [-spread, spread].
pub fn random_spin7(rng: &mut impl rand::Rng, spread: f64) -> Mat<f64> {
    let (forms, _) = spin7_basis_f64();
    let mut gamma: KForm<f64> = KForm::zero(Dim::R8, 2);
    for f in forms {
        let c: f64 = rng.random_range(-spread..spread);
        gamma = gamma.add_form(&f.scale(&c));
    }
    exp_sharp(&gamma)
}

/// Derivative of t |-> (exp(tB))^* f at t = 0: the derivation replacing
/// e^a by sum_b B[a][b] e^b (column-convention B).
pub fn pullback_derivative(b: &Mat<f64>, f: &KForm<f64>) -> KForm<f64> {
    crate::variation::j2(b, f)
}

/// Regular ascending Cartan target.
fn cartan_target() -> KForm<f64> {
    cartan_form(&[-6.0, -1.0, 3.0, 4.0])
}

/// Result of [`cartanize`]: h with h^* f21 = Cartan form (coefficients
/// returned unsorted; sorting is a separate SU(4) step).
pub struct CartanResult {
    pub conjugator: Mat<f64>,
    pub coefficients: [f64; 4],
    pub residual: f64,
    pub iterations: usize,
}

/// Conjugate a Lambda^2_21 form into the Cartan subalgebra within Spin(7).
pub fn cartanize(f21: &KForm<f64>, tol: f64, max_iter: usize) -> Result<CartanResult, CartanError> {
    assert_eq!(f21.degree(), 2);
    let scale = f21.norm_f64();
    if scale < 1e-300 {
        return Ok(CartanResult {
            conjugator: Mat::identity(8),
            coefficients: [0.0; 4],
            residual: 0.0,
            iterations: 0,
        });
    }
    let m = MetricData::<f64>::standard(Dim::R8);
    let target = cartan_target();
    let t_mat = target.two_form_matrix();
    let mut y = f21.clone();
    let mut h = Mat::<f64>::identity(8);
    let mut step = 0.25;
    let mut iterations = 0usize;

    let f_val = |y: &KForm<f64>| y.dot(&target);

    while iterations < max_iter {
        let off = off_cartan_norm(&y);
        if off <= tol * scale.max(1.0) {
            let c = pair_coefficients(&y);
            return Ok(CartanResult {
                conjugator: h,
                coefficients: c,
                residual: off,
                iterations,
            });
        }

        // Newton polish once the gradient phase is close: solve the
        // least-squares system D_Z(C) = -E over spin(7).
        if off < 1e-2 * scale.max(1.0) {
            let mut improved = false;
            let c_part = cartan_form(&pair_coefficients(&y));
            let e_part = y.sub_form(&c_part);
            let (_, sharps) = spin7_basis_f64();
            let cols: Vec<Vec<f64>> = sharps
                .iter()
                .map(|zs| pullback_derivative(zs, &c_part).coeff_vec())
                .collect();
            let a = nalgebra::DMatrix::from_fn(28, 21, |i, j| cols[j][i]);
            let rhs = nalgebra::DVector::from_vec(e_part.neg_form().coeff_vec());
            let svd = a.svd(true, true);
            if let Ok(z) = svd.solve(&rhs, 1e-12) {
                let mut damp = 1.0;
                for _ in 0..8 {
                    let mut gen = Mat::<f64>::zeros(8, 8);
                    for (j, zs) in sharps.iter().enumerate() {
                        gen = gen.add(&zs.scale(&(z[j] * damp)));
                    }
                    let g = matrix_exp(&gen);
                    let y_new = y.pullback(&g);
                    if off_cartan_norm(&y_new) < off {
                        y = y_new;
                        h = h.matmul(&g);
                        improved = true;
                        break;
                    }
                    damp *= 0.5;
                }
            }
            iterations += 1;
            if improved {
                continue;
            }
        }

        // gradient direction: commutator [T, Y] (as coefficient matrices),
        // projected back to a 2-form; both signs tried in the line search
        let y_mat = y.two_form_matrix();
        let comm = t_mat.matmul(&y_mat).sub(&y_mat.matmul(&t_mat));
        let grad = KForm::from_two_form_matrix(Dim::R8, &comm);
        let gnorm = grad.norm_f64();
        if gnorm < 1e-14 * scale.max(1.0) {
            // critical point that is not Cartan (saddle): random kick
            let (forms, _) = spin7_basis_f64();
            let mut kick: KForm<f64> = KForm::zero(Dim::R8, 2);
            for (j, f) in forms.iter().enumerate() {
                let c = ((iterations * 37 + j * 13 + 5) % 17) as f64 / 17.0 - 0.5;
                kick = kick.add_form(&f.scale(&(c * 0.2)));
            }
            let g = exp_sharp(&kick);
            y = y.pullback(&g);
            h = h.matmul(&g);
            iterations += 1;
            continue;
        }
        let dir = two_form_sharp(&grad.scale(&(1.0 / gnorm)), &m);
        let base = f_val(&y);
        let mut accepted = false;
        let mut s = step;
        for _ in 0..40 {
            for sign in [1.0, -1.0] {
                let g = matrix_exp(&dir.scale(&(s * sign)));
                let y_new = y.pullback(&g);
                if f_val(&y_new) > base + 1e-15 * scale {
                    y = y_new;
                    h = h.matmul(&g);
                    step = (s * 2.0).min(0.5);
                    accepted = true;
                    break;
                }
            }
            if accepted {
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            // ascent stalled at machine precision; declare what we have
            let off = off_cartan_norm(&y);
            if off <= 1e-7 * scale.max(1.0) {
                let c = pair_coefficients(&y);
                return Ok(CartanResult {
                    conjugator: h,
                    coefficients: c,
                    residual: off,
                    iterations,
                });
            }
            return Err(CartanError::NoConvergence {
                residual: off,
                iterations,
            });
        }
        iterations += 1;
    }
    Err(CartanError::NoConvergence {
        residual: off_cartan_norm(&y),
        iterations,
    })
}

/// SU(4) block permutation sending plane j to plane perm[j] (planes are
/// the PAIRS). Odd permutations get a compensating half-turn on plane 0 to
/// keep the complex determinant 1, hence the matrix in Spin(7).
pub fn su4_block_permutation(perm: [usize; 4]) -> Mat<f64> {
    let mut sorted = perm;
    sorted.sort_unstable();
    assert_eq!(sorted, [0, 1, 2, 3], "not a permutation");
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    let mut m = Mat::<f64>::zeros(8, 8);
    for (j, &pj) in perm.iter().enumerate() {
        // plane j carried onto plane perm[j]
        m[(2 * pj, 2 * j)] = 1.0;
        m[(2 * pj + 1, 2 * j + 1)] = 1.0;
    }
    if inversions % 2 == 1 {
        // half-turn on the plane that landed at position 0
        for col in [0usize, 1] {
            for row in 0..8 {
                m[(row, col)] = -m[(row, col)];
            }
        }
    }
    m
}

/// SU(4) diagonal phases from the three rotation angles tau: theta_j with
/// sum(theta) = 0 chosen so that (theta1+theta2, theta1+theta3,
/// theta1+theta4) = tau. The matrix rotates plane j by theta_j.
pub fn su4_phase_from_tau(tau: [f64; 3]) -> Mat<f64> {
    let t1 = (tau[0] + tau[1] + tau[2]) / 2.0;
    let t2 = (tau[0] - tau[1] - tau[2]) / 2.0;
    let t3 = (-tau[0] + tau[1] - tau[2]) / 2.0;
    let t4 = (-tau[0] - tau[1] + tau[2]) / 2.0;
    let mut m = Mat::<f64>::zeros(8, 8);
    for (j, theta) in [t1, t2, t3, t4].into_iter().enumerate() {
        let (s, c) = theta.sin_cos();
        m[(2 * j, 2 * j)] = c;
        m[(2 * j, 2 * j + 1)] = -s;
        m[(2 * j + 1, 2 * j)] = s;
        m[(2 * j + 1, 2 * j + 1)] = c;
    }
    m
}

/// lambda^2 coordinates of a Lambda^2_7 form: a_j with
/// f = sum_j a_j (2 lambda^2(e^j)).
pub fn lambda2_coords(f: &KForm<f64>) -> [f64; 7] {
    let mut a = [0.0; 7];
    for j in 1..=7 {
        let l = lambda2_doubled::<f64>(j);
        a[j - 1] = f.dot(&l) / 4.0;
    }
    a
}

/// Whether two Cartan coefficient vectors lie on the same orbit of the
/// Weyl action, which is S4 x {+-1} on the four pair coefficients.
pub fn weyl_equal(a: &[f64; 4], b: &[f64; 4], tol: f64) -> bool {
    let sorted = |v: &[f64; 4], sign: f64| {
        let mut s: Vec<f64> = v.iter().map(|x| sign * x).collect();
        s.sort_by(f64::total_cmp);
        s
    };
    let sa = sorted(a, 1.0);
    for sign in [1.0, -1.0] {
        let sb = sorted(b, sign);
        if sa.iter().zip(&sb).all(|(x, y)| (x - y).abs() <= tol) {
            return true;
        }
    }
    false
}

/// Drift of a putative Spin(7) element: |h^* Phi - Phi|.
pub fn phi_drift(h: &Mat<f64>) -> f64 {
    let phi4 = standard_phi4::<f64>();
    phi4.pullback(h).sub_form(&phi4).norm_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::Irrep;
    use crate::structures::Spin7Structure;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn std_structure() -> &'static Spin7Structure<f64> {
        static S: OnceLock<Spin7Structure<f64>> = OnceLock::new();
        S.get_or_init(Spin7Structure::standard)
    }

    #[test]
    fn exp_of_zero_and_small() {
        assert_eq!(matrix_exp(&Mat::zeros(3, 3)), Mat::identity(3));
        // exp of a rotation generator
        let mut a = Mat::<f64>::zeros(2, 2);
        a[(0, 1)] = -1.0;
        a[(1, 0)] = 1.0;
        let e = matrix_exp(&a.scale(&0.5));
        assert!((e[(0, 0)] - 0.5f64.cos()).abs() < 1e-12);
        assert!((e[(1, 0)] - 0.5f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn spin7_exponentials_fix_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..5 {
            let h = random_spin7(&mut rng, 0.6);
            assert!(phi_drift(&h) < 1e-10, "drift {}", phi_drift(&h));
            // orthogonal
            let err = h.transpose().matmul(&h).sub(&Mat::identity(8)).max_abs();
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn su4_elements_fix_phi_and_act_as_expected() {
        // phases
        let h = su4_phase_from_tau([0.4, -1.1, 0.7]);
        assert!(phi_drift(&h) < 1e-12);
        // phases fix the Cartan forms and lambda2(e^1)
        let c = cartan_form(&[1.0, -2.0, 0.5, 0.5]);
        assert!(c.pullback(&h).sub_form(&c).norm_f64() < 1e-12);
        let om = lambda2_doubled::<f64>(1);
        assert!(om.pullback(&h).sub_form(&om).norm_f64() < 1e-12);
        // phases rotate the (2,3), (4,5), (6,7) lambda2 planes by tau
        let probe = lambda2_doubled::<f64>(2);
        let a = lambda2_coords(&probe.pullback(&h));
        let r = (a[1] * a[1] + a[2] * a[2]).sqrt();
        assert!((r - 1.0).abs() < 1e-12, "rotation is orthogonal on the plane");
        assert!(
            a[0].abs() + a[3].abs() + a[4].abs() + a[5].abs() + a[6].abs() < 1e-12,
            "plane (2,3) stays inside itself"
        );
        // permutations (even and odd) fix Phi and permute pair coefficients
        for perm in [[1usize, 0, 3, 2], [1, 2, 3, 0], [0, 2, 1, 3], [3, 1, 2, 0]] {
            let hp = su4_block_permutation(perm);
            assert!(phi_drift(&hp) < 1e-12, "perm {:?} drift {}", perm, phi_drift(&hp));
            let c0 = [0.5, -1.5, 2.5, -1.5];
            let pulled = cartan_form(&c0).pullback(&hp);
            let got = pair_coefficients(&pulled);
            for j in 0..4 {
                assert!((got[j] - c0[perm[j]]).abs() < 1e-12, "perm {:?}", perm);
            }
            assert!(off_cartan_norm(&pulled) < 1e-12);
        }
    }

    #[test]
    fn cartan_target_is_regular() {
        // centralizer of the target inside spin(7) must be exactly rank 3
        let t_mat = cartan_target().two_form_matrix();
        let (_, sharps) = spin7_basis_f64();
        let cols: Vec<Vec<f64>> = sharps
            .iter()
            .map(|z| {
                let c = t_mat.matmul(z).sub(&z.matmul(&t_mat));
                (0..8).flat_map(|i| (0..8).map(move |j| (i, j))).map(|(i, j)| c[(i, j)]).collect()
            })
            .collect();
        let a = Mat::from_rows(cols);
        assert_eq!(21 - a.rank_svd(1e-9), 3);
    }

    #[test]
    fn cartanize_recovers_known_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = std_structure();
        for trial in 0..6 {
            // random Cartan data, conjugated by a random Spin(7) element
            let raw: [f64; 3] = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let c = [raw[0], raw[1], raw[2], -(raw[0] + raw[1] + raw[2])];
            let h0 = random_spin7(&mut rng, 0.7);
            let f21 = cartan_form(&c).pullback(&h0);
            // stays in Lambda^2_21
            assert!(s.project(Irrep::L2_7, &f21).norm_f64() < 1e-9);
            let res = cartanize(&f21, 1e-12, 10_000).expect("converges");
            assert!(res.residual < 1e-9, "trial {} residual {}", trial, res.residual);
            // recovered coefficients match the input's up to the Weyl
            // action, which is S4 x {+-1} on the mu coordinates
            assert!(
                weyl_equal(&res.coefficients, &c, 1e-7),
                "trial {}: {:?} vs {:?}",
                trial,
                res.coefficients,
                c
            );
            assert!((res.coefficients.iter().sum::<f64>()).abs() < 1e-8);
            // conjugator is in Spin(7) and does conjugate
            assert!(phi_drift(&res.conjugator) < 1e-8);
            let moved = f21.pullback(&res.conjugator);
            assert!(off_cartan_norm(&moved) < 1e-8);
        }
    }

    #[test]
    fn cartanize_degenerate_spectra() {
        // repeated coefficients (the (-3m, m, m, m) and (-m,-m,m,m) families)
        let s = std_structure();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for c in [[-3.0, 1.0, 1.0, 1.0], [-1.0, -1.0, 1.0, 1.0], [-0.4, -0.4, -0.4, 1.2]] {
            let h0 = random_spin7(&mut rng, 0.5);
            let f21 = cartan_form(&c).pullback(&h0);
            assert!(s.project(Irrep::L2_7, &f21).norm_f64() < 1e-9);
            let res = cartanize(&f21, 1e-12, 10_000).expect("converges");
            assert!(res.residual < 1e-8, "c {:?} residual {}", c, res.residual);
            assert!(
                weyl_equal(&res.coefficients, &c, 1e-7),
                "c {:?} got {:?}",
                c,
                res.coefficients
            );
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        // the ascent's directional derivative convention
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h0 = random_spin7(&mut rng, 0.4);
        let y = cartan_form(&[1.0, -0.25, -0.5, -0.25]).pullback(&h0);
        let target = cartan_target();
        let (forms, sharps) = spin7_basis_f64();
        for j in [0usize, 5, 12, 20] {
            let analytic = pullback_derivative(&sharps[j], &y).dot(&target);
            let d = 1e-6;
            let gp = matrix_exp(&sharps[j].scale(&d));
            let gm = matrix_exp(&sharps[j].scale(&-d));
            let fd = (y.pullback(&gp).dot(&target) - y.pullback(&gm).dot(&target)) / (2.0 * d);
            assert!(
                (analytic - fd).abs() < 1e-6 * (1.0 + analytic.abs()),
                "basis {} ({:?}): {} vs {}",
                j,
                forms[j].terms().len(),
                analytic,
                fd
            );
        }
    }
}
