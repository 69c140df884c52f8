//! Brute-force reference implementations used only by tests.
//!
//! These deliberately avoid the mask-merge machinery of `forms`: the wedge
//! is computed by full antisymmetrization over permutations and the
//! interior product by direct evaluation, so agreement with the fast paths
//! is meaningful evidence rather than a tautology.

use crate::forms::{basis_len, basis_mask, tuple_of_mask, KForm};
use crate::scalar::Scalar;

fn perm_sign(perm: &[usize]) -> i32 {
    let mut s = 1;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in out {
            for v in 0..n {
                if !p.contains(&v) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

/// Evaluate a k-form on an arbitrary tuple of basis vectors by
/// antisymmetry: zero on repeats, +/- the stored coefficient otherwise.
fn evaluate<S: Scalar>(f: &KForm<S>, args: &[usize]) -> S {
    let mut sorted: Vec<usize> = args.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return S::zero();
    }
    // sign of the permutation taking args to sorted order
    let mut perm: Vec<usize> = (0..args.len()).collect();
    perm.sort_by_key(|&i| args[i]);
    let sign = perm_sign(&perm);
    let c = f.get(&sorted);
    if sign > 0 {
        c
    } else {
        S::zero() - c
    }
}

/// (a ^ b)(v_1..v_{p+q}) = 1/(p! q!) sum_{pi} sign(pi) a(..) b(..).
pub fn naive_wedge<S: Scalar>(a: &KForm<S>, b: &KForm<S>) -> KForm<S> {
    let dim = a.dim();
    let (p, q) = (a.degree(), b.degree());
    let deg = p + q;
    if deg > dim.n() {
        return KForm::zero(dim, deg.min(8));
    }
    let mut out = KForm::zero(dim, deg);
    let fact = |n: usize| -> i64 { (1..=n as i64).product::<i64>().max(1) };
    let denom = S::from_int(fact(p) * fact(q));
    for t in 0..basis_len(dim, deg) {
        let tuple = tuple_of_mask(basis_mask(dim, deg, t));
        let mut acc = S::zero();
        for perm in permutations(deg) {
            let args: Vec<usize> = perm.iter().map(|&i| tuple[i]).collect();
            let va = evaluate(a, &args[..p]);
            if va.is_zero() {
                continue;
            }
            let vb = evaluate(b, &args[p..]);
            if vb.is_zero() {
                continue;
            }
            let s = perm_sign(&perm);
            let term = va * vb;
            acc = if s > 0 { acc + term } else { acc - term };
        }
        out.set_coeff(t, acc / denom.clone());
    }
    out
}

/// i(e_v) a evaluated slotwise: (i(v)a)(w_2..w_k) = a(v, w_2..w_k).
pub fn naive_interior<S: Scalar>(v: usize, a: &KForm<S>) -> KForm<S> {
    let dim = a.dim();
    let deg = a.degree() - 1;
    let mut out = KForm::zero(dim, deg);
    for t in 0..basis_len(dim, deg) {
        let tuple = tuple_of_mask(basis_mask(dim, deg, t));
        let mut args = vec![v];
        args.extend(&tuple);
        out.set_coeff(t, evaluate(a, &args));
    }
    out
}
