//! Exterior algebra basics on R^8: wedge, interior product, Hodge star,
//! and the identities they satisfy — all in exact rational arithmetic.
//!
//!     cargo run -p spin7-ddt --example exterior_algebra

use spin7_ddt::forms::{two_form_sharp, Dim, KForm, MetricData};
use spin7_ddt::scalar::{rat, Rat};

fn main() {
    let m = MetricData::<Rat>::standard(Dim::R8);

    let omega = KForm::<Rat>::from_int_terms(
        Dim::R8,
        2,
        &[(1, &[0, 1]), (1, &[2, 3]), (1, &[4, 5]), (1, &[6, 7])],
    );
    println!("omega        = {:?}", omega);
    println!("|omega|^2    = {}", omega.norm_sq(&m));

    let om3 = omega.wedge(&omega).wedge(&omega);
    println!("omega^3      = {:?}", om3);
    println!("6 * star(omega) matches: {}", om3 == omega.hodge_star(&m).scale(&rat(6)));

    let f = KForm::<Rat>::monomial(Dim::R8, &[0, 1, 2, 3]);
    println!("star e^0123  = {:?}", f.hodge_star(&m));
    println!("i(e_0) e^0123 = {:?}", f.interior_basis(0));

    // double star sign on a mixed form
    let g = KForm::<Rat>::from_int_terms(Dim::R8, 3, &[(2, &[0, 1, 2]), (-1, &[3, 5, 7])]);
    let gss = g.hodge_star(&m).hodge_star(&m);
    println!("star(star(g)) = (-1)^(3*5) g: {}", gss == g.neg_form());

    // the sharp of a 2-form is skew and I + F# has positive determinant
    let sharp = two_form_sharp(&omega, &m);
    let one_plus = spin7_ddt::forms::one_plus_sharp(&omega, &m);
    println!("omega# skew: {}", sharp.transpose() == sharp.scale(&rat(-1)));
    println!("det(I + omega#) = {}", one_plus.det());
}
