//! The model G2 and Spin(7) structures: coefficients, induced metric,
//! irreducible projections and their ranks.
//!
//!     cargo run -p spin7-ddt --example model_structures

use spin7_ddt::forms::{Dim, KForm};
use spin7_ddt::scalar::Rat;
use spin7_ddt::structures::{
    standard_phi4, standard_star_varphi, standard_varphi, G2Structure, Irrep, Spin7Structure,
};

fn main() {
    let varphi = standard_varphi::<Rat>();
    let star_varphi = standard_star_varphi::<Rat>();
    let phi4 = standard_phi4::<Rat>();

    println!("varphi    = {:?}", varphi);
    println!("*7 varphi = {:?}", star_varphi);
    println!("Phi       = {:?}", phi4);
    println!("|Phi|^2   = {}", phi4.dot(&phi4));

    let g2 = G2Structure::<Rat>::standard();
    println!(
        "metric recovered from the cubic formula is the identity: {}",
        g2.metric_from_varphi() == spin7_ddt::matrix::Mat::identity(7)
    );

    let s = Spin7Structure::<Rat>::standard();
    println!("\nprojector ranks per degree:");
    for irrep in Irrep::all() {
        println!(
            "  {:?}: rank {} (idempotent: {})",
            irrep,
            s.projectors().get(irrep).rank(0.0),
            {
                let p = s.projectors().get(irrep);
                p.matmul(p) == p.clone()
            }
        );
    }

    // a 2-form splits into its 7 + 21 parts
    let f = KForm::<Rat>::from_int_terms(Dim::R8, 2, &[(1, &[0, 1]), (2, &[1, 5]), (-1, &[2, 3])]);
    let f7 = s.project(Irrep::L2_7, &f);
    let f21 = s.project(Irrep::L2_21, &f);
    println!("\nf      = {:?}", f);
    println!("f_7    = {:?}", f7);
    println!("f_21   = {:?}", f21);
    println!("sum ok = {}", f7.add_form(&f21) == f);
}
