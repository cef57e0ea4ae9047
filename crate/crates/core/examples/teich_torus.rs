//! Teichmüller distance on the torus moduli space and the identity
//! log k = log tanh d = half-plane Green function.

use green_teich::error::Result;
use green_teich::teich::{
    canonical_projection, eq2_identity_check, extremal_beltrami, lemma2_check, teich_distance, TorusBeltrami,
    TorusModulus,
};
use num_complex::Complex64;

fn main() -> Result<()> {
    let i = TorusModulus::square();
    let two_i = TorusModulus::new(Complex64::new(0.0, 2.0))?;
    let r = teich_distance(i, two_i);
    println!("tau = i vs 2i: k = {:.6} d = {:.6} g = {:?}", r.k, r.d.value(), r.g);

    let mu = extremal_beltrami(i, two_i);
    println!("extremal coefficient {}", mu.value());
    let back = canonical_projection(TorusBeltrami::new(-mu.value())?, i);
    println!("projecting the fiber witness returns {}", back.value());

    let report = eq2_identity_check(100, 7)?;
    println!(
        "100 random pairs: max |log k - log tanh d| = {:.1e}, max |log k - g_H| = {:.1e}",
        report.max_transform_discrepancy, report.max_half_plane_discrepancy
    );
    let l2 = lemma2_check(two_i, i)?;
    println!("g = log |mu| in the fiber: discrepancy {:.1e}", l2.discrepancy);
    Ok(())
}
