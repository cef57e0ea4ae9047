//! Hamilton–Krushkal extremality tests on the torus and the disc, and the
//! plurisubharmonic certificate along a ray.

use green_teich::error::Result;
use green_teich::extremality::{
    is_extremal, theorem3_certificate_check, BasisDomain, BeltramiField, QuadDiffBasis, QuadratureConfig,
};
use green_teich::teich::{TorusBeltrami, TorusModulus};
use num_complex::Complex64;

fn main() -> Result<()> {
    let quad = QuadratureConfig::default();
    let tau = TorusModulus::square();
    let constant = BeltramiField::constant(Complex64::new(0.3, 0.0))?;
    let r = is_extremal(&constant, &QuadDiffBasis::torus_constant(tau), &quad, 1e-12)?;
    println!("torus, constant 0.3: hk {:.15} verdict {:?}", r.hk_value, r.verdict);

    let alternating = BeltramiField::torus_alternating(0.3)?;
    let r = is_extremal(&alternating, &QuadDiffBasis::torus_constant(tau), &quad, 1e-6)?;
    println!("torus, alternating ±0.3: hk {:.3e} verdict {:?}", r.hk_value, r.verdict);

    let basis = QuadDiffBasis::monomials(6, BasisDomain::Disc);
    let teich = BeltramiField::constant(Complex64::new(0.4, 0.0))?;
    let r = is_extremal(&teich, &basis, &quad, 1e-6)?;
    println!("disc, 0.4 conj(phi)/|phi| with phi = 1: hk {:.12} verdict {:?}", r.hk_value, r.verdict);
    let angular = BeltramiField::angular4(0.4)?;
    let r = is_extremal(&angular, &basis, &quad, 1e-6)?;
    println!("disc, angular4: hk {:.5} verdict {:?} provisional {}", r.hk_value, r.verdict, r.provisional);

    let cert = theorem3_certificate_check(TorusBeltrami::new(Complex64::new(0.2, 0.1))?, tau, &[0.1, 0.01, 0.001])?;
    println!(
        "certificate: max ratio deviation {:.1e}, f at mu0 {:.15} vs |mu0| {:.15}",
        cert.max_ratio_deviation, cert.certificate_at_mu0, cert.norm_mu0
    );
    Ok(())
}
