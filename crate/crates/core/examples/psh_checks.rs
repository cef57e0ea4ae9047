//! Sub-mean-value, contraction and hyperconvexity checks, with a negative
//! control for each.

use green_teich::domains::ModelDomain;
use green_teich::error::Result;
use green_teich::psh::{
    contraction_check, hyperconvexity_probe, submean_check, FieldDomain, GreenFunction, HolomorphicMap, ScalarField,
};
use green_teich::teich::TorusModulus;
use green_teich::vector::ComplexVector;
use num_complex::Complex64;

fn main() -> Result<()> {
    let ball = ModelDomain::EuclideanBall { dim: 2 };
    let pole = ComplexVector::from_reals(&[0.1, -0.2]);
    let g = ScalarField::green(ball.clone(), pole.clone())?;
    let x = ComplexVector::from_reals(&[0.4, 0.1]);
    let xi = ComplexVector::from_reals(&[0.3, 0.4]);
    let s = submean_check(&g, &x, &xi, 0.5, 64)?;
    println!("green on ball2: u(x) = {:?} <= mean {:?}: {}", s.lhs, s.rhs, s.pass);
    let c = submean_check(&ScalarField::negative_square_norm(FieldDomain::Model(ball)), &x, &xi, 0.5, 64)?;
    println!("-|z|^2 control passes? {}", c.pass);

    let disc = GreenFunction::oracle(ModelDomain::Disc);
    let pairs = vec![
        (ComplexVector::from_reals(&[0.3]), ComplexVector::from_reals(&[-0.5])),
        (ComplexVector::scalar(Complex64::new(0.1, 0.7)), ComplexVector::from_reals(&[0.2])),
    ];
    let r = contraction_check(&disc, &disc, &HolomorphicMap::Square, &pairs)?;
    println!("z -> z^2 does not increase g: {} (worst excess {:.3e})", r.pass, r.worst_excess);

    let tau = TorusModulus::new(Complex64::new(0.2, 1.1))?;
    let ray = ComplexVector::from_reals(&[0.3]);
    let h = hyperconvexity_probe(&ScalarField::teich_green(tau), &ComplexVector::scalar(tau.value()), &ray, 12)?;
    println!("torus ray: monotone {} tail {:?} pass {}", h.monotone, h.tail, h.pass);
    Ok(())
}
