//! Azukawa and Kobayashi–Royden metrics on the disc, the ball and the torus.

use green_teich::disc_functional::SearchConfig;
use green_teich::domains::ModelDomain;
use green_teich::error::Result;
use green_teich::metrics::{
    azukawa, ball_metric_closed_form, kobayashi_royden, torus_azukawa, torus_finsler, torus_kobayashi_royden,
    LimitConfig, TangentVector,
};
use green_teich::teich::TorusModulus;
use green_teich::vector::ComplexVector;
use num_complex::Complex64;

fn main() -> Result<()> {
    let limit = LimitConfig::default();
    let search = SearchConfig::default();
    let cases = [
        (ModelDomain::Disc, TangentVector::new(ComplexVector::from_reals(&[0.5]), ComplexVector::from_reals(&[1.0]))?),
        (
            ModelDomain::EuclideanBall { dim: 2 },
            TangentVector::new(ComplexVector::from_reals(&[0.3, 0.2]), ComplexVector::from_reals(&[0.0, 1.0]))?,
        ),
    ];
    for (domain, v) in &cases {
        let a = azukawa(domain, v, &limit)?;
        let k = kobayashi_royden(domain, v, &search)?;
        println!(
            "{domain}: azukawa {:.8} kobayashi-royden {:.8} closed form {:.8}",
            a.value,
            k.value,
            ball_metric_closed_form(v)
        );
    }

    let tau = TorusModulus::new(Complex64::new(0.5, 1.5))?;
    let xi = Complex64::new(1.0, 0.5);
    let a = torus_azukawa(tau, xi, &limit)?;
    let k = torus_kobayashi_royden(tau, xi, &search)?;
    println!("torus: azukawa {:.8} kobayashi-royden {:.8} |xi|/(2 Im tau) {:.8}", a.value, k.value, torus_finsler(tau, xi));
    Ok(())
}
