//! Finite-difference derivatives of the torus distance along a direction.

use green_teich::error::Result;
use green_teich::teich::{smoothness_probe, TorusModulus};
use num_complex::Complex64;

fn main() -> Result<()> {
    let x = TorusModulus::new(Complex64::new(0.3, 1.2))?;
    let y = TorusModulus::square();
    for r in smoothness_probe(x, y, Complex64::new(1.0, 0.0), 1e-2, 6)? {
        println!("h = {:.2e}: d' = {:.10} d'' = {:.8}", r.h, r.first, r.second);
    }
    Ok(())
}
