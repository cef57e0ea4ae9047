//! Closed-form Green functions on the model domains.

use green_teich::domains::{ModelDomain, NormKind};
use green_teich::error::Result;
use green_teich::vector::ComplexVector;

fn main() -> Result<()> {
    let cases = [
        ("disc", "0", "0.5"),
        ("ball2", "0,0", "0.5,0"),
        ("polydisc2", "0;0", "0.5;0.25"),
        ("sup2", "0.3;0.6i", "0;0"),
    ];
    for (name, x, y) in cases {
        let domain: ModelDomain = name.parse()?;
        let x = ComplexVector::parse_with_dim(x, domain.dim())?;
        let y = ComplexVector::parse_with_dim(y, domain.dim())?;
        let g = domain.green_oracle(&x, &y)?;
        println!("{name:>10}  g(x, y) = {:?}", g);
    }

    let l1 = ModelDomain::banach_ball(NormKind::L1, ComplexVector::zeros(2), 1.0)?;
    let x = ComplexVector::from_reals(&[0.2, 0.3]);
    let off = ComplexVector::from_reals(&[0.1, 0.0]);
    println!("l1 ball, off-center pole has a closed form: {}", l1.green_oracle(&x, &off)?.is_some());
    Ok(())
}
