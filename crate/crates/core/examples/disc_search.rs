//! Disc-functional upper bound for the Green function, compared with the
//! oracle, plus a probe on an l1 ball where no closed form exists.

use green_teich::disc_functional::{minimize_disc_functional, SearchConfig};
use green_teich::domains::{ModelDomain, NormKind};
use green_teich::error::Result;
use green_teich::vector::ComplexVector;

fn main() -> Result<()> {
    let cfg = SearchConfig::default();
    let ball = ModelDomain::EuclideanBall { dim: 2 };
    let x = ComplexVector::from_reals(&[0.0, 0.0]);
    let y = ComplexVector::from_reals(&[0.5, 0.0]);
    let r = minimize_disc_functional(&ball, &x, &y, &cfg)?;
    let oracle = ball.green_oracle(&x, &y)?.unwrap();
    println!("ball2: estimate {:?}  oracle {:?}", r.estimate, oracle);
    println!("witness degree {} mobius {}", r.witness.degree(), r.witness.mobius());
    for s in &r.stages {
        println!("  stage degree {}: best {:.3e} after {} evaluations", s.degree, s.best, s.evaluations);
    }

    let l1 = ModelDomain::banach_ball(NormKind::L1, ComplexVector::zeros(2), 1.0)?;
    let x = ComplexVector::from_reals(&[0.2, 0.1]);
    let y = ComplexVector::from_reals(&[-0.1, 0.3]);
    let r = minimize_disc_functional(&l1, &x, &y, &SearchConfig { max_degree: 2, ..cfg })?;
    println!("l1 ball (probe only, no oracle): estimate {:?}", r.estimate);
    Ok(())
}
