//! Layered configuration and the JSON / CSV report envelope.

use green_teich::config::RunConfig;
use green_teich::error::Result;
use green_teich::report::{to_value, Report};
use green_teich::teich::{teich_distance, TorusModulus};
use num_complex::Complex64;

fn main() -> Result<()> {
    let mut cfg = RunConfig::default();
    cfg.apply_text("seed = 11\nmax_degree = 3\ntol.eq2_transform = 1e-13\n")?;
    cfg.set("format", "csv")?;
    cfg.validate()?;

    let x = TorusModulus::new(Complex64::new(1.0, 1.0))?;
    let r = teich_distance(x, TorusModulus::square());
    let report = Report::new("teich", to_value(&cfg)?, r, true)?;
    println!("{}", report.to_csv());
    Ok(())
}
