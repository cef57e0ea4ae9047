//! Infinitesimal invariant metrics: the Azukawa metric read off the
//! logarithmic pole of the Green function, and the Kobayashi–Royden metric
//! from extremal discs.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disc_functional::{kobayashi_royden_search, minimize_disc_functional, AnalyticDisc, SearchConfig};
use crate::domains::{Membership, ModelDomain};
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::teich::{teich_green, TorusModulus};
use crate::vector::{ComplexVector, I};

/// A tangent vector `(x, xi)` with `xi != 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: ComplexVector,
    pub direction: ComplexVector,
}

impl TangentVector {
    pub fn new(base: ComplexVector, direction: ComplexVector) -> Result<Self> {
        if base.dim() != direction.dim() {
            return Err(Error::invalid("base and direction dimensions differ"));
        }
        if !(direction.norm() > 0.0) || !direction.is_finite() {
            return Err(Error::invalid("tangent direction must be nonzero"));
        }
        Ok(TangentVector { base, direction })
    }
}

/// Geometric ladder used for the Azukawa limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitConfig {
    pub lambda0: f64,
    pub rungs: usize,
    /// Largest accepted difference between the last two rungs.
    pub tol: f64,
    /// Used only where no closed-form Green function exists.
    pub search: SearchConfig,
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig { lambda0: 1e-2, rungs: 6, tol: 1e-3, search: SearchConfig::default() }
    }
}

impl LimitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0 && self.lambda0 < 1.0) {
            return Err(Error::invalid("lambda0 must lie in (0, 1)"));
        }
        if self.rungs < 3 {
            return Err(Error::invalid("the Azukawa ladder needs at least 3 rungs"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenSource {
    Oracle,
    Estimator,
    TeichClosedForm,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AzukawaResult {
    pub value: f64,
    pub lambdas: Vec<f64>,
    /// `exp(g(x + lambda xi, x)) / |lambda|` per rung.
    pub rungs: Vec<f64>,
    /// Empirical order `p` in `rung ~ A + c lambda^p`; `None` when the rungs
    /// agree to rounding.
    pub observed_order: Option<f64>,
    pub converged: bool,
    pub warning: Option<String>,
    pub source: GreenSource,
}

/// Two-level Richardson extrapolation of the last three rungs of a halving
/// ladder.
fn richardson(a: &[f64]) -> f64 {
    let n = a.len();
    let (a0, a1, a2) = (a[n - 3], a[n - 2], a[n - 1]);
    let r1 = 2.0 * a1 - a0;
    let r2 = 2.0 * a2 - a1;
    (4.0 * r2 - r1) / 3.0
}

fn ladder_result(lambdas: Vec<f64>, rungs: Vec<f64>, scale: f64, tol: f64, source: GreenSource) -> AzukawaResult {
    let n = rungs.len();
    let d1 = rungs[n - 2] - rungs[n - 3];
    let d2 = rungs[n - 1] - rungs[n - 2];
    let noise = 1e-13 * rungs[n - 1].abs().max(1.0);
    let observed_order = (d1.abs() > noise && d2.abs() > noise).then(|| (d1 / d2).abs().log2());
    let converged = d2.abs() <= tol;
    let warning = (!converged).then(|| format!("last two rungs differ by {:.3e} > tol {tol:.1e}", d2.abs()));
    // Plain rungs that already agree need no extrapolation.
    let limit = if d1.abs() <= noise && d2.abs() <= noise { rungs[n - 1] } else { richardson(&rungs) };
    AzukawaResult {
        value: limit * scale,
        lambdas,
        rungs: rungs.iter().map(|r| r * scale).collect(),
        observed_order,
        converged,
        warning,
        source,
    }
}

/// `exp(g) / lambda`, evaluated as `exp(g - log lambda)`.
fn ratio(g: ExtReal, lambda: f64) -> f64 {
    match g {
        ExtReal::Finite(v) => (v - lambda.ln()).exp(),
        ExtReal::NegInfinity => 0.0,
    }
}

/// Azukawa metric `lim exp(g_D(x + lambda xi, x)) / |lambda|`.
pub fn azukawa(domain: &ModelDomain, v: &TangentVector, cfg: &LimitConfig) -> Result<AzukawaResult> {
    cfg.validate()?;
    if v.base.dim() != domain.dim() {
        return Err(Error::invalid("tangent vector has the wrong dimension"));
    }
    domain.require_inside(&v.base)?;
    let len = v.direction.norm();
    let dir = v.direction.scale_real(1.0 / len);
    let lambdas: Vec<f64> = (0..cfg.rungs).map(|k| cfg.lambda0 * 0.5f64.powi(k as i32)).collect();
    let points: Vec<ComplexVector> = lambdas.iter().map(|&l| v.base.axpy(Complex64::new(l, 0.0), &dir)).collect();
    for (p, &l) in points.iter().zip(&lambdas) {
        if domain.membership(p) != Membership::Inside {
            return Err(Error::LadderExitsDomain(l * len));
        }
    }
    let mut source = GreenSource::Oracle;
    let mut rungs = Vec::with_capacity(cfg.rungs);
    for (p, &l) in points.iter().zip(&lambdas) {
        let g = match domain.green_oracle(p, &v.base)? {
            Some(g) => g,
            None => {
                source = GreenSource::Estimator;
                minimize_disc_functional(domain, p, &v.base, &cfg.search)?.estimate
            }
        };
        rungs.push(ratio(g, l));
    }
    Ok(ladder_result(lambdas, rungs, len, cfg.tol, source))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KobayashiResult {
    pub value: f64,
    pub witness: AnalyticDisc,
}

/// Kobayashi–Royden metric `inf { 1/r : f(0) = x, f'(0) = r xi }` over the
/// search family (an upper bound of the true infimum).
pub fn kobayashi_royden(domain: &ModelDomain, v: &TangentVector, cfg: &SearchConfig) -> Result<KobayashiResult> {
    if v.base.dim() != domain.dim() {
        return Err(Error::invalid("tangent vector has the wrong dimension"));
    }
    let r = kobayashi_royden_search(domain, &v.base, &v.direction, cfg)?;
    Ok(KobayashiResult { value: r.value, witness: r.witness })
}

/// Closed-form Kobayashi–Royden metric on the disc and the Euclidean ball:
/// `sqrt(|xi|^2 / (1 - |x|^2) + |<xi, x>|^2 / (1 - |x|^2)^2)`.
pub fn ball_metric_closed_form(v: &TangentVector) -> f64 {
    let s = 1.0 - v.base.norm_sqr();
    let ip = v.direction.inner(&v.base).norm_sqr();
    (v.direction.norm_sqr() / s + ip / (s * s)).sqrt()
}

pub const THEOREM2_TOL: f64 = 5e-3;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem2Sample {
    pub base: ComplexVector,
    pub direction: ComplexVector,
    pub azukawa: f64,
    pub kobayashi_royden: f64,
    pub discrepancy: f64,
    pub green_source: GreenSource,
    pub closed_form: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub domain: String,
    pub samples: Vec<Theorem2Sample>,
    pub max_discrepancy: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares the two metrics on every sample.
pub fn theorem2_check(
    domain: &ModelDomain,
    samples: &[TangentVector],
    limit: &LimitConfig,
    search: &SearchConfig,
    tol: f64,
) -> Result<Theorem2Report> {
    if samples.is_empty() {
        return Err(Error::invalid("theorem2_check needs at least one sample"));
    }
    let rows = samples
        .par_iter()
        .map(|v| -> Result<Theorem2Sample> {
            let v = TangentVector::new(v.base.clone(), v.direction.clone())?;
            let a = azukawa(domain, &v, limit)?;
            let k = kobayashi_royden(domain, &v, search)?;
            let closed_form = match domain {
                ModelDomain::Disc | ModelDomain::EuclideanBall { .. } => Some(ball_metric_closed_form(&v)),
                _ => None,
            };
            Ok(Theorem2Sample {
                base: v.base,
                direction: v.direction,
                azukawa: a.value,
                kobayashi_royden: k.value,
                discrepancy: (a.value - k.value).abs(),
                green_source: a.source,
                closed_form,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_discrepancy = rows.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    Ok(Theorem2Report { domain: domain.short_name(), samples: rows, max_discrepancy, tol, pass: max_discrepancy <= tol })
}

/// Teichmüller–Finsler norm of `xi` at `tau` on the torus Teichmüller space:
/// `|xi| / (2 Im tau)`.
pub fn torus_finsler(tau: TorusModulus, xi: Complex64) -> f64 {
    xi.norm() / (2.0 * tau.value().im)
}

/// Azukawa metric of the torus Teichmüller space from `log k`.
pub fn torus_azukawa(tau: TorusModulus, xi: Complex64, cfg: &LimitConfig) -> Result<AzukawaResult> {
    cfg.validate()?;
    let len = xi.norm();
    if !(len > 0.0) {
        return Err(Error::invalid("tangent direction must be nonzero"));
    }
    let dir = xi / len;
    let lambdas: Vec<f64> = (0..cfg.rungs).map(|k| cfg.lambda0 * 0.5f64.powi(k as i32)).collect();
    let mut rungs = Vec::with_capacity(cfg.rungs);
    for &l in &lambdas {
        let p = TorusModulus::new(tau.value() + dir * l).map_err(|_| Error::LadderExitsDomain(l * len))?;
        rungs.push(ratio(teich_green(p, tau), l));
    }
    Ok(ladder_result(lambdas, rungs, len, cfg.tol, GreenSource::TeichClosedForm))
}

/// Kobayashi–Royden metric of the torus Teichmüller space, computed on the
/// disc model after the Cayley map `w = (tau - i) / (tau + i)`.
pub fn torus_kobayashi_royden(tau: TorusModulus, xi: Complex64, cfg: &SearchConfig) -> Result<KobayashiResult> {
    let t = tau.value();
    let w = (t - I) / (t + I);
    let eta = xi * 2.0 * I / ((t + I) * (t + I));
    let v = TangentVector::new(ComplexVector::scalar(w), ComplexVector::scalar(eta))?;
    kobayashi_royden(&ModelDomain::Disc, &v, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tv(base: &[(f64, f64)], dir: &[(f64, f64)]) -> TangentVector {
        TangentVector::new(
            ComplexVector(base.iter().map(|&(a, b)| c(a, b)).collect()),
            ComplexVector(dir.iter().map(|&(a, b)| c(a, b)).collect()),
        )
        .unwrap()
    }

    fn quick_search() -> SearchConfig {
        SearchConfig { max_degree: 2, n_starts: 4, ..SearchConfig::default() }
    }

    #[test]
    fn azukawa_examples() {
        let cfg = LimitConfig::default();
        let r = azukawa(&ModelDomain::Disc, &tv(&[(0.0, 0.0)], &[(1.0, 0.0)]), &cfg).unwrap();
        assert!(r.rungs.iter().all(|&v| v == 1.0), "{:?}", r.rungs);
        assert_eq!(r.value, 1.0);
        assert!(r.observed_order.is_none());

        let r = azukawa(&ModelDomain::Disc, &tv(&[(0.5, 0.0)], &[(1.0, 0.0)]), &cfg).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-9, "{}", r.value);
        assert!((r.observed_order.unwrap() - 1.0).abs() < 0.1);

        let ball = ModelDomain::euclidean_ball(2).unwrap();
        let r = azukawa(&ball, &tv(&[(0.0, 0.0), (0.0, 0.0)], &[(0.6, 0.0), (0.8, 0.0)]), &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.source, GreenSource::Oracle);
    }

    #[test]
    fn azukawa_matches_ball_closed_form() {
        let ball = ModelDomain::euclidean_ball(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = crate::disc_functional::random_ball_point(&mut rng, 2, 0.8);
            let xi = crate::disc_functional::random_ball_point(&mut rng, 2, 1.0);
            let v = TangentVector::new(x, xi).unwrap();
            let a = azukawa(&ball, &v, &LimitConfig::default()).unwrap();
            let exact = ball_metric_closed_form(&v);
            assert!((a.value - exact).abs() < 1e-6 * exact, "{} vs {exact}", a.value);
        }
    }

    #[test]
    fn ladder_exit_is_reported() {
        let cfg = LimitConfig { lambda0: 0.5, ..LimitConfig::default() };
        let e = azukawa(&ModelDomain::Disc, &tv(&[(0.9, 0.0)], &[(1.0, 0.0)]), &cfg).unwrap_err();
        assert!(matches!(e, Error::LadderExitsDomain(_)));
    }

    #[test]
    fn zero_direction_rejected() {
        assert!(TangentVector::new(ComplexVector::zeros(1), ComplexVector::zeros(1)).is_err());
    }

    #[test]
    fn kobayashi_examples() {
        let cfg = quick_search();
        let r = kobayashi_royden(&ModelDomain::Disc, &tv(&[(0.0, 0.0)], &[(1.0, 0.0)]), &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        let r = kobayashi_royden(&ModelDomain::Disc, &tv(&[(0.5, 0.0)], &[(1.0, 0.0)]), &cfg).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-6, "{}", r.value);
        let ball = ModelDomain::euclidean_ball(2).unwrap();
        let r = kobayashi_royden(&ball, &tv(&[(0.0, 0.0), (0.0, 0.0)], &[(0.0, 0.6), (0.8, 0.0)]), &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-4, "{}", r.value);
    }

    #[test]
    fn homogeneity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ball = ModelDomain::euclidean_ball(2).unwrap();
        let v = tv(&[(0.2, -0.1), (0.3, 0.1)], &[(0.4, 0.2), (-0.5, 0.3)]);
        let base_a = azukawa(&ball, &v, &LimitConfig::default()).unwrap().value;
        let base_k = kobayashi_royden(&ball, &v, &quick_search()).unwrap().value;
        for _ in 0..3 {
            let s = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let w = TangentVector::new(v.base.clone(), v.direction.scale(s)).unwrap();
            let a = azukawa(&ball, &w, &LimitConfig::default()).unwrap().value;
            assert!((a - s.norm() * base_a).abs() < 1e-10 * a.max(1.0), "{a} vs {}", s.norm() * base_a);
            let k = kobayashi_royden(&ball, &w, &quick_search()).unwrap().value;
            assert!((k - s.norm() * base_k).abs() < 1e-10 * k.max(1.0), "{k} vs {}", s.norm() * base_k);
        }
    }

    #[test]
    fn kobayashi_contracts_under_embedding() {
        let ball = ModelDomain::euclidean_ball(2).unwrap();
        for (x, xi) in [((0.3, 0.2), (1.0, 0.5)), ((-0.6, 0.1), (0.2, -1.0))] {
            let disc = kobayashi_royden(&ModelDomain::Disc, &tv(&[x], &[xi]), &quick_search()).unwrap().value;
            let emb = kobayashi_royden(&ball, &tv(&[x, (0.0, 0.0)], &[xi, (0.0, 0.0)]), &quick_search())
                .unwrap()
                .value;
            assert!(emb <= disc + 1e-6, "{emb} > {disc}");
        }
    }

    #[test]
    fn azukawa_equals_royden_on_the_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let samples: Vec<TangentVector> = (0..4)
            .map(|_| {
                let x = crate::disc_functional::random_ball_point(&mut rng, 1, 0.8);
                let xi = crate::disc_functional::random_ball_point(&mut rng, 1, 1.0);
                TangentVector::new(x, xi).unwrap()
            })
            .collect();
        let r = theorem2_check(&ModelDomain::Disc, &samples, &LimitConfig::default(), &quick_search(), THEOREM2_TOL)
            .unwrap();
        assert!(r.pass, "{}", r.max_discrepancy);
        for s in &r.samples {
            let exact = s.closed_form.unwrap();
            assert!((s.azukawa - exact).abs() < 5e-3 && (s.kobayashi_royden - exact).abs() < 5e-3);
        }
        assert!(theorem2_check(&ModelDomain::Disc, &[], &LimitConfig::default(), &quick_search(), THEOREM2_TOL)
            .is_err());
    }

    #[test]
    fn torus_metrics_agree_with_finsler_form() {
        let tau = TorusModulus::new(c(0.4, 1.3)).unwrap();
        let xi = c(0.7, -0.2);
        let f = torus_finsler(tau, xi);
        let a = torus_azukawa(tau, xi, &LimitConfig::default()).unwrap().value;
        let k = torus_kobayashi_royden(tau, xi, &quick_search()).unwrap().value;
        assert!((a - f).abs() < 1e-8, "{a} vs {f}");
        assert!((k - f).abs() < 5e-3, "{k} vs {f}");
    }
}
