//! Numerical checks of plurisubharmonicity, holomorphic contraction and
//! hyperconvexity for Green functions and for deliberately bad control fields.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{Membership, ModelDomain};
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::hyperbolic::{DiscAutomorphism, DiscPoint, COINCIDENCE_TOL};
use crate::teich::{teich_green, TorusModulus};
use crate::vector::ComplexVector;

/// Where a scalar field lives: a model domain, or the upper half-plane of
/// torus moduli.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldDomain {
    Model(ModelDomain),
    TeichTorus,
}

impl FieldDomain {
    pub fn dim(&self) -> usize {
        match self {
            FieldDomain::Model(d) => d.dim(),
            FieldDomain::TeichTorus => 1,
        }
    }

    pub fn contains(&self, x: &ComplexVector) -> bool {
        match self {
            FieldDomain::Model(d) => x.dim() == d.dim() && d.membership(x) == Membership::Inside,
            FieldDomain::TeichTorus => x.dim() == 1 && x[0].im > 0.0 && x.is_finite(),
        }
    }

    /// Parameter `t` at which `x + t v` leaves the domain (`+inf` if never).
    pub fn exit_time(&self, x: &ComplexVector, v: &ComplexVector) -> f64 {
        match self {
            FieldDomain::Model(d) => d.exit_time(x.as_slice(), v.as_slice(), 1.0),
            FieldDomain::TeichTorus => {
                if v[0].im < 0.0 {
                    -x[0].im / v[0].im
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

type Evaluator = Box<dyn Fn(&ComplexVector) -> ExtReal + Send + Sync>;

pub struct ScalarField {
    pub name: String,
    pub domain: FieldDomain,
    evaluator: Evaluator,
}

impl ScalarField {
    pub fn new(
        name: impl Into<String>,
        domain: FieldDomain,
        f: impl Fn(&ComplexVector) -> ExtReal + Send + Sync + 'static,
    ) -> Self {
        ScalarField { name: name.into(), domain, evaluator: Box::new(f) }
    }

    /// `g_D(., pole)` from the closed form; fails if the domain has none.
    pub fn green(domain: ModelDomain, pole: ComplexVector) -> Result<Self> {
        if domain.green_oracle(&pole, &pole)?.is_none() {
            return Err(Error::invalid(format!("no closed-form Green function on {domain} for this pole")));
        }
        let d = domain.clone();
        Ok(Self::new(format!("green_{}", domain.short_name()), FieldDomain::Model(domain), move |x| {
            d.green_oracle(x, &pole).ok().flatten().unwrap_or(ExtReal::Finite(f64::NAN))
        }))
    }

    /// `log k(., pole)` on the torus Teichmüller space.
    pub fn teich_green(pole: TorusModulus) -> Self {
        Self::new("teich_green", FieldDomain::TeichTorus, move |x| match TorusModulus::new(x[0]) {
            Ok(t) => teich_green(t, pole),
            Err(_) => ExtReal::Finite(f64::NAN),
        })
    }

    /// `-|z|^2`: strictly superharmonic, must fail the sub-mean test.
    pub fn negative_square_norm(domain: FieldDomain) -> Self {
        Self::new("neg_square_norm", domain, |x| ExtReal::Finite(-x.norm_sqr()))
    }

    /// `|z|^2`: plurisubharmonic, passes.
    pub fn square_norm(domain: FieldDomain) -> Self {
        Self::new("square_norm", domain, |x| ExtReal::Finite(x.norm_sqr()))
    }

    /// A constant: no boundary limit 0 unless `c = 0`.
    pub fn constant(domain: FieldDomain, c: f64) -> Self {
        Self::new(format!("constant_{c}"), domain, move |_| ExtReal::Finite(c))
    }

    pub fn eval(&self, x: &ComplexVector) -> ExtReal {
        (self.evaluator)(x)
    }
}

pub const SUBMEAN_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubmeanResult {
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub pass: bool,
}

/// `u(x) <= mean of u over x + r e^{i theta} xi`, in the extended reals.
pub fn submean_check(
    u: &ScalarField,
    x: &ComplexVector,
    xi: &ComplexVector,
    r: f64,
    n_samples: usize,
) -> Result<SubmeanResult> {
    if n_samples == 0 || !(r > 0.0) {
        return Err(Error::invalid("need r > 0 and at least one sample"));
    }
    if x.dim() != u.domain.dim() || xi.dim() != x.dim() {
        return Err(Error::invalid("dimension mismatch"));
    }
    if !u.domain.contains(x) {
        return Err(Error::domain("center of the test disc lies outside the domain"));
    }
    let points: Vec<ComplexVector> = (0..n_samples)
        .map(|k| x.axpy(Complex64::from_polar(r, TAU * k as f64 / n_samples as f64), xi))
        .collect();
    // The domains are convex, so a boundary circle inside means the closed disc is.
    if points.iter().any(|p| !u.domain.contains(p)) {
        return Err(Error::domain("the test disc exits the domain"));
    }
    let lhs = u.eval(x);
    let rhs = ExtReal::mean(points.iter().map(|p| u.eval(p)));
    let pass = match (lhs, rhs) {
        (ExtReal::NegInfinity, _) => true,
        (_, ExtReal::NegInfinity) => false,
        (ExtReal::Finite(l), ExtReal::Finite(m)) => l <= m + SUBMEAN_TOL,
    };
    Ok(SubmeanResult { lhs, rhs, pass })
}

/// Holomorphic maps between model domains used by the contraction check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolomorphicMap {
    /// `z -> z e_index` from the disc into `C^dim`.
    CoordinateEmbedding { dim: usize, index: usize },
    Constant(ComplexVector),
    /// `z -> z^2` on the disc.
    Square,
    /// `z -> e^{i theta} (z - a) / (1 - conj(a) z)` on the disc.
    Mobius { theta: f64, center: Complex64 },
}

impl HolomorphicMap {
    pub fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        match self {
            HolomorphicMap::CoordinateEmbedding { dim, index } => {
                if x.dim() != 1 || index >= dim {
                    return Err(Error::invalid("coordinate embedding takes a point of the disc"));
                }
                let mut out = ComplexVector::zeros(*dim);
                out[*index] = x[0];
                Ok(out)
            }
            HolomorphicMap::Constant(c) => Ok(c.clone()),
            HolomorphicMap::Square => {
                if x.dim() != 1 {
                    return Err(Error::invalid("z^2 acts on the disc"));
                }
                Ok(ComplexVector::scalar(x[0] * x[0]))
            }
            HolomorphicMap::Mobius { theta, center } => {
                if x.dim() != 1 {
                    return Err(Error::invalid("Möbius maps act on the disc"));
                }
                let m = DiscAutomorphism::new(*theta, DiscPoint::new(*center)?);
                Ok(ComplexVector::scalar(m.apply_raw(x[0])))
            }
        }
    }
}

type GreenEvaluator = Box<dyn Fn(&ComplexVector, &ComplexVector) -> Result<ExtReal> + Send + Sync>;

/// A two-point function playing the role of a Green function on a domain.
pub struct GreenFunction {
    pub name: String,
    pub domain: ModelDomain,
    evaluator: GreenEvaluator,
}

impl GreenFunction {
    pub fn new(
        name: impl Into<String>,
        domain: ModelDomain,
        f: impl Fn(&ComplexVector, &ComplexVector) -> Result<ExtReal> + Send + Sync + 'static,
    ) -> Self {
        GreenFunction { name: name.into(), domain, evaluator: Box::new(f) }
    }

    pub fn oracle(domain: ModelDomain) -> Self {
        let d = domain.clone();
        Self::new(format!("green_{}", domain.short_name()), domain, move |x, y| {
            d.green_oracle(x, y)?.ok_or_else(|| Error::invalid("no closed-form Green function"))
        })
    }

    pub fn eval(&self, x: &ComplexVector, y: &ComplexVector) -> Result<ExtReal> {
        (self.evaluator)(x, y)
    }
}

pub const CONTRACTION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContractionReport {
    pub map: HolomorphicMap,
    pub source: String,
    pub target: String,
    pub checked: usize,
    /// Pairs whose images coincide (target value is the pole).
    pub skipped: usize,
    /// Largest `g_target(hx, hy) - g_source(x, y)`; must stay <= tol.
    pub worst_excess: f64,
    pub worst_pair: Option<(ComplexVector, ComplexVector)>,
    /// Largest `|g_target(hx, hy) - g_source(x, y)|`, for isometric embeddings.
    pub max_abs_difference: f64,
    pub pass: bool,
}

/// Checks `g_target(h x, h y) <= g_source(x, y)` on sample pairs.
pub fn contraction_check(
    source: &GreenFunction,
    target: &GreenFunction,
    h: &HolomorphicMap,
    pairs: &[(ComplexVector, ComplexVector)],
) -> Result<ContractionReport> {
    let mut checked = 0;
    let mut skipped = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_pair = None;
    let mut max_abs = 0.0f64;
    for (x, y) in pairs {
        let (hx, hy) = (h.apply(x)?, h.apply(y)?);
        for p in [&hx, &hy] {
            if target.domain.membership(p) != Membership::Inside {
                return Err(Error::domain(format!("map sends a sample to {p}, outside {}", target.domain)));
            }
        }
        if (&hx - &hy).norm() < COINCIDENCE_TOL || (x - y).norm() < COINCIDENCE_TOL {
            skipped += 1;
            continue;
        }
        let gs = source.eval(x, y)?;
        let gt = target.eval(&hx, &hy)?;
        let excess = match (gt, gs) {
            (ExtReal::NegInfinity, _) => f64::NEG_INFINITY,
            (_, ExtReal::NegInfinity) => f64::INFINITY,
            (ExtReal::Finite(t), ExtReal::Finite(s)) => t - s,
        };
        max_abs = max_abs.max(gt.abs_diff(gs));
        checked += 1;
        if excess > worst_excess {
            worst_excess = excess;
            worst_pair = Some((x.clone(), y.clone()));
        }
    }
    Ok(ContractionReport {
        map: h.clone(),
        source: source.name.clone(),
        target: target.name.clone(),
        checked,
        skipped,
        worst_excess: if checked == 0 { 0.0 } else { worst_excess },
        worst_pair,
        max_abs_difference: max_abs,
        pass: checked == 0 || worst_excess <= CONTRACTION_TOL,
    })
}

pub const HYPERCONVEX_TAIL_TOL: f64 = 1e-4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HyperconvexReport {
    pub field: String,
    /// Boundary parameters `s_k -> 1`.
    pub params: Vec<f64>,
    pub values: Vec<ExtReal>,
    pub negative: bool,
    pub monotone: bool,
    pub tail: ExtReal,
    pub pass: bool,
}

/// Walks `start + t v` toward the boundary with `1 - s_k = 10^{-6k/n}` and
/// checks `u < 0`, monotone increase, and a tail value within
/// [`HYPERCONVEX_TAIL_TOL`] of 0. Rays that never leave the domain go to
/// infinity with `t = s / (1 - s)`.
pub fn hyperconvexity_probe(
    u: &ScalarField,
    start: &ComplexVector,
    direction: &ComplexVector,
    n_steps: usize,
) -> Result<HyperconvexReport> {
    if n_steps == 0 || !(direction.norm() > 0.0) {
        return Err(Error::invalid("need a nonzero direction and at least one step"));
    }
    if !u.domain.contains(start) {
        return Err(Error::domain("ray start lies outside the domain"));
    }
    let exit = u.domain.exit_time(start, direction);
    let params: Vec<f64> = (1..=n_steps).map(|k| 1.0 - 10f64.powf(-6.0 * k as f64 / n_steps as f64)).collect();
    let values: Vec<ExtReal> = params
        .iter()
        .map(|&s| {
            let t = if exit.is_finite() { s * exit } else { s / (1.0 - s) };
            u.eval(&start.axpy(Complex64::new(t, 0.0), direction))
        })
        .collect();
    let negative = values.iter().all(|v| matches!(v, ExtReal::NegInfinity) || v.to_f64() < 0.0);
    let monotone = values.windows(2).all(|w| w[1].to_f64() >= w[0].to_f64() - 1e-14);
    let tail = *values.last().unwrap();
    let pass = negative && monotone && tail.to_f64().abs() <= HYPERCONVEX_TAIL_TOL;
    Ok(HyperconvexReport { field: u.name.clone(), params, values, negative, monotone, tail, pass })
}

/// Radius `r` such that `x + r e^{i theta} xi` stays in the domain, scaled
/// by `fraction` of the largest such radius along the sampled circle.
pub fn safe_radius(domain: &FieldDomain, x: &ComplexVector, xi: &ComplexVector, fraction: f64) -> f64 {
    let t = (0..64)
        .map(|k| {
            let v = xi.scale(Complex64::from_polar(1.0, TAU * k as f64 / 64.0));
            domain.exit_time(x, &v)
        })
        .fold(f64::INFINITY, f64::min);
    // For convex domains the disc of radius r is inside once every direction
    // of the circle is; the fraction absorbs the sampling gap.
    fraction * t
}

/// A random `(x, xi, r)` for the sub-mean test: `x` and `xi` in the ball of
/// radius `spread`, and `r` a random fraction of the safe radius, redrawn
/// until the test circle stays at least `r |xi| / 2` away from `pole`. Circles
/// grazing the logarithmic pole alias the equispaced mean.
pub fn random_submean_triple(
    rng: &mut impl rand::Rng,
    domain: &FieldDomain,
    pole: &ComplexVector,
    spread: f64,
) -> (ComplexVector, ComplexVector, f64) {
    let n = domain.dim();
    loop {
        let mut x = crate::disc_functional::random_ball_point(rng, n, spread);
        if *domain == FieldDomain::TeichTorus {
            x = ComplexVector::scalar(pole[0] + x[0] * pole[0].im);
        }
        let xi = crate::disc_functional::random_ball_point(rng, n, 1.0);
        if !domain.contains(&x) || xi.norm() < 1e-3 {
            continue;
        }
        let r = safe_radius(domain, &x, &xi, rng.gen_range(0.05..0.8));
        let gap = (0..256)
            .map(|k| (&x.axpy(Complex64::from_polar(r, TAU * k as f64 / 256.0), &xi) - pole).norm())
            .fold(f64::INFINITY, f64::min);
        if gap >= 0.5 * r * xi.norm() {
            return (x, xi, r);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc_functional::random_ball_point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(re: f64, im: f64) -> ComplexVector {
        ComplexVector::scalar(Complex64::new(re, im))
    }

    #[test]
    fn submean_examples() {
        let u = ScalarField::green(ModelDomain::Disc, s(0.5, 0.0)).unwrap();
        let r = submean_check(&u, &s(-0.3, 0.0), &s(1.0, 0.0), 0.1, 64).unwrap();
        assert!(r.pass);
        assert!(r.lhs.abs_diff(r.rhs) < 1e-8);
        let r = submean_check(&u, &s(0.5, 0.0), &s(1.0, 0.0), 0.2, 64).unwrap();
        assert!(r.lhs.is_neg_infinite() && r.pass);

        let d = FieldDomain::Model(ModelDomain::Disc);
        assert!(submean_check(&ScalarField::square_norm(d.clone()), &s(0.0, 0.0), &s(1.0, 0.0), 0.5, 64).unwrap().pass);
        assert!(!submean_check(&ScalarField::negative_square_norm(d), &s(0.0, 0.0), &s(1.0, 0.0), 0.5, 64)
            .unwrap()
            .pass);
    }

    #[test]
    fn submean_rejects_discs_leaving_the_domain() {
        let u = ScalarField::green(ModelDomain::Disc, s(0.0, 0.0)).unwrap();
        let e = submean_check(&u, &s(0.8, 0.0), &s(1.0, 0.0), 0.3, 64).unwrap_err();
        assert!(matches!(e, Error::DomainViolation(_)));
    }

    #[test]
    fn mean_with_pole_on_circle() {
        let u = ScalarField::green(ModelDomain::Disc, s(0.1, 0.0)).unwrap();
        let r = submean_check(&u, &s(0.0, 0.0), &s(1.0, 0.0), 0.1, 4).unwrap();
        assert!(r.rhs.is_neg_infinite());
        assert!(!r.pass);
    }

    #[test]
    fn oracle_greens_are_submean() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for domain in [ModelDomain::Disc, ModelDomain::euclidean_ball(2).unwrap(), ModelDomain::polydisc(2).unwrap()] {
            let n = domain.dim();
            let fd = FieldDomain::Model(domain.clone());
            for _ in 0..200 {
                let y = random_ball_point(&mut rng, n, 0.7);
                let (x, xi, r) = random_submean_triple(&mut rng, &fd, &y, 0.9);
                let u = ScalarField::green(domain.clone(), y).unwrap();
                let res = submean_check(&u, &x, &xi, r, 64).unwrap();
                assert!(res.pass, "{domain} x={x} xi={xi} r={r} {:?}", res);
            }
        }
    }

    #[test]
    fn torus_green_is_harmonic_off_the_pole() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let pole = TorusModulus::random(&mut rng);
            let u = ScalarField::teich_green(pole);
            let x = s(rng.gen_range(-2.0..2.0), rng.gen_range(0.3..4.0));
            let dist = (x[0] - pole.value()).norm();
            let r = (0.5 * dist).min(0.5 * x[0].im);
            let res = submean_check(&u, &x, &s(1.0, 0.0), r, 64).unwrap();
            assert!(res.pass);
            assert!(res.lhs.abs_diff(res.rhs) < 1e-8, "{} vs {}", res.lhs, res.rhs);
        }
    }

    #[test]
    fn contraction_examples() {
        let ball = ModelDomain::euclidean_ball(2).unwrap();
        let src = GreenFunction::oracle(ModelDomain::Disc);
        let tgt = GreenFunction::oracle(ball.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pairs: Vec<_> =
            (0..50).map(|_| (random_ball_point(&mut rng, 1, 0.95), random_ball_point(&mut rng, 1, 0.95))).collect();
        let r = contraction_check(&src, &tgt, &HolomorphicMap::CoordinateEmbedding { dim: 2, index: 1 }, &pairs).unwrap();
        assert!(r.pass && r.max_abs_difference < 1e-9);

        let c = HolomorphicMap::Constant(ComplexVector::from_reals(&[0.1, 0.0]));
        let r = contraction_check(&src, &tgt, &c, &pairs).unwrap();
        assert_eq!(r.skipped, 50);
        assert!(r.pass);

        let disc = GreenFunction::oracle(ModelDomain::Disc);
        let r = contraction_check(&disc, &disc, &HolomorphicMap::Square, &pairs).unwrap();
        assert!(r.pass, "{}", r.worst_excess);
        let r = contraction_check(
            &disc,
            &disc,
            &HolomorphicMap::Mobius { theta: 0.7, center: Complex64::new(0.3, -0.4) },
            &pairs,
        )
        .unwrap();
        assert!(r.pass && r.max_abs_difference < 1e-9);

        let wrong = GreenFunction::new("twice_green_disc", ModelDomain::Disc, |x, y| {
            Ok(match ModelDomain::Disc.green_oracle(x, y)?.unwrap() {
                ExtReal::Finite(v) => ExtReal::Finite(2.0 * v),
                g => g,
            })
        });
        let r = contraction_check(&wrong, &disc, &HolomorphicMap::Square, &pairs).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn contraction_requires_containment() {
        let disc = GreenFunction::oracle(ModelDomain::Disc);
        let c = HolomorphicMap::Constant(s(1.5, 0.0));
        assert!(contraction_check(&disc, &disc, &c, &[(s(0.1, 0.0), s(0.2, 0.0))]).is_err());
    }

    #[test]
    fn hyperconvexity_examples() {
        let u = ScalarField::green(ModelDomain::Disc, s(0.0, 0.0)).unwrap();
        let r = hyperconvexity_probe(&u, &s(0.0, 0.0), &s(1.0, 0.0), 6).unwrap();
        for (v, e) in r.values.iter().zip([0.9f64, 0.99, 0.999]) {
            assert!((v.to_f64() - e.ln()).abs() < 1e-12);
        }
        assert!(r.pass);

        let u = ScalarField::teich_green(TorusModulus::square());
        let up = hyperconvexity_probe(&u, &s(0.0, 1.0), &s(0.0, 1.0), 32).unwrap();
        assert!(up.pass, "{:?}", up.values);
        let down = hyperconvexity_probe(&u, &s(0.0, 1.0), &s(0.3, -1.0), 32).unwrap();
        assert!(down.pass, "{:?}", down.values);

        let c = ScalarField::constant(FieldDomain::Model(ModelDomain::Disc), -1.0);
        assert!(!hyperconvexity_probe(&c, &s(0.0, 0.0), &s(1.0, 0.0), 32).unwrap().pass);
    }
}
