//! Bounded model domains of `C^n` and their closed-form Green functions.
//!
//! Every domain is the open unit sublevel set of a defining norm, which makes
//! the exit time of a ray available in closed form (or by bisection for the
//! `l1` ball) and lets the disc search enforce containment cheaply.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::hyperbolic::{self, DiscPoint, HyperbolicDistance, COINCIDENCE_TOL};
use crate::vector::ComplexVector;

/// Points whose defining norm is within this distance of 1 are on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Green-function value: nonpositive, `-inf` only at the pole.
pub type GreenValue = ExtReal;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Euclidean,
    Sup,
    L1,
}

impl NormKind {
    pub fn eval(self, v: &[Complex64]) -> f64 {
        match self {
            NormKind::Euclidean => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            NormKind::Sup => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            NormKind::L1 => v.iter().map(|z| z.norm()).sum(),
        }
    }

    /// Largest possible Euclidean norm of a unit vector in this norm.
    fn euclidean_bound(self, dim: usize) -> f64 {
        match self {
            NormKind::Euclidean | NormKind::L1 => 1.0,
            NormKind::Sup => (dim as f64).sqrt(),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            NormKind::Euclidean => "euclidean",
            NormKind::Sup => "sup",
            NormKind::L1 => "l1",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

/// Structured descriptor used for (de)serialization of [`ModelDomain`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainDescriptor {
    pub kind: String,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<ComplexVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainDescriptor", into = "DomainDescriptor")]
pub enum ModelDomain {
    Disc,
    EuclideanBall { dim: usize },
    Polydisc { dim: usize },
    /// Ball `{ x : ||x - center|| < radius }` of a finite-dimensional normed space.
    BanachBall { norm: NormKind, center: ComplexVector, radius: f64 },
}

impl ModelDomain {
    pub fn euclidean_ball(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(ModelDomain::EuclideanBall { dim })
    }

    pub fn polydisc(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(ModelDomain::Polydisc { dim })
    }

    pub fn banach_ball(norm: NormKind, center: ComplexVector, radius: f64) -> Result<Self> {
        if center.dim() == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) || !center.is_finite() {
            return Err(Error::invalid(format!("bad Banach ball radius {radius}")));
        }
        Ok(ModelDomain::BanachBall { norm, center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelDomain::Disc => 1,
            ModelDomain::EuclideanBall { dim } | ModelDomain::Polydisc { dim } => *dim,
            ModelDomain::BanachBall { center, .. } => center.dim(),
        }
    }

    /// Norm whose open unit sublevel set is the domain.
    pub fn defining_norm(&self, x: &ComplexVector) -> f64 {
        self.defining_norm_of(x.as_slice())
    }

    pub fn defining_norm_of(&self, x: &[Complex64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            ModelDomain::Disc | ModelDomain::EuclideanBall { .. } => NormKind::Euclidean.eval(x),
            ModelDomain::Polydisc { .. } => NormKind::Sup.eval(x),
            ModelDomain::BanachBall { norm, center, radius } => match norm {
                NormKind::Euclidean => {
                    x.iter().zip(center.iter()).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt() / radius
                }
                NormKind::Sup => {
                    x.iter().zip(center.iter()).map(|(a, c)| (a - c).norm()).fold(0.0, f64::max) / radius
                }
                NormKind::L1 => x.iter().zip(center.iter()).map(|(a, c)| (a - c).norm()).sum::<f64>() / radius,
            },
        }
    }

    pub fn membership(&self, x: &ComplexVector) -> Membership {
        if x.dim() != self.dim() || !x.is_finite() {
            return Membership::Outside;
        }
        let n = self.defining_norm(x);
        if n < 1.0 - BOUNDARY_TOL {
            Membership::Inside
        } else if n <= 1.0 + BOUNDARY_TOL {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }

    pub fn require_inside(&self, x: &ComplexVector) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::domain(format!(
                "point has dimension {} but the domain has dimension {}",
                x.dim(),
                self.dim()
            )));
        }
        match self.membership(x) {
            Membership::Inside => Ok(()),
            Membership::Boundary => Err(Error::domain(format!("{x} lies on the boundary of {self}"))),
            Membership::Outside => Err(Error::domain(format!("{x} lies outside {self}"))),
        }
    }

    /// Radius of a Euclidean ball about the origin containing the domain.
    pub fn circumscribing_radius(&self) -> f64 {
        match self {
            ModelDomain::Disc | ModelDomain::EuclideanBall { .. } => 1.0,
            ModelDomain::Polydisc { dim } => (*dim as f64).sqrt(),
            ModelDomain::BanachBall { norm, center, radius } => {
                center.norm() + radius * norm.euclidean_bound(center.dim())
            }
        }
    }

    /// Largest `t >= 0` with `defining_norm(x + t v) <= level`.
    ///
    /// `x` must satisfy `defining_norm(x) <= level`; returns `+inf` for `v = 0`.
    pub fn exit_time(&self, x: &[Complex64], v: &[Complex64], level: f64) -> f64 {
        match self {
            ModelDomain::Disc | ModelDomain::EuclideanBall { .. } => sphere_exit(x, v, level),
            ModelDomain::Polydisc { .. } => x
                .iter()
                .zip(v)
                .map(|(p, w)| sphere_exit(std::slice::from_ref(p), std::slice::from_ref(w), level))
                .fold(f64::INFINITY, f64::min),
            ModelDomain::BanachBall { norm, center, radius } => {
                let p: Vec<Complex64> = x.iter().zip(center.iter()).map(|(a, c)| a - c).collect();
                let level = level * radius;
                match norm {
                    NormKind::Euclidean => sphere_exit(&p, v, level),
                    NormKind::Sup => p
                        .iter()
                        .zip(v)
                        .map(|(a, w)| {
                            sphere_exit(std::slice::from_ref(a), std::slice::from_ref(w), level)
                        })
                        .fold(f64::INFINITY, f64::min),
                    NormKind::L1 => convex_exit_bisect(&p, v, level, NormKind::L1),
                }
            }
        }
    }

    /// Closed-form Green function, when this domain has one for the pole `y`.
    ///
    /// Banach balls only have a closed form for the pole at the center.
    pub fn green_oracle(&self, x: &ComplexVector, y: &ComplexVector) -> Result<Option<GreenValue>> {
        self.require_inside(x)?;
        self.require_inside(y)?;
        Ok(match self {
            ModelDomain::Disc | ModelDomain::EuclideanBall { .. } => Some(green_ball(x, y)?),
            ModelDomain::Polydisc { .. } => Some(green_polydisc(x, y)?),
            ModelDomain::BanachBall { norm, center, radius } => {
                if (y - center).norm() < COINCIDENCE_TOL {
                    Some(banach_ball_green(x, center, *radius, *norm)?)
                } else {
                    None
                }
            }
        })
    }

    /// Closed-form Kobayashi distance where available.
    pub fn kobayashi_oracle(
        &self,
        x: &ComplexVector,
        y: &ComplexVector,
    ) -> Result<Option<HyperbolicDistance>> {
        self.require_inside(x)?;
        self.require_inside(y)?;
        Ok(match self {
            ModelDomain::Disc | ModelDomain::EuclideanBall { .. } => {
                Some(kobayashi_distance_ball(x, y)?)
            }
            ModelDomain::Polydisc { .. } => {
                let d = x
                    .iter()
                    .zip(y.iter())
                    .map(|(a, b)| hyperbolic::rho_unchecked(*a, *b))
                    .fold(0.0, f64::max);
                Some(HyperbolicDistance::from_contraction(d))
            }
            ModelDomain::BanachBall { norm, center, radius } => {
                if (y - center).norm() < COINCIDENCE_TOL {
                    let s: Vec<Complex64> =
                        x.iter().zip(center.iter()).map(|(a, c)| a - c).collect();
                    Some(HyperbolicDistance::from_contraction(norm.eval(&s) / radius))
                } else {
                    None
                }
            }
        })
    }

    /// Short name used on the command line (`disc`, `ball2`, `polydisc3`, ...).
    pub fn short_name(&self) -> String {
        match self {
            ModelDomain::Disc => "disc".into(),
            ModelDomain::EuclideanBall { dim } => format!("ball{dim}"),
            ModelDomain::Polydisc { dim } => format!("polydisc{dim}"),
            ModelDomain::BanachBall { norm, center, .. } => format!("{}{}", norm.tag(), center.dim()),
        }
    }
}

impl fmt::Display for ModelDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelDomain::BanachBall { norm, center, radius } => {
                write!(f, "{}-ball(center {center}, radius {radius})", norm.tag())
            }
            other => write!(f, "{}", other.short_name()),
        }
    }
}

impl FromStr for ModelDomain {
    type Err = Error;

    /// Accepts a short name or a JSON descriptor.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()));
        }
        if s == "disc" {
            return Ok(ModelDomain::Disc);
        }
        let (name, digits) = ["polydisc", "ball", "sup", "l1", "euclidean"]
            .iter()
            .find_map(|p| s.strip_prefix(p).map(|rest| (*p, rest)))
            .ok_or_else(|| Error::Parse(format!("unknown domain {s:?}")))?;
        let dim: usize = digits
            .parse()
            .map_err(|_| Error::Parse(format!("domain {s:?} needs a dimension, e.g. ball2")))?;
        let unit = |norm| ModelDomain::banach_ball(norm, ComplexVector::zeros(dim), 1.0);
        match name {
            "ball" => ModelDomain::euclidean_ball(dim),
            "polydisc" => ModelDomain::polydisc(dim),
            "sup" => unit(NormKind::Sup),
            "l1" => unit(NormKind::L1),
            "euclidean" => unit(NormKind::Euclidean),
            _ => Err(Error::Parse(format!("unknown domain {s:?}"))),
        }
    }
}

impl From<ModelDomain> for DomainDescriptor {
    fn from(d: ModelDomain) -> Self {
        let dimension = d.dim();
        match d {
            ModelDomain::Disc => DomainDescriptor {
                kind: "disc".into(),
                dimension,
                center: None,
                radius: None,
                norm: None,
            },
            ModelDomain::EuclideanBall { .. } => DomainDescriptor {
                kind: "euclidean_ball".into(),
                dimension,
                center: None,
                radius: None,
                norm: Some(NormKind::Euclidean),
            },
            ModelDomain::Polydisc { .. } => DomainDescriptor {
                kind: "polydisc".into(),
                dimension,
                center: None,
                radius: None,
                norm: Some(NormKind::Sup),
            },
            ModelDomain::BanachBall { norm, center, radius } => DomainDescriptor {
                kind: "banach_ball".into(),
                dimension,
                center: Some(center),
                radius: Some(radius),
                norm: Some(norm),
            },
        }
    }
}

impl TryFrom<DomainDescriptor> for ModelDomain {
    type Error = Error;

    fn try_from(d: DomainDescriptor) -> Result<Self> {
        match d.kind.as_str() {
            "disc" => {
                if d.dimension != 1 {
                    return Err(Error::invalid("the disc has dimension 1"));
                }
                Ok(ModelDomain::Disc)
            }
            "euclidean_ball" => ModelDomain::euclidean_ball(d.dimension),
            "polydisc" => ModelDomain::polydisc(d.dimension),
            "banach_ball" => {
                let center = d.center.unwrap_or_else(|| ComplexVector::zeros(d.dimension));
                if center.dim() != d.dimension {
                    return Err(Error::invalid("center dimension does not match"));
                }
                ModelDomain::banach_ball(
                    d.norm.unwrap_or(NormKind::Euclidean),
                    center,
                    d.radius.unwrap_or(1.0),
                )
            }
            other => Err(Error::Parse(format!("unknown domain kind {other:?}"))),
        }
    }
}

fn sphere_exit(p: &[Complex64], v: &[Complex64], level: f64) -> f64 {
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if vv == 0.0 {
        return f64::INFINITY;
    }
    let pp: f64 = p.iter().map(|z| z.norm_sqr()).sum();
    let b: f64 = p.iter().zip(v).map(|(a, w)| (a * w.conj()).re).sum();
    let slack = (level * level - pp).max(0.0);
    let root = (b * b + vv * slack).sqrt();
    // Two algebraically equal forms; pick the one without cancellation.
    if b <= 0.0 {
        (root - b) / vv
    } else {
        slack / (b + root)
    }
}

fn convex_exit_bisect(p: &[Complex64], v: &[Complex64], level: f64, norm: NormKind) -> f64 {
    if v.iter().all(|z| z.norm_sqr() == 0.0) {
        return f64::INFINITY;
    }
    let at = |t: f64| -> f64 {
        let q: Vec<Complex64> = p.iter().zip(v).map(|(a, w)| a + w * t).collect();
        norm.eval(&q)
    };
    let mut hi = 1.0;
    while at(hi) <= level {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if at(mid) <= level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Standard automorphism of the Euclidean unit ball exchanging `a` and `0`:
/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`, `s_a = sqrt(1 - |a|^2)`.
#[derive(Clone, Debug)]
pub struct BallAutomorphism {
    a: ComplexVector,
    a_norm_sqr: f64,
    s: f64,
}

impl BallAutomorphism {
    pub fn new(a: &ComplexVector) -> Result<Self> {
        let a_norm_sqr = a.norm_sqr();
        if !(a_norm_sqr < 1.0) {
            return Err(Error::domain(format!("{a} is outside the unit ball")));
        }
        Ok(BallAutomorphism { a: a.clone(), a_norm_sqr, s: (1.0 - a_norm_sqr).sqrt() })
    }

    pub fn apply(&self, z: &ComplexVector) -> ComplexVector {
        let za = z.inner(&self.a);
        let denom = Complex64::new(1.0, 0.0) - za;
        if self.a_norm_sqr == 0.0 {
            return z.scale_real(-1.0);
        }
        // P_a z = <z,a>/<a,a> a, Q_a z = z - P_a z
        let proj_coeff = za / self.a_norm_sqr;
        let coords = z
            .iter()
            .zip(self.a.iter())
            .map(|(zj, aj)| {
                let p = aj * proj_coeff;
                let q = zj - p;
                ((aj - p) - q * self.s) / denom
            })
            .collect();
        ComplexVector(coords)
    }
}

/// Möbius-invariant pseudo-distance of the Euclidean unit ball, `|phi_y(x)|`.
pub fn ball_rho(x: &ComplexVector, y: &ComplexVector) -> Result<f64> {
    check_same_dim(x, y)?;
    let ball = ModelDomain::EuclideanBall { dim: x.dim() };
    ball.require_inside(x)?;
    ball.require_inside(y)?;
    if (x - y).norm() < COINCIDENCE_TOL {
        return Ok(0.0);
    }
    let phi = BallAutomorphism::new(y)?;
    Ok(phi.apply(x).norm().min(1.0))
}

/// Kobayashi distance of the Euclidean unit ball, `atanh |phi_y(x)|`.
pub fn kobayashi_distance_ball(x: &ComplexVector, y: &ComplexVector) -> Result<HyperbolicDistance> {
    Ok(HyperbolicDistance::from_contraction(ball_rho(x, y)?))
}

/// Green function of the Euclidean unit ball, `log |phi_y(x)| = log tanh d`.
pub fn green_ball(x: &ComplexVector, y: &ComplexVector) -> Result<GreenValue> {
    Ok(ExtReal::ln(ball_rho(x, y)?))
}

/// Green function of the unit polydisc: the largest coordinate disc Green value.
pub fn green_polydisc(x: &ComplexVector, y: &ComplexVector) -> Result<GreenValue> {
    check_same_dim(x, y)?;
    let poly = ModelDomain::Polydisc { dim: x.dim() };
    poly.require_inside(x)?;
    poly.require_inside(y)?;
    let mut g = ExtReal::NegInfinity;
    for (a, b) in x.iter().zip(y.iter()) {
        g = g.max(hyperbolic::green_disc(DiscPoint::new(*a)?, DiscPoint::new(*b)?));
    }
    Ok(g)
}

/// Green function of a normed-space ball with the pole at its center:
/// `log(||x - center|| / r)`.
pub fn banach_ball_green(
    x: &ComplexVector,
    center: &ComplexVector,
    r: f64,
    norm: NormKind,
) -> Result<GreenValue> {
    check_same_dim(x, center)?;
    let ball = ModelDomain::banach_ball(norm, center.clone(), r)?;
    ball.require_inside(x)?;
    let diff = x - center;
    if diff.norm() < COINCIDENCE_TOL {
        return Ok(ExtReal::NegInfinity);
    }
    Ok(ExtReal::ln(norm.eval(diff.as_slice()) / r))
}

/// Green function of a normed-space ball with an arbitrary pole; only the
/// centered pole has a closed form and any other request is rejected.
pub fn banach_ball_green_at(
    x: &ComplexVector,
    pole: &ComplexVector,
    center: &ComplexVector,
    r: f64,
    norm: NormKind,
) -> Result<GreenValue> {
    if (pole - center).norm() >= COINCIDENCE_TOL {
        return Err(Error::invalid(
            "closed-form Banach-ball Green function needs the pole at the center",
        ));
    }
    banach_ball_green(x, center, r, norm)
}

fn check_same_dim(x: &ComplexVector, y: &ComplexVector) -> Result<()> {
    if x.dim() != y.dim() || x.dim() == 0 {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}
