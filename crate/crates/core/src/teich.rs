//! The Teichmüller space of the torus.
//!
//! A marked torus is the lattice `<1, tau>` with `tau` in the upper
//! half-plane. Extremal quasiconformal maps between marked tori are affine,
//! so every Teichmüller quantity has a closed form in the moduli.
//!
//! Beltrami coefficients are attached to maps with `w_zbar = mu w_z`. The
//! affine map `z -> z + mu conj(z)` sends `<1, tau>` to `<1 + mu, tau + mu
//! conj(tau)>`, which normalizes to `(tau + mu conj(tau)) / (1 + mu)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::{banach_ball_green, NormKind};
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::hyperbolic::{
    self, cayley, eq2_transform, HalfPlanePoint, HyperbolicDistance, COINCIDENCE_TOL,
};
use crate::vector::ComplexVector;

/// Modulus of the marked lattice `<1, tau>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusModulus {
    pub tau: HalfPlanePoint,
}

impl TorusModulus {
    pub fn new(tau: Complex64) -> Result<Self> {
        Ok(TorusModulus { tau: HalfPlanePoint::new(tau)? })
    }

    pub fn value(self) -> Complex64 {
        self.tau.value()
    }

    /// The square torus `tau = i`.
    pub fn square() -> Self {
        TorusModulus { tau: HalfPlanePoint::from_re_im(0.0, 1.0).unwrap() }
    }

    /// Random modulus with real part uniform in `[-2, 2]` and imaginary part
    /// log-uniform in `[0.2, 5]`.
    pub fn random(rng: &mut impl Rng) -> Self {
        let re = rng.gen_range(-2.0..=2.0);
        let im = rng.gen_range(0.2f64.ln()..=5.0f64.ln()).exp();
        TorusModulus::new(Complex64::new(re, im)).unwrap()
    }
}

/// A constant Beltrami coefficient, `|mu| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct TorusBeltrami {
    mu: Complex64,
}

impl TorusBeltrami {
    pub fn new(mu: Complex64) -> Result<Self> {
        if !(mu.norm() < 1.0) {
            return Err(Error::domain(format!("Beltrami coefficient {mu} has modulus >= 1")));
        }
        Ok(TorusBeltrami { mu })
    }

    pub fn value(self) -> Complex64 {
        self.mu
    }

    pub fn norm(self) -> f64 {
        self.mu.norm()
    }
}

impl TryFrom<Complex64> for TorusBeltrami {
    type Error = Error;

    fn try_from(mu: Complex64) -> Result<Self> {
        TorusBeltrami::new(mu)
    }
}

impl From<TorusBeltrami> for Complex64 {
    fn from(m: TorusBeltrami) -> Complex64 {
        m.mu
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub k: f64,
    pub d: HyperbolicDistance,
    pub g: ExtReal,
    pub witness_mu: TorusBeltrami,
}

/// Beltrami coefficient of the extremal (affine) map between the marked tori.
pub fn extremal_beltrami(x: TorusModulus, y: TorusModulus) -> TorusBeltrami {
    let (a, b) = (x.value(), y.value());
    let diff = b - a;
    if diff.norm() < COINCIDENCE_TOL {
        return TorusBeltrami { mu: Complex64::new(0.0, 0.0) };
    }
    let mu = diff / (b - a.conj());
    // |mu| < 1 exactly; guard against rounding for nearly degenerate lattices.
    let n = mu.norm();
    TorusBeltrami { mu: if n < 1.0 { mu } else { mu / (n * (1.0 + f64::EPSILON)) } }
}

pub fn teich_distance(x: TorusModulus, y: TorusModulus) -> DistanceReport {
    let witness_mu = extremal_beltrami(x, y);
    let k = witness_mu.norm();
    DistanceReport { k, d: HyperbolicDistance::from_contraction(k), g: ExtReal::ln(k), witness_mu }
}

/// Green function `log k(x, y)` of the torus Teichmüller space.
pub fn teich_green(x: TorusModulus, y: TorusModulus) -> ExtReal {
    teich_distance(x, y).g
}

/// The projection `Phi(mu)`: the modulus of the base torus deformed by `mu`.
pub fn canonical_projection(mu: TorusBeltrami, base: TorusModulus) -> TorusModulus {
    let tau = base.value();
    let m = mu.value();
    let image = (tau + m * tau.conj()) / (Complex64::new(1.0, 0.0) + m);
    let im = image.im.max(f64::MIN_POSITIVE);
    TorusModulus::new(Complex64::new(image.re, im)).unwrap()
}

/// The constant coefficient projecting onto `target`: `Phi(mu, base) = target`.
pub fn fiber_witness(base: TorusModulus, target: TorusModulus) -> TorusBeltrami {
    let mu = extremal_beltrami(base, target).value();
    TorusBeltrami { mu: -mu }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub x: Complex64,
    pub base: Complex64,
    pub witness_mu: TorusBeltrami,
    /// `g_T(x, base)` from the extremal dilatation.
    pub teich_green: ExtReal,
    /// `log ||mu*||` in the unit ball of Beltrami coefficients.
    pub beltrami_green: ExtReal,
    pub discrepancy: f64,
    /// `|Phi(mu*) - x|`.
    pub projection_error: f64,
    pub pass: bool,
}

pub const LEMMA2_TOL: f64 = 1e-12;

/// Checks that the infimum over the fiber of `x` is attained at the
/// extremal coefficient: `g_T(x, base) = log ||mu*||`.
pub fn lemma2_check(x: TorusModulus, base: TorusModulus) -> Result<Lemma2Report> {
    if (x.value() - base.value()).norm() < COINCIDENCE_TOL {
        return Err(Error::invalid("lemma2_check needs x different from the base point"));
    }
    let witness_mu = fiber_witness(base, x);
    let lhs = teich_distance(x, base).g;
    let rhs = banach_ball_green(
        &ComplexVector::scalar(witness_mu.value()),
        &ComplexVector::zeros(1),
        1.0,
        NormKind::Sup,
    )?;
    let discrepancy = lhs.abs_diff(rhs);
    let projection_error = (canonical_projection(witness_mu, base).value() - x.value()).norm();
    let scale = x.value().norm().max(1.0);
    Ok(Lemma2Report {
        x: x.value(),
        base: base.value(),
        witness_mu,
        teich_green: lhs,
        beltrami_green: rhs,
        discrepancy,
        projection_error,
        pass: discrepancy <= LEMMA2_TOL && projection_error <= LEMMA2_TOL * scale,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Eq2Sample {
    pub tau1: Complex64,
    pub tau2: Complex64,
    pub g: ExtReal,
    pub log_tanh_d: ExtReal,
    pub half_plane: ExtReal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Eq2Report {
    pub n_samples: usize,
    pub seed: u64,
    pub max_transform_discrepancy: f64,
    pub max_half_plane_discrepancy: f64,
    pub samples: Vec<Eq2Sample>,
}

pub fn eq2_sample(x: TorusModulus, y: TorusModulus) -> Eq2Sample {
    let report = teich_distance(x, y);
    // The half-plane side goes through the disc model so that it shares no
    // arithmetic with the Beltrami formula.
    let half_plane = hyperbolic::green_disc(cayley(x.tau), cayley(y.tau));
    Eq2Sample {
        tau1: x.value(),
        tau2: y.value(),
        g: report.g,
        log_tanh_d: eq2_transform(report.d),
        half_plane,
    }
}

/// Compares `log k` with `log tanh d` and with the Green function of the
/// upper half-plane on random pairs of moduli.
pub fn eq2_identity_check(n_samples: usize, seed: u64) -> Result<Eq2Report> {
    if n_samples == 0 {
        return Err(Error::invalid("n_samples must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Eq2Sample> = (0..n_samples)
        .map(|_| {
            let x = TorusModulus::random(&mut rng);
            let y = TorusModulus::random(&mut rng);
            eq2_sample(x, y)
        })
        .collect();
    let max_transform_discrepancy =
        samples.iter().map(|s| s.g.abs_diff(s.log_tanh_d)).fold(0.0, f64::max);
    let max_half_plane_discrepancy =
        samples.iter().map(|s| s.g.abs_diff(s.half_plane)).fold(0.0, f64::max);
    Ok(Eq2Report { n_samples, seed, max_transform_discrepancy, max_half_plane_discrepancy, samples })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothnessRung {
    pub h: f64,
    pub first: f64,
    pub second: f64,
}

/// Central finite differences of `t -> d(x + t v, y)` on a halving ladder of
/// steps. A diagnostic only: the distance is real-analytic off the diagonal.
pub fn smoothness_probe(
    x: TorusModulus,
    y: TorusModulus,
    direction: Complex64,
    h0: f64,
    rungs: usize,
) -> Result<Vec<SmoothnessRung>> {
    if direction.norm() == 0.0 || !(h0 > 0.0) {
        return Err(Error::invalid("smoothness probe needs a nonzero direction and h0 > 0"));
    }
    let v = direction / direction.norm();
    let d = |t: f64| -> Result<f64> {
        let p = TorusModulus::new(x.value() + v * t)?;
        Ok(teich_distance(p, y).d.value())
    };
    let mut out = Vec::with_capacity(rungs);
    let mut h = h0;
    for _ in 0..rungs {
        let (m, c, p) = (d(-h)?, d(0.0)?, d(h)?);
        out.push(SmoothnessRung { h, first: (p - m) / (2.0 * h), second: (p - 2.0 * c + m) / (h * h) });
        h /= 2.0;
    }
    Ok(out)
}
