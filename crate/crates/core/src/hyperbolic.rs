//! Hyperbolic geometry of the unit disc and the upper half-plane.
//!
//! Distances use the curvature `-4` normalization `d = atanh(rho)`, i.e.
//! `d = 1/2 log((1 + rho) / (1 - rho))`. With this scaling the Green function
//! of the disc is exactly `log tanh d`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::vector::I;

/// Points closer than this are treated as the same point when detecting poles.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// A point of the open unit disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DiscPoint(Complex64);

impl DiscPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(Error::domain(format!("|{z}| >= 1 is outside the unit disc")));
        }
        Ok(DiscPoint(z))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        DiscPoint::new(Complex64::new(re, im))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl TryFrom<Complex64> for DiscPoint {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        DiscPoint::new(z)
    }
}

impl From<DiscPoint> for Complex64 {
    fn from(p: DiscPoint) -> Complex64 {
        p.0
    }
}

/// A point of the upper half-plane `Im z > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct HalfPlanePoint(Complex64);

impl HalfPlanePoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::domain(format!("Im({z}) <= 0 is outside the upper half-plane")));
        }
        Ok(HalfPlanePoint(z))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        HalfPlanePoint::new(Complex64::new(re, im))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl TryFrom<Complex64> for HalfPlanePoint {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        HalfPlanePoint::new(z)
    }
}

impl From<HalfPlanePoint> for Complex64 {
    fn from(p: HalfPlanePoint) -> Complex64 {
        p.0
    }
}

/// A nonnegative hyperbolic length (curvature `-4`). May be `+inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HyperbolicDistance(f64);

impl HyperbolicDistance {
    pub const ZERO: HyperbolicDistance = HyperbolicDistance(0.0);

    pub fn new(d: f64) -> Result<Self> {
        if d.is_nan() || d < 0.0 {
            return Err(Error::invalid(format!("hyperbolic distance must be >= 0, got {d}")));
        }
        Ok(HyperbolicDistance(d))
    }

    /// `atanh(k)` for `k` in `[0, 1]`.
    pub fn from_contraction(k: f64) -> Self {
        HyperbolicDistance(k.clamp(0.0, 1.0).atanh())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Möbius-invariant pseudo-distance `|x - y| / |1 - conj(y) x|`.
pub fn pseudo_hyperbolic_rho(x: DiscPoint, y: DiscPoint) -> f64 {
    rho_unchecked(x.0, y.0)
}

pub(crate) fn rho_unchecked(x: Complex64, y: Complex64) -> f64 {
    let diff = x - y;
    if diff.norm() < COINCIDENCE_TOL {
        return 0.0;
    }
    (diff.norm() / (Complex64::new(1.0, 0.0) - y.conj() * x).norm()).min(1.0)
}

pub fn disc_distance(x: DiscPoint, y: DiscPoint) -> HyperbolicDistance {
    HyperbolicDistance::from_contraction(pseudo_hyperbolic_rho(x, y))
}

/// Green function of the unit disc with pole at `y`: `log rho(x, y)`.
pub fn green_disc(x: DiscPoint, y: DiscPoint) -> ExtReal {
    ExtReal::ln(pseudo_hyperbolic_rho(x, y))
}

/// The log-tanh transform `log((e^{2d} - 1) / (e^{2d} + 1)) = log tanh d`.
pub fn eq2_transform(d: HyperbolicDistance) -> ExtReal {
    let d = d.0;
    if d == 0.0 {
        return ExtReal::NegInfinity;
    }
    if d.is_infinite() {
        return ExtReal::Finite(-0.0);
    }
    let e = (-2.0 * d).exp();
    ExtReal::Finite((-(-2.0 * d).exp_m1()).ln() - e.ln_1p())
}

/// Convenience wrapper taking a raw distance; rejects negative input.
pub fn log_tanh(d: f64) -> Result<ExtReal> {
    Ok(eq2_transform(HyperbolicDistance::new(d)?))
}

/// Cayley transform `w = (z - i) / (z + i)` from the half-plane to the disc.
pub fn cayley(z: HalfPlanePoint) -> DiscPoint {
    let w = (z.0 - I) / (z.0 + I);
    // |w| < 1 holds exactly in exact arithmetic; clamp rounding at huge |z|.
    DiscPoint(if w.norm() < 1.0 { w } else { w / (w.norm() * (1.0 + f64::EPSILON)) })
}

/// Inverse Cayley transform `z = i (1 + w) / (1 - w)`.
pub fn inverse_cayley(w: DiscPoint) -> HalfPlanePoint {
    let one = Complex64::new(1.0, 0.0);
    let z = I * (one + w.0) / (one - w.0);
    HalfPlanePoint(Complex64::new(z.re, z.im.max(f64::MIN_POSITIVE)))
}

/// Pseudo-distance of the half-plane, `|z - w| / |z - conj w|`.
pub fn half_plane_rho(z: HalfPlanePoint, w: HalfPlanePoint) -> f64 {
    let diff = z.0 - w.0;
    if diff.norm() < COINCIDENCE_TOL {
        return 0.0;
    }
    (diff.norm() / (z.0 - w.0.conj()).norm()).min(1.0)
}

pub fn half_plane_distance(z: HalfPlanePoint, w: HalfPlanePoint) -> HyperbolicDistance {
    HyperbolicDistance::from_contraction(half_plane_rho(z, w))
}

pub fn green_half_plane(z: HalfPlanePoint, w: HalfPlanePoint) -> ExtReal {
    ExtReal::ln(half_plane_rho(z, w))
}

/// Disc automorphism `z -> e^{i theta} (z - a) / (1 - conj(a) z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscAutomorphism {
    pub rotation: Complex64,
    pub center: Complex64,
}

impl DiscAutomorphism {
    pub fn new(theta: f64, center: DiscPoint) -> Self {
        DiscAutomorphism { rotation: Complex64::from_polar(1.0, theta), center: center.0 }
    }

    pub fn apply_raw(&self, z: Complex64) -> Complex64 {
        self.rotation * (z - self.center) / (Complex64::new(1.0, 0.0) - self.center.conj() * z)
    }

    pub fn apply(&self, z: DiscPoint) -> DiscPoint {
        let w = self.apply_raw(z.0);
        DiscPoint(if w.norm() < 1.0 { w } else { w / (w.norm() * (1.0 + f64::EPSILON)) })
    }

    /// `|m'(z)|`.
    pub fn derivative_modulus(&self, z: Complex64) -> f64 {
        let a2 = self.center.norm_sqr();
        (1.0 - a2) / (Complex64::new(1.0, 0.0) - self.center.conj() * z).norm_sqr()
    }
}
