//! The Hamilton–Krushkal extremality test for Beltrami coefficients, and the
//! log-plurisubharmonic certificate for constant coefficients on the torus.
//!
//! Pairings use `dz ^ dzbar = -2i dx dy`, so `1/2 |int mu phi dz ^ dzbar|`
//! equals `|int mu phi dx dy|`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::{self, NelderMeadOptions};
use crate::teich::{canonical_projection, teich_distance, TorusBeltrami, TorusModulus};

/// A Beltrami coefficient on a fundamental domain, addressed by coordinates
/// `(u, v)` in `[0, 1)^2`: lattice coordinates `z = u + v tau` on the torus,
/// polar coordinates `z = u e^{2 pi i v}` on the disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeltramiField {
    pub kind: BeltramiKind,
    pub sup_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeltramiKind {
    Constant(Complex64),
    /// Row-major cell values, `values[i * n_v + j]` on cell `(i, j)`.
    Grid { n_u: usize, n_v: usize, values: Vec<Complex64> },
}

impl BeltramiField {
    pub fn constant(mu: Complex64) -> Result<Self> {
        Self::checked(BeltramiKind::Constant(mu), mu.norm())
    }

    pub fn grid(n_u: usize, n_v: usize, values: Vec<Complex64>) -> Result<Self> {
        if n_u == 0 || n_v == 0 || values.len() != n_u * n_v {
            return Err(Error::invalid("grid shape does not match the number of values"));
        }
        let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Self::checked(BeltramiKind::Grid { n_u, n_v, values }, sup)
    }

    fn checked(kind: BeltramiKind, sup_norm: f64) -> Result<Self> {
        if !(sup_norm < 1.0) {
            return Err(Error::domain(format!("sup norm {sup_norm} of the Beltrami field is not < 1")));
        }
        Ok(BeltramiField { kind, sup_norm })
    }

    /// Torus field equal to `k` on the left half of the cell and `-k` on the right.
    pub fn torus_alternating(k: f64) -> Result<Self> {
        Self::grid(2, 1, vec![Complex64::new(k, 0.0), Complex64::new(-k, 0.0)])
    }

    /// Disc field `k sign(cos 4 theta)` on sixteen angular sectors.
    pub fn angular4(k: f64) -> Result<Self> {
        let values = (0..16)
            .map(|j| {
                let mid = (j as f64 + 0.5) * TAU / 16.0;
                Complex64::new(k * (4.0 * mid).cos().signum(), 0.0)
            })
            .collect();
        Self::grid(1, 16, values)
    }

    pub fn at(&self, u: f64, v: f64) -> Complex64 {
        match &self.kind {
            BeltramiKind::Constant(mu) => *mu,
            BeltramiKind::Grid { n_u, n_v, values } => {
                let i = ((u * *n_u as f64) as usize).min(n_u - 1);
                let j = ((v * *n_v as f64) as usize).min(n_v - 1);
                values[i * n_v + j]
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        match &self.kind {
            BeltramiKind::Constant(mu) => Self::constant(mu * c),
            BeltramiKind::Grid { n_u, n_v, values } => {
                Self::grid(*n_u, *n_v, values.iter().map(|v| v * c).collect())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisDomain {
    Torus(TorusModulus),
    Disc,
}

/// Holomorphic functions given by ascending monomial coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDiffBasis {
    pub elements: Vec<Vec<Complex64>>,
    pub domain: BasisDomain,
}

impl QuadDiffBasis {
    pub fn new(elements: Vec<Vec<Complex64>>, domain: BasisDomain) -> Result<Self> {
        if elements.is_empty() || elements.iter().any(|e| e.is_empty()) {
            return Err(Error::invalid("basis must contain at least one nonempty element"));
        }
        Ok(QuadDiffBasis { elements, domain })
    }

    pub fn monomials(degree: usize, domain: BasisDomain) -> Self {
        let elements = (0..=degree)
            .map(|d| {
                let mut e = vec![Complex64::new(0.0, 0.0); d + 1];
                e[d] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        QuadDiffBasis { elements, domain }
    }

    /// The constant differential: all of `A_1` for a torus.
    pub fn torus_constant(tau: TorusModulus) -> Self {
        Self::monomials(0, BasisDomain::Torus(tau))
    }

    /// True when the span is the whole space of integrable holomorphic
    /// quadratic differentials, so a gap refutes extremality outright.
    pub fn is_complete(&self) -> bool {
        matches!(self.domain, BasisDomain::Torus(_))
            && self.elements.iter().all(|e| e.iter().skip(1).all(|c| c.norm() == 0.0))
    }

    fn eval(&self, j: usize, z: Complex64) -> Complex64 {
        self.elements[j].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        QuadDiffBasis {
            elements: self.elements.iter().map(|e| e.iter().map(|c| c * s).collect()).collect(),
            domain: self.domain,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub n_u: usize,
    pub n_v: usize,
    /// Ratio of successive radial cell widths on the disc (< 1 refines
    /// toward the boundary).
    pub radial_grading: f64,
    /// Margin below the sup norm beyond which the verdict is `not_extremal`.
    pub gap_bound: f64,
    pub n_starts: usize,
    pub seed: u64,
    pub max_evals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            n_u: 128,
            n_v: 128,
            radial_grading: 0.97,
            gap_bound: 1e-2,
            n_starts: 4,
            seed: 0,
            max_evals: 1500,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_u < 32 || self.n_v < 32 {
            return Err(Error::invalid("quadrature grid must be at least 32x32"));
        }
        if !(self.radial_grading > 0.0 && self.radial_grading <= 1.0) {
            return Err(Error::invalid("radial_grading must lie in (0, 1]"));
        }
        if !(self.gap_bound > 0.0) || self.n_starts == 0 {
            return Err(Error::invalid("gap_bound and n_starts must be positive"));
        }
        Ok(())
    }
}

struct Node {
    z: Complex64,
    u: f64,
    v: f64,
    /// `dx dy` weight.
    w: f64,
}

fn nodes(domain: BasisDomain, q: &QuadratureConfig) -> Vec<Node> {
    let mut out = Vec::with_capacity(q.n_u * q.n_v);
    match domain {
        BasisDomain::Torus(tau) => {
            let t = tau.value();
            let w = t.im / (q.n_u * q.n_v) as f64;
            for i in 0..q.n_u {
                let u = (i as f64 + 0.5) / q.n_u as f64;
                for j in 0..q.n_v {
                    let v = (j as f64 + 0.5) / q.n_v as f64;
                    out.push(Node { z: u + t * v, u, v, w });
                }
            }
        }
        BasisDomain::Disc => {
            let g = q.radial_grading;
            let widths: Vec<f64> = (0..q.n_u).map(|i| g.powi(i as i32)).collect();
            let total: f64 = widths.iter().sum();
            let dtheta = TAU / q.n_v as f64;
            let mut r0 = 0.0;
            for h in widths.iter().map(|w| w / total) {
                let r = r0 + 0.5 * h;
                for j in 0..q.n_v {
                    let v = (j as f64 + 0.5) / q.n_v as f64;
                    out.push(Node { z: Complex64::from_polar(r, TAU * v), u: r, v, w: r * h * dtheta });
                }
                r0 += h;
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HkResult {
    pub value: f64,
    pub coefficients: Vec<Complex64>,
    /// `int |phi_j| dx dy` per basis element.
    pub element_l1_norms: Vec<f64>,
}

pub const DEGENERATE_L1: f64 = 1e-12;

/// `sup |int mu phi dx dy| / ||phi||_1` over the span of the basis.
pub fn hk_functional(mu: &BeltramiField, basis: &QuadDiffBasis, quad: &QuadratureConfig) -> Result<HkResult> {
    quad.validate()?;
    let m = basis.elements.len();
    let grid = nodes(basis.domain, quad);
    // Weighted values `w_q phi_j(z_q)`, node-major.
    let wphi: Vec<Complex64> =
        grid.iter().flat_map(|nd| (0..m).map(move |j| basis.eval(j, nd.z) * nd.w)).collect();
    let l1: Vec<f64> = (0..m).map(|j| wphi.iter().skip(j).step_by(m).map(|p| p.norm()).sum()).collect();
    if l1.iter().all(|&n| n < DEGENERATE_L1) {
        return Err(Error::DegenerateBasis(DEGENERATE_L1));
    }
    let pairing: Vec<Complex64> = (0..m)
        .map(|j| grid.iter().zip(wphi.iter().skip(j).step_by(m)).map(|(nd, p)| mu.at(nd.u, nd.v) * p).sum())
        .collect();
    let l1_norm = |c: &[Complex64]| -> f64 {
        wphi.chunks_exact(m).map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum::<Complex64>().norm()).sum()
    };
    let coeffs = |p: &[f64]| -> Vec<Complex64> { p.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect() };
    let ratio = |c: &[Complex64]| -> f64 {
        let num: Complex64 = c.iter().zip(&pairing).map(|(a, b)| a * b).sum();
        let den = l1_norm(c);
        if den < DEGENERATE_L1 {
            0.0
        } else {
            num.norm() / den
        }
    };
    let objective = |p: &[f64]| -ratio(&coeffs(p));

    let mut starts: Vec<Vec<f64>> = Vec::new();
    for j in 0..m {
        if l1[j] >= DEGENERATE_L1 {
            let mut s = vec![0.0; 2 * m];
            s[2 * j] = 1.0 / l1[j];
            starts.push(s);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(quad.seed);
    for _ in 0..quad.n_starts {
        starts.push((0..2 * m).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    // The start values are kept: a local search never returns worse than its start.
    let opts = NelderMeadOptions { max_evals: quad.max_evals, f_tol: 1e-15, x_tol: 1e-10, restarts: 1 };
    let best = if m == 1 {
        starts.iter().map(|s| (s.clone(), objective(s))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap()
    } else {
        let results = optimize::multi_start(&objective, &starts, 0.1, &opts);
        let b = optimize::best_of(results).expect("nonempty starts");
        (b.x, b.f)
    };
    let mut c = coeffs(&best.0);
    let value = -best.1;
    // Normalize to unit L1 norm for reporting.
    let den = l1_norm(&c);
    if den > 0.0 {
        c.iter_mut().for_each(|a| *a /= den);
    }
    Ok(HkResult { value, coefficients: c, element_l1_norms: l1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Extremal,
    NotExtremal,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub hk_value: f64,
    pub sup_norm: f64,
    pub verdict: Verdict,
    /// Set when a `not_extremal` verdict rests on a truncated basis.
    pub provisional: bool,
    pub achieving_coefficients: Vec<Complex64>,
    pub tol: f64,
    pub gap_bound: f64,
    pub note: String,
}

pub fn is_extremal(
    mu: &BeltramiField,
    basis: &QuadDiffBasis,
    quad: &QuadratureConfig,
    tol: f64,
) -> Result<ExtremalityReport> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    let hk = hk_functional(mu, basis, quad)?;
    let sup = mu.sup_norm;
    let verdict = if hk.value >= sup - tol {
        Verdict::Extremal
    } else if hk.value < sup - quad.gap_bound {
        Verdict::NotExtremal
    } else {
        Verdict::Inconclusive
    };
    let complete = basis.is_complete();
    let provisional = verdict == Verdict::NotExtremal && !complete;
    let note = if complete {
        "basis spans all integrable holomorphic quadratic differentials".to_string()
    } else {
        "truncated basis: can certify extremality but never refute it".to_string()
    };
    Ok(ExtremalityReport {
        hk_value: hk.value,
        sup_norm: sup,
        verdict,
        provisional,
        achieving_coefficients: hk.coefficients,
        tol,
        gap_bound: quad.gap_bound,
        note,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderRung {
    pub t: f64,
    pub ratio: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Theorem3Report {
    pub mu0: TorusBeltrami,
    pub base: TorusModulus,
    pub rungs: Vec<LadderRung>,
    pub max_ratio_deviation: f64,
    /// `f(Phi(mu0))`, to be compared with `||mu0||`.
    pub certificate_at_mu0: f64,
    pub norm_mu0: f64,
    pub second_condition_discrepancy: f64,
    pub pass: bool,
}

pub const THEOREM3_RATIO_TOL: f64 = 1e-10;
pub const THEOREM3_VALUE_TOL: f64 = 1e-12;

/// Evaluates the certificate `f(x) = k(x, base)` along `t mu0 / |mu0|` and at
/// `mu0` itself.
pub fn theorem3_certificate_check(mu0: TorusBeltrami, base: TorusModulus, ladder: &[f64]) -> Result<Theorem3Report> {
    let norm = mu0.norm();
    if !(norm > 0.0) {
        return Err(Error::invalid("mu0 must be nonzero"));
    }
    if ladder.is_empty() || ladder.iter().any(|&t| !(t > 0.0 && t < 1.0)) || ladder.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::invalid("ladder values must lie in (0, 1) and decrease"));
    }
    let f = |mu: Complex64| -> Result<f64> {
        Ok(teich_distance(canonical_projection(TorusBeltrami::new(mu)?, base), base).k)
    };
    let nu = mu0.value() / norm;
    let rungs = ladder
        .iter()
        .map(|&t| {
            let ratio = f(nu * t)? / t;
            Ok(LadderRung { t, ratio, deviation: (ratio - 1.0).abs() })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio_deviation = rungs.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let certificate_at_mu0 = f(mu0.value())?;
    let second = (certificate_at_mu0 - norm).abs();
    Ok(Theorem3Report {
        mu0,
        base,
        rungs,
        max_ratio_deviation,
        certificate_at_mu0,
        norm_mu0: norm,
        second_condition_discrepancy: second,
        pass: max_ratio_deviation <= THEOREM3_RATIO_TOL && second <= THEOREM3_VALUE_TOL,
    })
}

/// Pairing value `2k/pi` of the `angular4` field against `z^4`, the best
/// element of any monomial basis of degree 4 to 11.
pub fn angular4_expected(k: f64) -> f64 {
    2.0 * k / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn small() -> QuadratureConfig {
        QuadratureConfig { n_u: 48, n_v: 48, ..QuadratureConfig::default() }
    }

    #[test]
    fn torus_constant_pairing() {
        let tau = TorusModulus::new(c(0.3, 1.2)).unwrap();
        let basis = QuadDiffBasis::torus_constant(tau);
        let r = hk_functional(&BeltramiField::constant(c(0.3, 0.0)).unwrap(), &basis, &small()).unwrap();
        assert!((r.value - 0.3).abs() < 1e-12);
        let r = is_extremal(&BeltramiField::constant(c(0.1, -0.2)).unwrap(), &basis, &small(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Extremal);
        assert!((r.hk_value - 5f64.sqrt() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_pairs_to_zero() {
        let z = BeltramiField::constant(c(0.0, 0.0)).unwrap();
        let r = hk_functional(&z, &QuadDiffBasis::monomials(3, BasisDomain::Disc), &small()).unwrap();
        assert_eq!(r.value, 0.0);
        let r = is_extremal(&z, &QuadDiffBasis::torus_constant(TorusModulus::square()), &small(), 1e-9).unwrap();
        assert_eq!(r.verdict, Verdict::Extremal);
    }

    #[test]
    fn alternating_torus_field() {
        let tau = TorusModulus::square();
        let mu = BeltramiField::torus_alternating(0.3).unwrap();
        let r = hk_functional(&mu, &QuadDiffBasis::torus_constant(tau), &small()).unwrap();
        assert!(r.value < 1e-12, "{}", r.value);
        let rep = is_extremal(&mu, &QuadDiffBasis::torus_constant(tau), &small(), 1e-6).unwrap();
        assert_eq!(rep.verdict, Verdict::NotExtremal);
        assert!(!rep.provisional);
        let r = hk_functional(&mu, &QuadDiffBasis::monomials(3, BasisDomain::Torus(tau)), &small()).unwrap();
        assert!(r.value < 0.3, "{}", r.value);
    }

    #[test]
    fn disc_teichmuller_differential_is_extremal() {
        let mu = BeltramiField::constant(c(0.4, 0.0)).unwrap();
        let r = is_extremal(&mu, &QuadDiffBasis::monomials(6, BasisDomain::Disc), &small(), 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::Extremal);
        assert!((r.hk_value - 0.4).abs() < 1e-9);
    }

    #[test]
    fn angular_pattern_is_not_extremal() {
        let mu = BeltramiField::angular4(0.4).unwrap();
        let r = is_extremal(&mu, &QuadDiffBasis::monomials(6, BasisDomain::Disc), &small(), 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::NotExtremal);
        assert!(r.provisional);
        assert!((r.hk_value - angular4_expected(0.4)).abs() < 5e-3, "{}", r.hk_value);
    }

    #[test]
    fn basis_scaling_and_field_scaling() {
        let mu = BeltramiField::angular4(0.4).unwrap();
        let basis = QuadDiffBasis::monomials(4, BasisDomain::Disc);
        let v = hk_functional(&mu, &basis, &small()).unwrap().value;
        let vs = hk_functional(&mu, &basis.scaled(c(-2.0, 3.0)), &small()).unwrap().value;
        assert!((v - vs).abs() < 1e-12, "{v} vs {vs}");
        let half = hk_functional(&mu.scaled(0.5).unwrap(), &basis, &small()).unwrap().value;
        assert!((half - 0.5 * v).abs() < 1e-10, "{half} vs {}", 0.5 * v);
    }

    #[test]
    fn nested_bases_are_monotone() {
        let mu = BeltramiField::angular4(0.4).unwrap();
        let mut prev = 0.0;
        for d in 0..=6 {
            let v = hk_functional(&mu, &QuadDiffBasis::monomials(d, BasisDomain::Disc), &small()).unwrap().value;
            assert!(v >= prev - 1e-12, "degree {d}: {v} < {prev}");
            assert!(v <= mu.sup_norm + 1e-9);
            prev = v;
        }
    }

    #[test]
    fn degenerate_basis_rejected() {
        let b = QuadDiffBasis::new(vec![vec![c(0.0, 0.0)]], BasisDomain::Disc).unwrap();
        let e = hk_functional(&BeltramiField::constant(c(0.2, 0.0)).unwrap(), &b, &small()).unwrap_err();
        assert!(matches!(e, Error::DegenerateBasis(_)));
        assert!(QuadDiffBasis::new(vec![], BasisDomain::Disc).is_err());
        let coarse = QuadratureConfig { n_u: 16, ..QuadratureConfig::default() };
        assert!(hk_functional(&BeltramiField::constant(c(0.2, 0.0)).unwrap(), &b, &coarse).is_err());
    }

    #[test]
    fn field_validation() {
        assert!(BeltramiField::constant(c(1.0, 0.0)).is_err());
        assert!(BeltramiField::grid(2, 2, vec![c(0.1, 0.0); 3]).is_err());
        let f = BeltramiField::angular4(0.4).unwrap();
        assert_eq!(f.at(0.5, 0.01), c(0.4, 0.0));
        assert_eq!(f.at(0.5, 0.125), c(-0.4, 0.0));
    }

    #[test]
    fn certificate_examples() {
        let i = TorusModulus::square();
        let mu0 = TorusBeltrami::new(c(0.3, 0.0)).unwrap();
        let r = theorem3_certificate_check(mu0, i, &[0.1, 0.01, 0.001]).unwrap();
        assert!(r.pass);
        assert!(r.max_ratio_deviation <= 1e-10);
        assert!(r.second_condition_discrepancy <= 1e-12);
        let r = theorem3_certificate_check(mu0, i, &[0.5]).unwrap();
        assert!(r.rungs[0].deviation < 1e-15);
        assert!(theorem3_certificate_check(TorusBeltrami::new(c(0.0, 0.0)).unwrap(), i, &[0.1]).is_err());
        assert!(theorem3_certificate_check(mu0, i, &[0.01, 0.1]).is_err());
    }

    #[test]
    fn consistency_with_teichmuller_distance() {
        let base = TorusModulus::new(c(-0.4, 0.9)).unwrap();
        for mu in [c(0.3, 0.0), c(-0.2, 0.5), c(0.0, -0.7)] {
            let field = BeltramiField::constant(mu).unwrap();
            let r = is_extremal(&field, &QuadDiffBasis::torus_constant(base), &small(), 1e-9).unwrap();
            assert_eq!(r.verdict, Verdict::Extremal);
            let target = canonical_projection(TorusBeltrami::new(mu).unwrap(), base);
            assert!((teich_distance(base, target).k - mu.norm()).abs() < 1e-12);
        }
    }
}
