//! The analytic-disc functional `upsilon_f(x, y) = sum_j k_j log|zeta_j|` over
//! the preimages of `y`, and its minimization over a family of admissible
//! discs. Every value returned by the search is attained by a certified disc,
//! so it is an upper bound for the Green function.
//!
//! The disc family is `f(zeta) = sum_m c_m sigma_a(zeta)^m` where
//! `sigma_a(zeta) = (1 - |a|^2) zeta / (1 + conj(a) zeta)` is a Möbius map
//! fixing `0`. At degree 1 this contains every affine complex geodesic of a
//! convex model domain.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domains::ModelDomain;
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::optimize::{self, golden_min, Minimum, NelderMeadOptions};
use crate::roots;
use crate::vector::ComplexVector;

/// Roots with modulus in `(1 - BOUNDARY_ROOT_TOL, 1)` are discarded.
pub const BOUNDARY_ROOT_TOL: f64 = 1e-9;
/// Maximum residual `|f(zeta) - y|` accepted for a preimage.
pub const RESIDUAL_TOL: f64 = 1e-9;
const MOBIUS_LIMIT: f64 = 1.0 - 1e-6;
/// Objective values at or above this mark discs that miss `y`.
const INFEASIBLE: f64 = 1.0;

/// A holomorphic map of the unit disc into `C^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDisc {
    coefficients: Vec<ComplexVector>,
    mobius: Complex64,
}

impl AnalyticDisc {
    pub fn new(coefficients: Vec<ComplexVector>, mobius: Complex64) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::invalid("a disc needs at least one coefficient"));
        };
        let n = first.dim();
        if n == 0 || coefficients.iter().any(|c| c.dim() != n || !c.is_finite()) {
            return Err(Error::invalid("disc coefficients must share a positive dimension"));
        }
        if !(mobius.norm() < 1.0) {
            return Err(Error::invalid("the Möbius parameter must lie in the unit disc"));
        }
        Ok(AnalyticDisc { coefficients, mobius })
    }

    /// A plain polynomial disc `f(zeta) = sum_m c_m zeta^m`.
    pub fn polynomial(coefficients: Vec<ComplexVector>) -> Result<Self> {
        AnalyticDisc::new(coefficients, Complex64::new(0.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].dim()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[ComplexVector] {
        &self.coefficients
    }

    pub fn mobius(&self) -> Complex64 {
        self.mobius
    }

    /// `f(0)`.
    pub fn base_point(&self) -> &ComplexVector {
        &self.coefficients[0]
    }

    pub fn reparam(&self, zeta: Complex64) -> Complex64 {
        sigma(self.mobius, zeta)
    }

    /// Inverse of the reparametrization, `zeta = s / (1 - |a|^2 - conj(a) s)`.
    pub fn reparam_inverse(&self, s: Complex64) -> Complex64 {
        let a = self.mobius;
        s / (Complex64::new(1.0 - a.norm_sqr(), 0.0) - a.conj() * s)
    }

    pub fn eval_param(&self, s: Complex64) -> ComplexVector {
        let n = self.dim();
        let mut out = ComplexVector::zeros(n);
        for c in self.coefficients.iter().rev() {
            for j in 0..n {
                out[j] = out[j] * s + c[j];
            }
        }
        out
    }

    pub fn eval(&self, zeta: Complex64) -> ComplexVector {
        self.eval_param(self.reparam(zeta))
    }

    /// `f'(0)`.
    pub fn derivative_at_origin(&self) -> ComplexVector {
        match self.coefficients.get(1) {
            Some(c1) => c1.scale_real(1.0 - self.mobius.norm_sqr()),
            None => ComplexVector::zeros(self.dim()),
        }
    }

    fn component_poly(&self, j: usize) -> Vec<Complex64> {
        self.coefficients.iter().map(|c| c[j]).collect()
    }
}

fn sigma(a: Complex64, zeta: Complex64) -> Complex64 {
    zeta * (1.0 - a.norm_sqr()) / (Complex64::new(1.0, 0.0) + a.conj() * zeta)
}

fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Point of `sigma_a(unit circle) = { |s + a| = 1 }` at arc angle `theta`.
/// Equispaced in `theta` even when `|a|` is close to 1.
fn boundary_param(a: Complex64, theta: f64) -> Complex64 {
    unit(theta) - a
}

/// Minimum of a `2 pi`-periodic function sampled at `n` equispaced angles,
/// refined by golden-section search around the best sample.
fn circle_min<F: Fn(f64) -> f64>(g: F, n: usize) -> (f64, f64) {
    circle_min_iters(g, n, if n < 128 { 20 } else { 40 })
}

fn circle_min_iters<F: Fn(f64) -> f64>(g: F, n: usize, iters: usize) -> (f64, f64) {
    let h = std::f64::consts::TAU / n as f64;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..n {
        let theta = h * k as f64;
        let v = g(theta);
        if v < best.1 {
            best = (theta, v);
        }
    }
    if !best.1.is_finite() {
        return best;
    }
    let refined = golden_min(&g, best.0 - h, best.0 + h, iters);
    if refined.1 < best.1 {
        refined
    } else {
        best
    }
}

/// Largest defining norm of `f` on the unit circle (sampled, then refined).
pub fn boundary_max_norm(f: &AnalyticDisc, domain: &ModelDomain, n_samples: usize) -> f64 {
    let (_, m) = circle_min(|t| -domain.defining_norm(&f.eval_param(boundary_param(f.mobius, t))), n_samples.max(64));
    -m
}

/// Checks `f(unit circle) ⊂ {defining norm <= 1 - margin}`; by the maximum
/// principle this certifies `f(disc) ⊂ D`.
///
/// At least 64 samples are always used; the sampled maximum is refined locally,
/// which is stricter than the bare equispaced test.
pub fn containment_check(f: &AnalyticDisc, domain: &ModelDomain, n_boundary_samples: usize, margin: f64) -> bool {
    if f.dim() != domain.dim() {
        return false;
    }
    let level = 1.0 - margin;
    let n = n_boundary_samples.max(64);
    let h = std::f64::consts::TAU / n as f64;
    for k in 0..n {
        if !(domain.defining_norm(&f.eval_param(boundary_param(f.mobius, h * k as f64))) <= level) {
            return false;
        }
    }
    boundary_max_norm(f, domain, n) <= level
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preimage {
    pub zeta: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PreimageSet {
    pub roots: Vec<Preimage>,
}

/// Solutions of `f(zeta) = y` in the open unit disc, with multiplicities.
pub fn find_preimages(f: &AnalyticDisc, y: &ComplexVector) -> Result<PreimageSet> {
    if y.dim() != f.dim() {
        return Err(Error::invalid("target point has the wrong dimension"));
    }
    let scale = f
        .coefficients
        .iter()
        .map(|c| c.sup_norm())
        .fold(0.0, f64::max)
        .max(y.sup_norm())
        .max(1.0);
    let nonconstant = (0..f.dim())
        .find(|&j| f.coefficients[1..].iter().any(|c| c[j].norm() > 1e-14 * scale));
    let Some(j) = nonconstant else {
        return if (f.base_point() - y).norm() <= RESIDUAL_TOL {
            Err(Error::DegenerateDisc)
        } else {
            Ok(PreimageSet::default())
        };
    };
    let mut poly = f.component_poly(j);
    poly[0] -= y[j];
    let candidates = roots::merge_roots(&roots::polynomial_roots(&poly));
    let mut out = Vec::new();
    for (s, mult) in candidates {
        let zeta = f.reparam_inverse(s);
        if !(zeta.re.is_finite() && zeta.im.is_finite()) || zeta.norm() >= 1.0 - BOUNDARY_ROOT_TOL {
            continue;
        }
        if (&f.eval_param(s) - y).norm() > RESIDUAL_TOL {
            continue;
        }
        let multiplicity = if mult > 1 { vanishing_order(f, y, s, mult) } else { 1 };
        out.push(Preimage { zeta, multiplicity });
    }
    out.sort_by(|a, b| a.zeta.norm().total_cmp(&b.zeta.norm()));
    Ok(PreimageSet { roots: out })
}

/// Order of vanishing of `f - y` at the parameter `s`: the smallest order over
/// all components, capped by the root multiplicity of the first component.
fn vanishing_order(f: &AnalyticDisc, y: &ComplexVector, s: Complex64, cap: usize) -> usize {
    let mut order = cap;
    for j in 0..f.dim() {
        let mut poly = f.component_poly(j);
        poly[0] -= y[j];
        let taylor = taylor_shift(&poly, s);
        let scale = taylor.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        let tol = (1e-6 * scale).max(RESIDUAL_TOL);
        let ord = taylor.iter().position(|c| c.norm() > tol).unwrap_or(cap);
        order = order.min(ord.max(1));
    }
    order
}

/// Coefficients of `p(s + t)` in powers of `t`.
fn taylor_shift(poly: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut c = poly.to_vec();
    let n = c.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            let next = c[k + 1];
            c[k] += s * next;
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Upsilon {
    pub value: ExtReal,
    /// `false` when `y` has no preimage: the empty sum `0` gives no bound.
    pub informative: bool,
    pub preimages: PreimageSet,
}

/// `upsilon_f(x, y) = sum_j k_j log |zeta_j|`.
pub fn evaluate_upsilon(f: &AnalyticDisc, x: &ComplexVector, y: &ComplexVector) -> Result<Upsilon> {
    if x.dim() != f.dim() || (f.base_point() - x).norm() > RESIDUAL_TOL {
        return Err(Error::invalid("the disc does not pass through x at 0"));
    }
    let preimages = find_preimages(f, y)?;
    let mut value = ExtReal::ZERO;
    for p in &preimages.roots {
        value = value + ExtReal::ln(p.zeta.norm()).scale_count(p.multiplicity);
    }
    Ok(Upsilon { value, informative: !preimages.roots.is_empty(), preimages })
}

impl ExtReal {
    fn scale_count(self, k: usize) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * k as f64),
            ExtReal::NegInfinity => ExtReal::NegInfinity,
        }
    }
}

/// Parameters of the disc search. Keys match the `key = value` config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub max_degree: usize,
    pub n_starts: usize,
    pub n_boundary_samples: usize,
    pub margin: f64,
    pub seed: u64,
    /// Agreement tolerance against oracles.
    pub tol: f64,
    pub max_evals: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_degree: 4,
            n_starts: 16,
            n_boundary_samples: 256,
            margin: 1e-9,
            seed: 0,
            tol: 1e-4,
            max_evals: 800,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_degree == 0 || self.n_starts == 0 {
            return Err(Error::invalid("max_degree and n_starts must be positive"));
        }
        if self.n_boundary_samples < 64 {
            return Err(Error::invalid("n_boundary_samples must be at least 64"));
        }
        if !(self.margin > 0.0 && self.margin < 0.5) || !(self.tol > 0.0) {
            return Err(Error::invalid("margin and tol must be positive"));
        }
        Ok(())
    }

    fn nm_options(&self) -> NelderMeadOptions {
        NelderMeadOptions { max_evals: self.max_evals, f_tol: 1e-12, x_tol: 1e-8, restarts: 1 }
    }

    /// Boundary resolution used inside the optimizer; the final witness is
    /// rebuilt and certified at the full `n_boundary_samples`.
    fn search_samples(&self) -> usize {
        self.n_boundary_samples.min(64)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageSummary {
    pub degree: usize,
    pub best: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscSearchResult {
    pub estimate: ExtReal,
    pub witness: AnalyticDisc,
    pub preimages: PreimageSet,
    pub stages: Vec<StageSummary>,
}

/// Shared parametrization: `params = [Re a, Im a, Q_0, ..., Q_{d-2}]` with each
/// `Q_j` in `C^n` stored as interleaved real/imaginary parts.
struct Family {
    n: usize,
    degree: usize,
}

impl Family {
    fn n_params(&self) -> usize {
        2 + 2 * self.n * (self.degree - 1)
    }

    fn mobius(&self, p: &[f64]) -> Option<Complex64> {
        let a = Complex64::new(p[0], p[1]);
        (a.norm() < MOBIUS_LIMIT).then_some(a)
    }

    fn q(&self, p: &[f64]) -> Vec<Vec<Complex64>> {
        (0..self.degree.saturating_sub(1))
            .map(|j| {
                (0..self.n)
                    .map(|i| {
                        let k = 2 + 2 * (j * self.n + i);
                        Complex64::new(p[k], p[k + 1])
                    })
                    .collect()
            })
            .collect()
    }

    /// `Q(s)` evaluated into `out`.
    fn q_at(q: &[Vec<Complex64>], s: Complex64, out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for qj in q.iter().rev() {
            for (o, c) in out.iter_mut().zip(qj) {
                *o = *o * s + c;
            }
        }
    }

    /// A start scattered around `center`: the Möbius parameter moves by up to
    /// 0.2 (kept inside the disc) and each perturbation coefficient by up to 0.1.
    fn scattered_start(&self, center: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut p = self.lift(center);
        let r = 0.2 * rng.gen::<f64>().sqrt();
        let phi = rng.gen::<f64>() * std::f64::consts::TAU;
        let mut a = Complex64::new(p[0] + r * phi.cos(), p[1] + r * phi.sin());
        if a.norm() > 0.95 {
            a *= 0.95 / a.norm();
        }
        p[0] = a.re;
        p[1] = a.im;
        for v in p.iter_mut().skip(2) {
            *v += rng.gen_range(-0.1..0.1);
        }
        p
    }

    /// Pads a lower-degree parameter vector with zero perturbation terms.
    fn lift(&self, p: &[f64]) -> Vec<f64> {
        let mut out = p.to_vec();
        out.resize(self.n_params(), 0.0);
        out
    }
}

fn stage_rng(seed: u64, degree: usize, start: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((degree as u64) << 32) | start as u64);
    rng
}

/// Runs the degree-by-degree multi-start search. Each stage seeds one start
/// from the previous stage's best point, so raising the degree never makes the
/// result worse.
fn staged_search<O>(
    n: usize,
    cfg: &SearchConfig,
    initial: Vec<f64>,
    objective: O,
) -> (Vec<(usize, Minimum)>, Vec<StageSummary>)
where
    O: Fn(&Family, &[f64]) -> f64 + Sync,
{
    let opts = cfg.nm_options();
    let mut candidates: Vec<(usize, Minimum)> = Vec::new();
    let mut stages = Vec::new();
    let mut carry = initial;
    let mut carry_f = f64::INFINITY;
    for degree in 1..=cfg.max_degree {
        let family = Family { n, degree };
        let mut starts = Vec::with_capacity(cfg.n_starts);
        starts.push(family.lift(&carry));
        for k in 1..cfg.n_starts {
            starts.push(family.scattered_start(&carry, &mut stage_rng(cfg.seed, degree, k)));
        }
        let f = |p: &[f64]| objective(&family, p);
        let results = optimize::multi_start(&f, &starts, 0.1, &opts);
        let evaluations = results.iter().map(|m| m.evals).sum();
        let best = optimize::best_of(results.clone()).expect("at least one start");
        stages.push(StageSummary { degree, best: best.f, evaluations });
        if best.f <= carry_f {
            carry = best.x.clone();
            carry_f = best.f;
        }
        candidates.extend(results.into_iter().map(|m| (degree, m)));
    }
    candidates.sort_by(|a, b| a.1.f.total_cmp(&b.1.f).then(a.0.cmp(&b.0)));
    (candidates, stages)
}

/// Best degree-1 start on a polar grid of Möbius parameters.
fn green_initial_start(problem: &GreenProblem<'_>) -> Vec<f64> {
    let family = Family { n: problem.x.dim(), degree: 1 };
    let mut grid = vec![vec![0.0, 0.0]];
    if let Some(a) = slice_circle_seed(problem) {
        grid.push(vec![a.re, a.im]);
    }
    for &r in &[0.2, 0.4, 0.6, 0.75, 0.85, 0.9, 0.95, 0.98, 0.99, 0.995, 0.998, 0.999] {
        for k in 0..16 {
            let phi = std::f64::consts::TAU * k as f64 / 16.0;
            grid.push(vec![-r * phi.cos(), -r * phi.sin()]);
        }
    }
    grid.into_iter()
        .map(|p| {
            let v = problem.objective(&family, &p);
            (p, v)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, _)| p)
        .expect("grid is nonempty")
}

/// Möbius parameter of the affine disc filling a least-squares circle fitted
/// to the boundary of the complex slice `{x + w u}`. Exact on the ball.
fn slice_circle_seed(problem: &GreenProblem<'_>) -> Option<Complex64> {
    let n = problem.x.dim();
    let mut dir = vec![Complex64::new(0.0, 0.0); n];
    let mut m = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    for k in 0..32 {
        let e = unit(std::f64::consts::TAU * k as f64 / 32.0);
        for i in 0..n {
            dir[i] = problem.u[i] * e;
        }
        let t = problem.domain.exit_time(problem.x.as_slice(), &dir, problem.level);
        if !t.is_finite() {
            return None;
        }
        let w = e * t;
        // |w|^2 = 2 Re(conj(c) w) + k
        let row = nalgebra::Vector3::new(2.0 * w.re, 2.0 * w.im, 1.0);
        m += row * row.transpose();
        rhs += row * w.norm_sqr();
    }
    let sol = m.lu().solve(&rhs)?;
    let c = Complex64::new(sol[0], sol[1]);
    let r2 = sol[2] + c.norm_sqr();
    if !(r2 > 0.0) {
        return None;
    }
    let a = -c / r2.sqrt();
    (a.norm() < MOBIUS_LIMIT).then_some(a)
}

struct GreenProblem<'a> {
    domain: &'a ModelDomain,
    x: &'a ComplexVector,
    y: &'a ComplexVector,
    u: Vec<Complex64>,
    dist: f64,
    level: f64,
    search_samples: usize,
}

impl GreenProblem<'_> {
    /// Builds the disc `x + (L/delta) s u + L s (s - delta) Q(s)/delta` with the
    /// smallest `delta` that keeps it inside the domain; `f(sigma^-1(delta)) = y`.
    fn solve(&self, family: &Family, p: &[f64], n_samples: usize) -> Option<AnalyticDisc> {
        let (disc, delta) = self.build(family, p, n_samples)?;
        (disc.reparam_inverse(Complex64::new(delta, 0.0)).norm() < 1.0 - BOUNDARY_ROOT_TOL).then_some(disc)
    }

    fn build(&self, family: &Family, p: &[f64], n_samples: usize) -> Option<(AnalyticDisc, f64)> {
        let a = family.mobius(p)?;
        let q = family.q(p);
        let n = family.n;
        let l = self.dist;
        let mut qs = vec![Complex64::new(0.0, 0.0); n];
        let mut origin = vec![Complex64::new(0.0, 0.0); n];
        let mut dir = vec![Complex64::new(0.0, 0.0); n];
        let exit = |theta: f64, qs: &mut [Complex64], origin: &mut [Complex64], dir: &mut [Complex64]| -> f64 {
            let s = boundary_param(a, theta);
            Family::q_at(&q, s, qs);
            for i in 0..n {
                let b = s * qs[i];
                origin[i] = self.x[i] - b * l;
                dir[i] = (self.u[i] + s * qs[i]) * s * l;
            }
            if self.domain.defining_norm_of(origin) > self.level {
                return 0.0;
            }
            self.domain.exit_time(origin, dir, self.level)
        };
        let (_, t_min) = {
            let cell = std::cell::RefCell::new((&mut qs, &mut origin, &mut dir));
            circle_min(
                |t| {
                    let mut g = cell.borrow_mut();
                    let (a, b, c) = &mut *g;
                    exit(t, a, b, c)
                },
                n_samples,
            )
        };
        if !(t_min > 0.0) || !t_min.is_finite() {
            return None;
        }
        let delta = 1.0 / t_min;
        let lambda = l / delta;
        let mut coeffs = vec![self.x.clone()];
        let zero = vec![Complex64::new(0.0, 0.0); n];
        let qj = |j: usize| q.get(j).unwrap_or(&zero);
        let c1: Vec<Complex64> = (0..n).map(|i| (self.u[i] - qj(0)[i] * delta) * lambda).collect();
        coeffs.push(ComplexVector(c1));
        for m in 2..=family.degree {
            let cm = (0..n).map(|i| (qj(m - 2)[i] - qj(m - 1)[i] * delta) * lambda).collect();
            coeffs.push(ComplexVector(cm));
        }
        Some((AnalyticDisc { coefficients: coeffs, mobius: a }, delta))
    }

    /// `upsilon` for admissible discs (always `<= 0`); otherwise the penalty
    /// `1 + |zeta_y|`, which leads infeasible starts toward admissibility.
    fn objective(&self, family: &Family, p: &[f64]) -> f64 {
        let Some((disc, delta)) = self.build(family, p, self.search_samples) else {
            return f64::INFINITY;
        };
        let m = disc.reparam_inverse(Complex64::new(delta, 0.0)).norm();
        if !m.is_finite() {
            return f64::INFINITY;
        }
        if m >= 1.0 - BOUNDARY_ROOT_TOL {
            return INFEASIBLE + m;
        }
        match evaluate_upsilon(&disc, self.x, self.y) {
            Ok(u) if u.informative => u.value.to_f64(),
            _ => f64::INFINITY,
        }
    }
}

/// Minimizes `upsilon_f(x, y)` over admissible discs of degree at most
/// `cfg.max_degree`. Returns the best certified value and its witness.
pub fn minimize_disc_functional(
    domain: &ModelDomain,
    x: &ComplexVector,
    y: &ComplexVector,
    cfg: &SearchConfig,
) -> Result<DiscSearchResult> {
    cfg.validate()?;
    domain.require_inside(x)?;
    domain.require_inside(y)?;
    let diff = y - x;
    let dist = diff.norm();
    if dist < crate::hyperbolic::COINCIDENCE_TOL {
        return Err(Error::invalid("x and y coincide; the Green function has its pole there"));
    }
    let problem = GreenProblem {
        domain,
        x,
        y,
        u: diff.scale_real(1.0 / dist).0,
        dist,
        level: 1.0 - 2.0 * cfg.margin,
        search_samples: cfg.search_samples(),
    };
    let initial = green_initial_start(&problem);
    let (candidates, stages) = staged_search(x.dim(), cfg, initial, |fam, p| problem.objective(fam, p));
    for (degree, m) in &candidates {
        if !(m.f < INFEASIBLE) {
            break;
        }
        let family = Family { n: x.dim(), degree: *degree };
        let Some(witness) = problem.solve(&family, &m.x, cfg.n_boundary_samples) else { continue };
        if !containment_check(&witness, domain, cfg.n_boundary_samples, cfg.margin) {
            continue;
        }
        let ups = evaluate_upsilon(&witness, x, y)?;
        if ups.informative {
            return Ok(DiscSearchResult { estimate: ups.value, witness, preimages: ups.preimages, stages });
        }
    }
    Err(Error::NoAdmissibleDisc("no candidate disc passed certification".into()))
}

/// Result of the extremal-disc search for the infinitesimal Kobayashi metric.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RoydenSearchResult {
    /// Metric value for the direction as given (not normalized).
    pub value: f64,
    /// `r` with `f'(0) = r * direction / |direction|`.
    pub radius: f64,
    pub witness: AnalyticDisc,
    pub stages: Vec<StageSummary>,
}

/// Searches `inf { 1/r : f(0) = x, f'(0) = r xi }` over the same disc family.
pub fn kobayashi_royden_search(
    domain: &ModelDomain,
    x: &ComplexVector,
    xi: &ComplexVector,
    cfg: &SearchConfig,
) -> Result<RoydenSearchResult> {
    cfg.validate()?;
    domain.require_inside(x)?;
    if xi.dim() != x.dim() {
        return Err(Error::invalid("direction has the wrong dimension"));
    }
    let len = xi.norm();
    if !(len > 0.0) {
        return Err(Error::invalid("direction must be nonzero"));
    }
    let dir = xi.scale_real(1.0 / len).0;
    let level = 1.0 - 2.0 * cfg.margin;
    let n = x.dim();
    let max_radius = |family: &Family, p: &[f64], n_samples: usize| -> Option<(Complex64, Vec<Vec<Complex64>>, f64)> {
        let a = family.mobius(p)?;
        let q = family.q(p);
        let cell = std::cell::RefCell::new((vec![Complex64::new(0.0, 0.0); n], vec![Complex64::new(0.0, 0.0); n]));
        let (_, t) = circle_min(
            |theta| {
                let mut g = cell.borrow_mut();
                let (qs, h) = &mut *g;
                let s = boundary_param(a, theta);
                Family::q_at(&q, s, qs);
                for i in 0..n {
                    h[i] = (dir[i] + s * qs[i]) * s;
                }
                domain.exit_time(x.as_slice(), h, level)
            },
            n_samples,
        );
        (t > 0.0 && t.is_finite()).then_some((a, q, t))
    };
    let objective = |family: &Family, p: &[f64]| match max_radius(family, p, cfg.search_samples()) {
        Some((a, _, t)) => 1.0 / (t * (1.0 - a.norm_sqr())),
        None => f64::INFINITY,
    };
    let (candidates, stages) = staged_search(n, cfg, vec![0.0, 0.0], objective);
    for (degree, m) in &candidates {
        if !m.f.is_finite() {
            break;
        }
        let family = Family { n, degree: *degree };
        let Some((a, q, t)) = max_radius(&family, &m.x, cfg.n_boundary_samples) else { continue };
        let mut coeffs = vec![x.clone(), ComplexVector(dir.iter().map(|d| d * t).collect())];
        for qj in &q {
            coeffs.push(ComplexVector(qj.iter().map(|c| c * t).collect()));
        }
        let witness = AnalyticDisc { coefficients: coeffs, mobius: a };
        if !containment_check(&witness, domain, cfg.n_boundary_samples, cfg.margin) {
            continue;
        }
        let radius = witness.derivative_at_origin().norm();
        return Ok(RoydenSearchResult { value: len / radius, radius, witness, stages });
    }
    Err(Error::NoAdmissibleDisc("no candidate disc passed certification".into()))
}

/// Circle mean-value defect of `zeta -> g_D(f(zeta), y)` on the circle of
/// radius `r` about `center` (mean minus center value). Zero for harmonic
/// slices; needs a closed-form Green function.
pub fn slice_harmonicity_defect(
    domain: &ModelDomain,
    f: &AnalyticDisc,
    y: &ComplexVector,
    center: Complex64,
    r: f64,
    n_samples: usize,
) -> Result<f64> {
    let g = |zeta: Complex64| -> Result<ExtReal> {
        domain
            .green_oracle(&f.eval(zeta), y)?
            .ok_or_else(|| Error::invalid("no closed-form Green function for this pole"))
    };
    let mid = g(center)?;
    let values = (0..n_samples)
        .map(|k| g(center + Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n_samples as f64)))
        .collect::<Result<Vec<_>>>()?;
    let mean = ExtReal::mean(values);
    match (mean, mid) {
        (ExtReal::Finite(m), ExtReal::Finite(c)) => Ok(m - c),
        _ => Err(Error::invalid("the circle meets a preimage of the pole")),
    }
}

/// Uniform random point of the ball of radius `r` in `C^n` (Euclidean).
pub fn random_ball_point(rng: &mut impl Rng, n: usize, r: f64) -> ComplexVector {
    loop {
        let v: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r))).collect();
        let v = ComplexVector(v);
        if v.norm() < r {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_poly(coeffs: &[Complex64]) -> AnalyticDisc {
        AnalyticDisc::polynomial(coeffs.iter().map(|z| ComplexVector::scalar(*z)).collect()).unwrap()
    }

    fn sv(z: Complex64) -> ComplexVector {
        ComplexVector::scalar(z)
    }

    #[test]
    fn containment_examples() {
        let disc = ModelDomain::Disc;
        assert!(containment_check(&scalar_poly(&[c(0.0, 0.0), c(0.9, 0.0)]), &disc, 64, 1e-9));
        assert!(!containment_check(&scalar_poly(&[c(0.0, 0.0), c(1.1, 0.0)]), &disc, 64, 1e-9));
        let ball = ModelDomain::EuclideanBall { dim: 2 };
        let f = AnalyticDisc::polynomial(vec![
            ComplexVector::zeros(2),
            ComplexVector::from_reals(&[0.7, 0.7]),
        ])
        .unwrap();
        assert!(containment_check(&f, &ball, 128, 0.005));
        assert!(!containment_check(&f, &ball, 128, 0.02));
    }

    #[test]
    fn containment_catches_peaks_between_samples() {
        // |0.5 - 0.4995 z^64| is tiny at the 64 sample angles and peaks at
        // 0.9995 halfway between them.
        let mut coeffs = vec![c(0.0, 0.0); 65];
        coeffs[0] = c(0.5, 0.0);
        coeffs[64] = c(-0.4995, 0.0);
        let f = scalar_poly(&coeffs);
        assert!((boundary_max_norm(&f, &ModelDomain::Disc, 64) - 0.9995).abs() < 1e-9);
        assert!(!containment_check(&f, &ModelDomain::Disc, 64, 1e-3));
        assert!(containment_check(&f, &ModelDomain::Disc, 64, 1e-4));
    }

    #[test]
    fn preimage_examples() {
        let id = scalar_poly(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let p = find_preimages(&id, &sv(c(0.5, 0.0))).unwrap();
        assert_eq!(p.roots.len(), 1);
        assert!((p.roots[0].zeta - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(p.roots[0].multiplicity, 1);

        let sq = scalar_poly(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let p = find_preimages(&sq, &sv(c(0.25, 0.0))).unwrap();
        assert_eq!(p.roots.len(), 2);
        for r in &p.roots {
            assert!((r.zeta.norm() - 0.5).abs() < 1e-14);
            assert_eq!(r.multiplicity, 1);
        }
        let p = find_preimages(&sq, &sv(c(0.0, 0.0))).unwrap();
        assert_eq!(p.roots, vec![Preimage { zeta: c(0.0, 0.0), multiplicity: 2 }]);

        let constant = scalar_poly(&[c(0.2, 0.0)]);
        assert_eq!(find_preimages(&constant, &sv(c(0.2, 0.0))), Err(Error::DegenerateDisc));
        assert!(find_preimages(&constant, &sv(c(0.3, 0.0))).unwrap().roots.is_empty());
    }

    #[test]
    fn vector_preimages_filter_by_residual() {
        // f = (z, z^2): y = (0.5, 0.25) has one preimage, y = (0.5, 0.3) none.
        let f = AnalyticDisc::polynomial(vec![
            ComplexVector::zeros(2),
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[0.0, 1.0]),
        ])
        .unwrap();
        let p = find_preimages(&f, &ComplexVector::from_reals(&[0.5, 0.25])).unwrap();
        assert_eq!(p.roots.len(), 1);
        assert!(find_preimages(&f, &ComplexVector::from_reals(&[0.5, 0.3])).unwrap().roots.is_empty());
        // f = (z^2, z^3) at 0: orders 2 and 3, multiplicity 2
        let g = AnalyticDisc::polynomial(vec![
            ComplexVector::zeros(2),
            ComplexVector::zeros(2),
            ComplexVector::from_reals(&[1.0, 0.0]),
            ComplexVector::from_reals(&[0.0, 1.0]),
        ])
        .unwrap();
        let p = find_preimages(&g, &ComplexVector::zeros(2)).unwrap();
        assert_eq!(p.roots[0].multiplicity, 2);
    }

    #[test]
    fn upsilon_examples() {
        let id = scalar_poly(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let zero = sv(c(0.0, 0.0));
        let u = evaluate_upsilon(&id, &zero, &sv(c(0.5, 0.0))).unwrap();
        assert!((u.value.to_f64() - 0.5f64.ln()).abs() < 1e-15);
        let sq = scalar_poly(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let u = evaluate_upsilon(&sq, &zero, &sv(c(0.25, 0.0))).unwrap();
        assert!((u.value.to_f64() - 0.25f64.ln()).abs() < 1e-14);
        let u = evaluate_upsilon(&id, &zero, &sv(c(0.3, 0.4))).unwrap();
        assert!((u.value.to_f64() - 0.5f64.ln()).abs() < 1e-15);
        let u = evaluate_upsilon(&id, &zero, &zero).unwrap();
        assert!(u.value.is_neg_infinite());
        let far = scalar_poly(&[c(0.0, 0.0), c(0.5, 0.0)]);
        let u = evaluate_upsilon(&far, &zero, &sv(c(0.9, 0.0))).unwrap();
        assert!(!u.informative && u.value == ExtReal::ZERO);
        assert!(evaluate_upsilon(&id, &sv(c(0.1, 0.0)), &zero).is_err());
    }

    #[test]
    fn mobius_reparametrization_round_trip() {
        let f = AnalyticDisc::new(vec![sv(c(0.2, 0.1)), sv(c(0.5, -0.2))], c(0.3, -0.4)).unwrap();
        for zeta in [c(0.1, 0.2), c(-0.7, 0.1), c(0.0, 0.9)] {
            let s = f.reparam(zeta);
            assert!((f.reparam_inverse(s) - zeta).norm() < 1e-14);
        }
        assert_eq!(f.eval(c(0.0, 0.0)), sv(c(0.2, 0.1)));
        // the disc automorphism z -> (z + x)/(1 + conj(x) z) is x + sigma_x(z)
        let x = c(0.3, -0.2);
        let g = AnalyticDisc::new(vec![sv(x), sv(c(1.0, 0.0))], x).unwrap();
        let z = c(0.4, 0.5);
        let expected = (z + x) / (c(1.0, 0.0) + x.conj() * z);
        assert!((g.eval(z)[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn json_witness_shape() {
        let f = AnalyticDisc::polynomial(vec![sv(c(0.0, 0.0)), sv(c(1.0, 0.5))]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"coefficients":[[[0.0,0.0]],[[1.0,0.5]]],"mobius":[0.0,0.0]}"#);
        let back: AnalyticDisc = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn search_rejects_bad_input() {
        let cfg = SearchConfig::default();
        let x = sv(c(0.2, 0.0));
        assert!(minimize_disc_functional(&ModelDomain::Disc, &x, &x, &cfg).is_err());
        assert!(minimize_disc_functional(&ModelDomain::Disc, &x, &sv(c(1.2, 0.0)), &cfg).is_err());
        let bad = SearchConfig { n_boundary_samples: 10, ..SearchConfig::default() };
        assert!(minimize_disc_functional(&ModelDomain::Disc, &x, &sv(c(0.0, 0.0)), &bad).is_err());
    }
}
