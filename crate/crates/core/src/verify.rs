//! Verification suites run by `green-teich verify`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::disc_functional::{minimize_disc_functional, random_ball_point};
use crate::domains::{ModelDomain, NormKind};
use crate::error::{Error, Result};
use crate::extended::ExtReal;
use crate::extremality::{
    hk_functional, is_extremal, theorem3_certificate_check, BasisDomain, BeltramiField, QuadDiffBasis,
    Verdict, THEOREM3_RATIO_TOL,
};
use crate::metrics::{
    theorem2_check, torus_azukawa, torus_finsler, torus_kobayashi_royden, TangentVector, THEOREM2_TOL,
};
use crate::psh::{
    contraction_check, hyperconvexity_probe, random_submean_triple, submean_check, FieldDomain,
    GreenFunction, HolomorphicMap, ScalarField, SUBMEAN_TOL,
};
use crate::report::to_value;
use crate::teich::{
    canonical_projection, eq2_identity_check, eq2_sample, lemma2_check, teich_distance, teich_green,
    TorusBeltrami, TorusModulus, LEMMA2_TOL,
};
use crate::vector::ComplexVector;

pub const SUITES: [&str; 8] = ["eq2", "lemma1", "lemma2", "theorem2", "theorem3", "corollary5", "psh", "hyperconvex"];

pub const COROLLARY5_CASES: [&str; 4] = ["torus-constant", "torus-alternating", "disc-teichmuller", "disc-angular4"];

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub n: Option<usize>,
    pub domain: Option<ModelDomain>,
    pub case: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: Value) -> Self {
        Check { name: name.into(), pass, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub worst_case: Value,
    pub data: Value,
}

impl SuiteOutcome {
    fn new(suite: &str, checks: Vec<Check>, worst_case: Value, data: Value) -> Self {
        SuiteOutcome { suite: suite.into(), pass: checks.iter().all(|c| c.pass), checks, worst_case, data }
    }
}

/// Runs one suite, or every suite for `"all"`.
pub fn run(name: &str, opts: &VerifyOptions, cfg: &RunConfig) -> Result<Vec<SuiteOutcome>> {
    cfg.validate()?;
    if name == "all" {
        return SUITES.iter().map(|s| run_one(s, &VerifyOptions::default(), cfg)).collect();
    }
    Ok(vec![run_one(name, opts, cfg)?])
}

fn run_one(name: &str, opts: &VerifyOptions, cfg: &RunConfig) -> Result<SuiteOutcome> {
    match name {
        "eq2" => eq2(opts.n.unwrap_or(100), cfg),
        "lemma1" => lemma1(opts.domain.clone().unwrap_or(ModelDomain::EuclideanBall { dim: 2 }), opts.n, cfg),
        "lemma2" => lemma2(opts.n.unwrap_or(50), cfg),
        "theorem2" => theorem2(opts.domain.clone().unwrap_or(ModelDomain::Disc), opts.n, cfg),
        "theorem3" => theorem3(opts.n.unwrap_or(20), cfg),
        "corollary5" => corollary5(opts.case.as_deref().unwrap_or("all"), opts.n.unwrap_or(20), cfg),
        "psh" => psh(opts.n.unwrap_or(200), cfg),
        "hyperconvex" => hyperconvex(opts.n.unwrap_or(8), cfg),
        other => Err(Error::Parse(format!("unknown verify suite '{other}'"))),
    }
}

/// Random point with defining norm below `frac`.
pub fn random_domain_point(rng: &mut impl Rng, domain: &ModelDomain, frac: f64) -> ComplexVector {
    match domain {
        ModelDomain::Disc => random_ball_point(rng, 1, frac),
        ModelDomain::EuclideanBall { dim } => random_ball_point(rng, *dim, frac),
        ModelDomain::Polydisc { dim } => {
            ComplexVector((0..*dim).map(|_| random_ball_point(rng, 1, frac)[0]).collect())
        }
        ModelDomain::BanachBall { norm, center, radius } => {
            let v = random_ball_point(rng, center.dim(), 1.0);
            let len = norm.eval(v.as_slice()).max(f64::MIN_POSITIVE);
            let t = rng.gen_range(0.0..frac) * radius / len;
            center.axpy(Complex64::new(t, 0.0), &v)
        }
    }
}

fn eq2(n: usize, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let tol_t = cfg.tolerance("eq2_transform", 1e-13);
    let tol_h = cfg.tolerance("eq2_half_plane", 1e-12);
    let report = eq2_identity_check(n, cfg.seed)?;
    let ex = eq2_sample(TorusModulus::square(), TorusModulus::new(Complex64::new(0.0, 2.0))?);
    let third = ExtReal::Finite((1.0f64 / 3.0).ln());
    let ex_err = ex.g.abs_diff(third).max(ex.half_plane.abs_diff(third));
    let checks = vec![
        Check::new("log_k_equals_log_tanh_d", report.max_transform_discrepancy <= tol_t,
            json!({"max": report.max_transform_discrepancy, "tol": tol_t})),
        Check::new("log_k_equals_half_plane_green", report.max_half_plane_discrepancy <= tol_h,
            json!({"max": report.max_half_plane_discrepancy, "tol": tol_h})),
        Check::new("example_i_2i", ex_err <= tol_h, json!({"g": ex.g, "error": ex_err})),
    ];
    let worst = json!({
        "max_transform_discrepancy": report.max_transform_discrepancy,
        "max_half_plane_discrepancy": report.max_half_plane_discrepancy,
    });
    Ok(SuiteOutcome::new("eq2", checks, worst, to_value(&report)?))
}

#[derive(Serialize)]
struct Lemma1Row {
    x: ComplexVector,
    y: ComplexVector,
    estimate: ExtReal,
    oracle: ExtReal,
    gap: f64,
    degree: usize,
}

fn lemma1(domain: ModelDomain, n: Option<usize>, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let n = n.unwrap_or(if domain == ModelDomain::Disc { 50 } else { 100 });
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let centered_pole = match &domain {
        ModelDomain::BanachBall { center, .. } => Some(center.clone()),
        _ => None,
    };
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let x = random_domain_point(&mut rng, &domain, 0.9);
        let y = centered_pole.clone().unwrap_or_else(|| random_domain_point(&mut rng, &domain, 0.9));
        if (&x - &y).norm() < 1e-3 {
            continue;
        }
        let oracle = domain.green_oracle(&x, &y)?.expect("pole chosen with a closed form");
        let r = minimize_disc_functional(&domain, &x, &y, &cfg.search)?;
        rows.push(Lemma1Row {
            gap: r.estimate.to_f64() - oracle.to_f64(),
            x,
            y,
            estimate: r.estimate,
            oracle,
            degree: r.witness.degree(),
        });
    }
    let tol = cfg.search.tol;
    let within = rows.iter().filter(|r| r.gap.abs() <= tol).count();
    let fraction = cfg.tolerance("lemma1_fraction", 0.95);
    let min_gap = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    let max_gap = rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
    let worst_row = rows.iter().max_by(|a, b| a.gap.abs().total_cmp(&b.gap.abs()));
    let checks = vec![
        Check::new("agreement_with_oracle", within as f64 >= fraction * n as f64,
            json!({"within_tol": within, "n": n, "tol": tol, "required_fraction": fraction})),
        Check::new("upper_bound_soundness", min_gap >= -1e-9, json!({"min_gap": min_gap})),
    ];
    let worst = json!({"max_abs_gap": max_gap, "pair": worst_row.map(|r| json!({"x": r.x, "y": r.y}))});
    Ok(SuiteOutcome::new("lemma1", checks, worst, json!({"domain": domain.short_name(), "pairs": rows})))
}

fn lemma2(n: usize, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut reports = Vec::with_capacity(n + 2);
    let i = TorusModulus::square();
    reports.push(lemma2_check(TorusModulus::new(Complex64::new(0.0, 2.0))?, i)?);
    reports.push(lemma2_check(TorusModulus::new(Complex64::new(0.0, 0.5))?, i)?);
    while reports.len() < n + 2 {
        let x = TorusModulus::random(&mut rng);
        let base = TorusModulus::random(&mut rng);
        if (x.value() - base.value()).norm() < 1e-9 {
            continue;
        }
        reports.push(lemma2_check(x, base)?);
    }
    let max = reports.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    let max_proj = reports.iter().map(|r| r.projection_error).fold(0.0, f64::max);
    let checks = vec![
        Check::new("g_equals_log_norm_of_extremal", reports.iter().all(|r| r.pass),
            json!({"max_discrepancy": max, "max_projection_error": max_proj, "tol": LEMMA2_TOL})),
    ];
    Ok(SuiteOutcome::new("lemma2", checks, json!({"max_discrepancy": max}), to_value(&reports)?))
}

fn theorem2(domain: ModelDomain, n: Option<usize>, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let n = n.unwrap_or(if domain == ModelDomain::Disc { 50 } else { 20 });
    let tol = cfg.tolerance("theorem2", THEOREM2_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<TangentVector> = (0..n)
        .map(|_| loop {
            let x = random_domain_point(&mut rng, &domain, 0.9);
            let xi = random_ball_point(&mut rng, domain.dim(), 1.0);
            if let Ok(v) = TangentVector::new(x, xi) {
                if v.direction.norm() > 1e-3 {
                    break v;
                }
            }
        })
        .collect();
    let report = theorem2_check(&domain, &samples, &cfg.limit(), &cfg.search, tol)?;
    let closed_err = report
        .samples
        .iter()
        .filter_map(|s| s.closed_form.map(|c| (s.azukawa - c).abs().max((s.kobayashi_royden - c).abs())))
        .fold(0.0, f64::max);
    let mut checks = vec![Check::new("azukawa_equals_kobayashi_royden", report.pass,
        json!({"max_discrepancy": report.max_discrepancy, "tol": tol}))];
    if report.samples.iter().any(|s| s.closed_form.is_some()) {
        checks.push(Check::new("closed_form", closed_err <= tol, json!({"max_error": closed_err, "tol": tol})));
    }
    let mut torus = Vec::new();
    for _ in 0..3 {
        let tau = TorusModulus::random(&mut rng);
        let xi = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let f = torus_finsler(tau, xi);
        let a = torus_azukawa(tau, xi, &cfg.limit())?.value;
        let k = torus_kobayashi_royden(tau, xi, &cfg.search)?.value;
        torus.push(json!({"tau": tau, "xi": xi, "finsler": f, "azukawa": a, "kobayashi_royden": k,
            "discrepancy": (a - f).abs().max((k - f).abs())}));
    }
    let torus_max = torus.iter().map(|t| t["discrepancy"].as_f64().unwrap()).fold(0.0, f64::max);
    checks.push(Check::new("torus_finsler_form", torus_max <= tol, json!({"max_discrepancy": torus_max})));
    let worst = json!({"max_discrepancy": report.max_discrepancy, "closed_form_error": closed_err,
        "torus_discrepancy": torus_max});
    Ok(SuiteOutcome::new("theorem2", checks, worst, json!({"report": report, "torus": torus})))
}

fn theorem3(n: usize, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ladder = [0.1, 0.01, 0.001];
    let mut reports = vec![
        theorem3_certificate_check(TorusBeltrami::new(Complex64::new(0.3, 0.0))?, TorusModulus::square(), &ladder)?,
        theorem3_certificate_check(TorusBeltrami::new(Complex64::new(0.3, 0.0))?, TorusModulus::square(), &[0.5])?,
    ];
    for _ in 0..n {
        let mu = Complex64::from_polar(rng.gen_range(0.01..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
        let base = TorusModulus::random(&mut rng);
        reports.push(theorem3_certificate_check(TorusBeltrami::new(mu)?, base, &ladder)?);
    }
    let max_ratio = reports.iter().map(|r| r.max_ratio_deviation).fold(0.0, f64::max);
    let max_second = reports.iter().map(|r| r.second_condition_discrepancy).fold(0.0, f64::max);
    let checks = vec![
        Check::new("ratio_ladder_converges_to_one", max_ratio <= THEOREM3_RATIO_TOL, json!({"max_deviation": max_ratio})),
        Check::new("certificate_at_mu0_equals_norm", reports.iter().all(|r| r.pass), json!({"max_discrepancy": max_second})),
    ];
    let worst = json!({"max_ratio_deviation": max_ratio, "max_second_condition": max_second});
    Ok(SuiteOutcome::new("theorem3", checks, worst, to_value(&reports)?))
}

fn corollary5(case: &str, n: usize, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let cases: Vec<&str> = if case == "all" {
        COROLLARY5_CASES.to_vec()
    } else if COROLLARY5_CASES.contains(&case) {
        vec![case]
    } else {
        return Err(Error::Parse(format!("unknown corollary5 case '{case}'")));
    };
    let q = &cfg.quadrature;
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    let mut worst = serde_json::Map::new();
    for c in cases {
        match c {
            "torus-constant" => {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let mut rows = Vec::new();
                let mut max_err = 0.0f64;
                let mut all_extremal = true;
                for _ in 0..n {
                    let mu = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
                    let tau = TorusModulus::random(&mut rng);
                    let rep = is_extremal(&BeltramiField::constant(mu)?, &QuadDiffBasis::torus_constant(tau), q, 1e-12)?;
                    let k = teich_distance(tau, canonical_projection(TorusBeltrami::new(mu)?, tau)).k;
                    let err = (rep.hk_value - mu.norm()).abs().max((k - mu.norm()).abs());
                    max_err = max_err.max(err);
                    all_extremal &= rep.verdict == Verdict::Extremal;
                    rows.push(json!({"mu": mu, "tau": tau, "hk_value": rep.hk_value, "teich_k": k, "error": err}));
                }
                checks.push(Check::new("torus_constant_hk_equals_norm", max_err <= 1e-12 && all_extremal,
                    json!({"max_error": max_err, "all_extremal": all_extremal})));
                worst.insert(c.into(), json!(max_err));
                data.insert(c.into(), json!(rows));
            }
            "torus-alternating" => {
                let tau = TorusModulus::square();
                let mu = BeltramiField::torus_alternating(0.3)?;
                let rep = is_extremal(&mu, &QuadDiffBasis::torus_constant(tau), q, 1e-6)?;
                let enriched = hk_functional(&mu, &QuadDiffBasis::monomials(3, BasisDomain::Torus(tau)), q)?;
                checks.push(Check::new("torus_alternating_below_half_sup",
                    rep.hk_value <= 0.5 * mu.sup_norm && rep.verdict == Verdict::NotExtremal,
                    json!({"hk_value": rep.hk_value, "sup_norm": mu.sup_norm, "verdict": rep.verdict})));
                checks.push(Check::new("torus_alternating_enriched_below_sup", enriched.value < mu.sup_norm,
                    json!({"hk_value": enriched.value})));
                worst.insert(c.into(), json!(rep.hk_value));
                data.insert(c.into(), json!({"constant_basis": rep, "enriched_basis": enriched}));
            }
            "disc-teichmuller" => {
                let mu = BeltramiField::constant(Complex64::new(0.4, 0.0))?;
                let rep = is_extremal(&mu, &QuadDiffBasis::monomials(6, BasisDomain::Disc), q, 1e-6)?;
                checks.push(Check::new("disc_teichmuller_extremal", rep.verdict == Verdict::Extremal,
                    json!({"hk_value": rep.hk_value, "gap": mu.sup_norm - rep.hk_value})));
                worst.insert(c.into(), json!(mu.sup_norm - rep.hk_value));
                data.insert(c.into(), to_value(&rep)?);
            }
            "disc-angular4" => {
                let mu = BeltramiField::angular4(0.4)?;
                let rep = is_extremal(&mu, &QuadDiffBasis::monomials(6, BasisDomain::Disc), q, 1e-6)?;
                checks.push(Check::new("disc_angular4_not_extremal",
                    rep.verdict == Verdict::NotExtremal && rep.provisional && rep.hk_value < mu.sup_norm,
                    json!({"hk_value": rep.hk_value, "verdict": rep.verdict, "provisional": rep.provisional})));
                worst.insert(c.into(), json!(rep.hk_value));
                data.insert(c.into(), to_value(&rep)?);
            }
            _ => unreachable!(),
        }
    }
    Ok(SuiteOutcome::new("corollary5", checks, Value::Object(worst), Value::Object(data)))
}

fn psh(n: usize, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    let mut worst = serde_json::Map::new();

    let models = [ModelDomain::Disc, ModelDomain::EuclideanBall { dim: 2 }, ModelDomain::Polydisc { dim: 2 }];
    for domain in &models {
        let fd = FieldDomain::Model(domain.clone());
        let mut failures = 0;
        let mut worst_margin = f64::NEG_INFINITY;
        for _ in 0..n {
            let pole = random_domain_point(&mut rng, domain, 0.8);
            let (x, xi, r) = random_submean_triple(&mut rng, &fd, &pole, 0.9);
            let u = ScalarField::green(domain.clone(), pole)?;
            let res = submean_check(&u, &x, &xi, r, 64)?;
            failures += usize::from(!res.pass);
            if let (ExtReal::Finite(l), ExtReal::Finite(m)) = (res.lhs, res.rhs) {
                worst_margin = worst_margin.max(l - m);
            }
        }
        let name = format!("submean_{}", domain.short_name());
        checks.push(Check::new(&name, failures == 0, json!({"n": n, "failures": failures, "max_lhs_minus_rhs": worst_margin})));
        worst.insert(name, json!(worst_margin));
    }

    // Torus: log k(., y) is harmonic off the pole.
    let mut failures = 0;
    let mut harmonic_defect = 0.0f64;
    for _ in 0..n {
        let pole = TorusModulus::random(&mut rng);
        let p = ComplexVector::scalar(pole.value());
        let (x, xi, r) = random_submean_triple(&mut rng, &FieldDomain::TeichTorus, &p, 0.9);
        let res = submean_check(&ScalarField::teich_green(pole), &x, &xi, r, 64)?;
        failures += usize::from(!res.pass);
        if (x[0] - pole.value()).norm() > 1.5 * r * xi.norm() {
            harmonic_defect = harmonic_defect.max(res.lhs.abs_diff(res.rhs));
        }
    }
    checks.push(Check::new("submean_teich_torus", failures == 0, json!({"n": n, "failures": failures})));
    checks.push(Check::new("teich_green_harmonic_off_pole", harmonic_defect <= SUBMEAN_TOL,
        json!({"max_defect": harmonic_defect, "tol": SUBMEAN_TOL})));
    worst.insert("teich_harmonic_defect".into(), json!(harmonic_defect));

    // Negative control: -|z|^2 at the origin.
    for domain in &models {
        let fd = FieldDomain::Model(domain.clone());
        let x = ComplexVector::zeros(domain.dim());
        let mut xi = ComplexVector::zeros(domain.dim());
        xi[0] = Complex64::new(1.0, 0.0);
        let res = submean_check(&ScalarField::negative_square_norm(fd), &x, &xi, 0.5, 64)?;
        checks.push(Check::new(format!("control_neg_square_norm_{}_fails", domain.short_name()), !res.pass,
            json!({"lhs": res.lhs, "rhs": res.rhs})));
    }

    // Holomorphic contraction.
    let disc = GreenFunction::oracle(ModelDomain::Disc);
    let ball = GreenFunction::oracle(ModelDomain::EuclideanBall { dim: 2 });
    let pairs: Vec<(ComplexVector, ComplexVector)> =
        (0..50).map(|_| (random_ball_point(&mut rng, 1, 0.95), random_ball_point(&mut rng, 1, 0.95))).collect();
    let emb = contraction_check(&disc, &ball, &HolomorphicMap::CoordinateEmbedding { dim: 2, index: 0 }, &pairs)?;
    checks.push(Check::new("contraction_embedding_isometric", emb.pass && emb.max_abs_difference <= 1e-9,
        json!({"max_abs_difference": emb.max_abs_difference})));
    let konst = contraction_check(&disc, &ball, &HolomorphicMap::Constant(ComplexVector::from_reals(&[0.2, 0.1])), &pairs)?;
    checks.push(Check::new("contraction_constant_map_skipped", konst.pass && konst.skipped == pairs.len(),
        json!({"skipped": konst.skipped})));
    let sq = contraction_check(&disc, &disc, &HolomorphicMap::Square, &pairs)?;
    checks.push(Check::new("contraction_square_map", sq.pass, json!({"worst_excess": sq.worst_excess})));
    let mob = contraction_check(&disc, &disc, &HolomorphicMap::Mobius { theta: 1.1, center: Complex64::new(-0.3, 0.5) }, &pairs)?;
    checks.push(Check::new("contraction_mobius_isometric", mob.pass && mob.max_abs_difference <= 1e-9,
        json!({"max_abs_difference": mob.max_abs_difference})));
    let twice = GreenFunction::new("twice_green_disc", ModelDomain::Disc, |x, y| {
        Ok(match ModelDomain::Disc.green_oracle(x, y)? {
            Some(ExtReal::Finite(v)) => ExtReal::Finite(2.0 * v),
            Some(g) => g,
            None => unreachable!(),
        })
    });
    let ctrl = contraction_check(&twice, &disc, &HolomorphicMap::Square, &pairs)?;
    checks.push(Check::new("control_wrong_source_green_fails", !ctrl.pass, json!({"worst_excess": ctrl.worst_excess})));

    // Symmetry.
    let mut sym = 0.0f64;
    for _ in 0..n {
        let (x, y) = (TorusModulus::random(&mut rng), TorusModulus::random(&mut rng));
        sym = sym.max(teich_green(x, y).abs_diff(teich_green(y, x)));
    }
    checks.push(Check::new("symmetry_teich_torus", sym <= 1e-14, json!({"max_asymmetry": sym})));
    worst.insert("teich_asymmetry".into(), json!(sym));

    let ball_domain = ModelDomain::EuclideanBall { dim: 2 };
    let mut est_rows = Vec::new();
    let mut est_ok = true;
    for _ in 0..3 {
        let x = random_ball_point(&mut rng, 2, 0.8);
        let y = random_ball_point(&mut rng, 2, 0.8);
        let oracle = ball_domain.green_oracle(&x, &y)?.unwrap().to_f64();
        let exy = minimize_disc_functional(&ball_domain, &x, &y, &cfg.search)?.estimate.to_f64();
        let eyx = minimize_disc_functional(&ball_domain, &y, &x, &cfg.search)?.estimate.to_f64();
        let gap = (exy - oracle).abs().max((eyx - oracle).abs());
        let asym = (exy - eyx).abs();
        est_ok &= asym <= 2.0 * gap + f64::EPSILON;
        est_rows.push(json!({"x": x, "y": y, "estimate_xy": exy, "estimate_yx": eyx, "gap": gap, "asymmetry": asym}));
    }
    checks.push(Check::new("symmetry_estimator_within_twice_gap", est_ok, json!(est_rows)));

    Ok(SuiteOutcome::new("psh", checks, Value::Object(worst), Value::Null))
}

fn hyperconvex(n: usize, cfg: &RunConfig) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    let mut tails = serde_json::Map::new();
    let models = [ModelDomain::Disc, ModelDomain::EuclideanBall { dim: 2 }, ModelDomain::Polydisc { dim: 2 }];
    for domain in &models {
        let mut ok = true;
        let mut worst_tail = 0.0f64;
        for _ in 0..n {
            let pole = random_domain_point(&mut rng, domain, 0.8);
            let dir = random_ball_point(&mut rng, domain.dim(), 1.0);
            let u = ScalarField::green(domain.clone(), pole.clone())?;
            let r = hyperconvexity_probe(&u, &pole, &dir, 32)?;
            ok &= r.pass;
            worst_tail = worst_tail.max(r.tail.to_f64().abs());
        }
        let name = format!("hyperconvex_{}", domain.short_name());
        checks.push(Check::new(&name, ok, json!({"rays": n, "worst_tail": worst_tail})));
        tails.insert(name, json!(worst_tail));
    }
    let mut ok = true;
    let mut worst_tail = 0.0f64;
    for k in 0..n {
        let pole = TorusModulus::random(&mut rng);
        // Alternate rays toward the real axis and toward infinity.
        let im = if k % 2 == 0 { -rng.gen_range(0.2..1.0) } else { rng.gen_range(0.2..1.0) };
        let dir = ComplexVector::scalar(Complex64::new(rng.gen_range(-1.0..1.0), im));
        let r = hyperconvexity_probe(&ScalarField::teich_green(pole), &ComplexVector::scalar(pole.value()), &dir, 32)?;
        ok &= r.pass;
        worst_tail = worst_tail.max(r.tail.to_f64().abs());
    }
    checks.push(Check::new("hyperconvex_teich_torus", ok, json!({"rays": n, "worst_tail": worst_tail})));
    tails.insert("hyperconvex_teich_torus".into(), json!(worst_tail));

    let c = ScalarField::constant(FieldDomain::Model(ModelDomain::Disc), -1.0);
    let r = hyperconvexity_probe(&c, &ComplexVector::zeros(1), &ComplexVector::from_reals(&[1.0]), 32)?;
    checks.push(Check::new("control_constant_field_fails", !r.pass, json!({"tail": r.tail})));
    let sup = ModelDomain::BanachBall { norm: NormKind::Sup, center: ComplexVector::zeros(2), radius: 1.0 };
    let u = ScalarField::green(sup.clone(), ComplexVector::zeros(2))?;
    let r = hyperconvexity_probe(&u, &ComplexVector::zeros(2), &ComplexVector::from_reals(&[0.3, 1.0]), 32)?;
    checks.push(Check::new("hyperconvex_sup_ball_centered", r.pass, json!({"tail": r.tail})));
    Ok(SuiteOutcome::new("hyperconvex", checks, Value::Object(tails), Value::Null))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        let cfg = RunConfig::default();
        for s in ["eq2", "lemma2", "theorem3"] {
            let out = run(s, &VerifyOptions::default(), &cfg).unwrap();
            assert!(out[0].pass, "{s}: {:?}", out[0].checks);
        }
        let out = run("hyperconvex", &VerifyOptions { n: Some(4), ..Default::default() }, &cfg).unwrap();
        assert!(out[0].pass, "{:?}", out[0].checks);
    }

    #[test]
    fn unknown_names_rejected() {
        let cfg = RunConfig::default();
        assert!(matches!(run("nope", &VerifyOptions::default(), &cfg), Err(Error::Parse(_))));
        let o = VerifyOptions { case: Some("nope".into()), ..Default::default() };
        assert!(matches!(run("corollary5", &o, &cfg), Err(Error::Parse(_))));
    }

    #[test]
    fn random_points_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let domains = [
            ModelDomain::Disc,
            ModelDomain::EuclideanBall { dim: 3 },
            ModelDomain::Polydisc { dim: 2 },
            ModelDomain::BanachBall { norm: NormKind::L1, center: ComplexVector::from_reals(&[0.5, 0.0]), radius: 2.0 },
        ];
        for d in &domains {
            for _ in 0..100 {
                let p = random_domain_point(&mut rng, d, 0.9);
                assert!(d.defining_norm(&p) < 0.9);
            }
        }
    }
}
