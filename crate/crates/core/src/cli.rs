//! Command-line front end shared by the `green-teich` binary and the tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig, CONFIG_ENV};
use crate::disc_functional::minimize_disc_functional;
use crate::domains::ModelDomain;
use crate::error::{Error, Result};
use crate::extremality::{is_extremal, BasisDomain, BeltramiField, QuadDiffBasis, Verdict};
use crate::metrics::{
    azukawa, ball_metric_closed_form, kobayashi_royden, torus_azukawa, torus_finsler, torus_kobayashi_royden,
    TangentVector,
};
use crate::report::{to_value, Report};
use crate::teich::{smoothness_probe, teich_distance, TorusModulus};
use crate::vector::{parse_complex, ComplexVector};
use crate::verify::{self, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "green-teich", version, about = "Green functions, invariant metrics and Teichmüller distances")]
pub struct Cli {
    /// Flat `key = value` config file (default: $GREEN_TEICH_CONFIG).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Config override `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pluricomplex Green function g(x, y).
    Green(PairArgs),
    /// Teichmüller distance and Green function on the torus moduli space.
    Teich(TeichArgs),
    /// Azukawa metric by the Green-function ladder.
    Azukawa(MetricArgs),
    /// Kobayashi–Royden metric by extremal-disc search.
    Kobayashi(MetricArgs),
    /// Full disc-functional search with witness and stages.
    DiscSearch(PairArgs),
    /// Hamilton–Krushkal extremality test for a Beltrami field.
    Extremal(ExtremalArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Finite-difference derivatives of the torus distance.
    SmoothnessProbe(SmoothnessArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    #[arg(long, default_value = "disc")]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    /// Use the disc-functional estimator even when a closed form exists.
    #[arg(long)]
    pub estimate: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct TeichArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub tau2: String,
}

#[derive(Debug, Args, Serialize)]
pub struct MetricArgs {
    #[arg(long, default_value = "disc", conflicts_with = "torus")]
    pub domain: String,
    /// Work on the torus moduli space; `--x` is then a modulus tau.
    #[arg(long)]
    pub torus: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Alternating,
    Teichmuller,
    Angular4,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtremalArgs {
    #[arg(long, conflicts_with = "disc", required_unless_present = "disc")]
    pub torus: bool,
    #[arg(long)]
    pub disc: bool,
    /// Constant coefficient.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "pattern")]
    pub mu: Option<String>,
    #[arg(long, value_enum)]
    pub pattern: Option<Pattern>,
    #[arg(long, default_value_t = 0.4)]
    pub k: f64,
    /// Torus modulus.
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    pub tau: String,
    /// Monomial basis degree; on the torus the default is the constant basis.
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// eq2, lemma1, lemma2, theorem2, theorem3, corollary5, psh, hyperconvex or all.
    pub suite: String,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub case: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SmoothnessArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub tau1: String,
    #[arg(long, allow_hyphen_values = true)]
    pub tau2: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub direction: String,
    #[arg(long, default_value_t = 1e-2)]
    pub h0: f64,
    #[arg(long, default_value_t = 8)]
    pub rungs: usize,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoAdmissibleDisc(_) => 1,
        Error::Parse(_) | Error::InvalidInput(_) | Error::DegenerateBasis(_) => 2,
        Error::DomainViolation(_) | Error::LadderExitsDomain(_) | Error::DegenerateDisc => 3,
    }
}

/// Defaults, then the config file, then `--seed`, `--format` and `--set`.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let path = cli.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(p) = path {
        cfg.apply_file(&p)?;
    }
    if let Some(s) = cli.seed {
        cfg.set("seed", &s.to_string())?;
    }
    if let Some(f) = &cli.format {
        cfg.set("format", f)?;
    }
    for o in &cli.overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| Error::Parse(format!("--set expects key=value, got {o:?}")))?;
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs a parsed command and returns the report. Per-check verify lines go to
/// `diag`.
pub fn execute(cli: &Cli, cfg: &RunConfig, diag: &mut dyn Write) -> Result<Report> {
    let echo = |args: &dyn echo::Echo| args.echo(cfg);
    match &cli.command {
        Command::Green(a) => green(a, cfg, echo(a)?),
        Command::DiscSearch(a) => disc_search(a, cfg, echo(a)?),
        Command::Teich(a) => teich(a, echo(a)?),
        Command::Azukawa(a) => metric(a, cfg, echo(a)?, true),
        Command::Kobayashi(a) => metric(a, cfg, echo(a)?, false),
        Command::Extremal(a) => extremal(a, cfg, echo(a)?),
        Command::Verify(a) => run_verify(a, cfg, echo(a)?, diag),
        Command::SmoothnessProbe(a) => smoothness(a, echo(a)?),
    }
}

mod echo {
    use super::*;

    /// `{"run": <resolved config>, "args": <subcommand flags>}`.
    pub trait Echo {
        fn echo(&self, cfg: &RunConfig) -> Result<Value>;
    }

    impl<T: Serialize> Echo for T {
        fn echo(&self, cfg: &RunConfig) -> Result<Value> {
            Ok(json!({"run": to_value(cfg)?, "args": to_value(self)?}))
        }
    }
}

/// Full entry point: parses `args`, writes the report to `out`, diagnostics to
/// `diag`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, diag: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { diag } else { out };
            let _ = write!(sink, "{e}");
            return e.exit_code();
        }
    };
    let started = Instant::now();
    let outcome = resolve_config(&cli).and_then(|cfg| execute(&cli, &cfg, diag).map(|r| (r, cfg.format)));
    let code = match outcome {
        Ok((report, format)) => {
            let text = match format {
                OutputFormat::Json => report.to_json() + "\n",
                OutputFormat::Csv => report.to_csv(),
            };
            let _ = out.write_all(text.as_bytes());
            if report.pass { 0 } else { 1 }
        }
        Err(e) => {
            let _ = writeln!(diag, "error: {e}");
            exit_code(&e)
        }
    };
    let _ = writeln!(diag, "elapsed_seconds (non-deterministic): {:.3}", started.elapsed().as_secs_f64());
    code
}

fn parse_tau(s: &str) -> Result<TorusModulus> {
    TorusModulus::new(parse_complex(s)?)
}

fn parse_point(domain: &ModelDomain, s: &str) -> Result<ComplexVector> {
    ComplexVector::parse_with_dim(s, domain.dim())
}

fn green(a: &PairArgs, cfg: &RunConfig, echo: Value) -> Result<Report> {
    let domain: ModelDomain = a.domain.parse()?;
    let x = parse_point(&domain, &a.x)?;
    let y = parse_point(&domain, &a.y)?;
    domain.require_inside(&x)?;
    domain.require_inside(&y)?;
    let oracle = domain.green_oracle(&x, &y)?;
    let results = match (oracle, a.estimate) {
        (Some(g), false) => json!({"value": g, "method": "oracle"}),
        (oracle, _) => {
            let r = minimize_disc_functional(&domain, &x, &y, &cfg.search)?;
            let mut v = json!({"value": r.estimate, "method": "estimator", "witness": r.witness});
            if let Some(g) = oracle {
                v["oracle"] = to_value(g)?;
                v["gap"] = json!(r.estimate.to_f64() - g.to_f64());
            }
            v
        }
    };
    Report::new("green", echo, results, true)
}

fn disc_search(a: &PairArgs, cfg: &RunConfig, echo: Value) -> Result<Report> {
    let domain: ModelDomain = a.domain.parse()?;
    let x = parse_point(&domain, &a.x)?;
    let y = parse_point(&domain, &a.y)?;
    let r = minimize_disc_functional(&domain, &x, &y, &cfg.search)?;
    let oracle = domain.green_oracle(&x, &y)?;
    let gap = oracle.map(|g| r.estimate.to_f64() - g.to_f64());
    let results = json!({"search": r, "oracle": oracle, "gap": gap});
    Report::new("disc-search", echo, results, true)?.with_worst_case(json!({"gap": gap}))
}

fn teich(a: &TeichArgs, echo: Value) -> Result<Report> {
    let x = parse_tau(&a.tau1)?;
    let y = parse_tau(&a.tau2)?;
    Report::new("teich", echo, teich_distance(x, y), true)
}

fn metric(a: &MetricArgs, cfg: &RunConfig, echo: Value, azukawa_metric: bool) -> Result<Report> {
    let command = if azukawa_metric { "azukawa" } else { "kobayashi" };
    if a.torus {
        let tau = parse_tau(&a.x)?;
        let xi = parse_complex(&a.xi)?;
        let finsler = torus_finsler(tau, xi);
        let (value, detail) = if azukawa_metric {
            let r = torus_azukawa(tau, xi, &cfg.limit())?;
            (r.value, to_value(&r)?)
        } else {
            let r = torus_kobayashi_royden(tau, xi, &cfg.search)?;
            (r.value, to_value(&r)?)
        };
        let results = json!({"value": value, "finsler": finsler, "difference": value - finsler, "detail": detail});
        return Report::new(command, echo, results, true);
    }
    let domain: ModelDomain = a.domain.parse()?;
    let v = TangentVector::new(parse_point(&domain, &a.x)?, parse_point(&domain, &a.xi)?)?;
    let (value, detail) = if azukawa_metric {
        let r = azukawa(&domain, &v, &cfg.limit())?;
        (r.value, to_value(&r)?)
    } else {
        let r = kobayashi_royden(&domain, &v, &cfg.search)?;
        (r.value, to_value(&r)?)
    };
    let closed = matches!(domain, ModelDomain::Disc | ModelDomain::EuclideanBall { .. }).then(|| ball_metric_closed_form(&v));
    let results = json!({"value": value, "closed_form": closed, "detail": detail});
    Report::new(command, echo, results, true)
}

fn extremal(a: &ExtremalArgs, cfg: &RunConfig, echo: Value) -> Result<Report> {
    let mu = a.mu.as_deref().map(parse_complex).transpose()?;
    let (field, basis, default_tol) = if a.torus {
        let tau = parse_tau(&a.tau)?;
        let field = match (mu, a.pattern) {
            (Some(m), _) => BeltramiField::constant(m)?,
            (None, Some(Pattern::Alternating)) => BeltramiField::torus_alternating(a.k)?,
            (None, Some(p)) => return Err(Error::invalid(format!("pattern {p:?} is a disc pattern"))),
            (None, None) => return Err(Error::invalid("give --mu or --pattern")),
        };
        let basis = match a.degree {
            Some(d) => QuadDiffBasis::monomials(d, BasisDomain::Torus(tau)),
            None => QuadDiffBasis::torus_constant(tau),
        };
        (field, basis, 1e-12)
    } else {
        let field = match (mu, a.pattern) {
            (Some(m), _) => BeltramiField::constant(m)?,
            (None, Some(Pattern::Teichmuller)) => BeltramiField::constant(Complex64::new(a.k, 0.0))?,
            (None, Some(Pattern::Angular4)) => BeltramiField::angular4(a.k)?,
            (None, Some(Pattern::Alternating)) => return Err(Error::invalid("alternating is a torus pattern")),
            (None, None) => return Err(Error::invalid("give --mu or --pattern")),
        };
        (field, QuadDiffBasis::monomials(a.degree.unwrap_or(6), BasisDomain::Disc), 1e-6)
    };
    let tol = a.tol.unwrap_or_else(|| cfg.tolerance("extremal", default_tol));
    let report = is_extremal(&field, &basis, &cfg.quadrature, tol)?;
    let worst = json!({"sup_minus_hk": report.sup_norm - report.hk_value});
    let pass = report.verdict != Verdict::Inconclusive;
    Report::new("extremal", echo, report, pass)?.with_worst_case(worst)
}

fn run_verify(a: &VerifyArgs, cfg: &RunConfig, echo: Value, diag: &mut dyn Write) -> Result<Report> {
    let opts = VerifyOptions {
        n: a.n,
        domain: a.domain.as_deref().map(str::parse).transpose()?,
        case: a.case.clone(),
    };
    let outcomes = verify::run(&a.suite, &opts, cfg)?;
    for o in &outcomes {
        for c in &o.checks {
            let _ = writeln!(diag, "{} {}/{}", if c.pass { "PASS" } else { "FAIL" }, o.suite, c.name);
        }
    }
    let pass = outcomes.iter().all(|o| o.pass);
    let worst: serde_json::Map<String, Value> = outcomes.iter().map(|o| (o.suite.clone(), o.worst_case.clone())).collect();
    Report::new("verify", echo, &outcomes, pass)?.with_worst_case(Value::Object(worst))
}

fn smoothness(a: &SmoothnessArgs, echo: Value) -> Result<Report> {
    let x = parse_tau(&a.tau1)?;
    let y = parse_tau(&a.tau2)?;
    let dir = parse_complex(&a.direction)?;
    let rungs = smoothness_probe(x, y, dir, a.h0, a.rungs)?;
    Report::new("smoothness-probe", echo, json!({"rungs": rungs, "diagnostic_only": true}), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["green-teich"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn green_oracle_value() {
        let (code, out) = call(&["green", "--domain", "disc", "--x", "0", "--y", "0.5"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["results"]["value"].as_f64().unwrap() + 2f64.ln()).abs() < 1e-15);
        assert_eq!(v["results"]["method"], "oracle");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["green", "--domain", "disc", "--x", "2", "--y", "0"]).0, 3);
        assert_eq!(call(&["green", "--domain", "disk", "--x", "0", "--y", "0"]).0, 2);
        assert_eq!(call(&["teich", "--tau1", "-i", "--tau2", "i"]).0, 3);
        assert_eq!(call(&["teich", "--tau1", "x", "--tau2", "i"]).0, 2);
        assert_eq!(call(&["--set", "bogus=1", "teich", "--tau1", "i", "--tau2", "i"]).0, 2);
        assert_eq!(call(&["extremal", "--torus", "--mu", "1.2"]).0, 3);
        assert_eq!(call(&["verify", "nope"]).0, 2);
    }

    #[test]
    fn teich_example_and_csv() {
        let (code, out) = call(&["teich", "--tau1", "i", "--tau2", "2i"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["results"]["k"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let (_, csv) = call(&["--format", "csv", "teich", "--tau1", "i", "--tau2", "i"]);
        assert!(csv.contains("results.g,-inf\n"));
    }

    #[test]
    fn torus_extremal() {
        let (code, out) = call(&["extremal", "--torus", "--mu", "0.3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["verdict"], "extremal");
        assert!((v["results"]["hk_value"].as_f64().unwrap() - 0.3).abs() < 1e-12);
        let (code, out) = call(&["extremal", "--torus", "--mu", "0"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["verdict"], "extremal");
    }
}
