//! Run configuration: defaults, then a flat `key = value` file, then
//! command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::disc_functional::SearchConfig;
use crate::error::{Error, Result};
use crate::extremality::QuadratureConfig;
use crate::metrics::LimitConfig;

pub const CONFIG_ENV: &str = "GREEN_TEICH_CONFIG";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub format: OutputFormat,
    pub search: SearchConfig,
    pub limit: LimitConfig,
    pub quadrature: QuadratureConfig,
    /// Named tolerances (`tol.<name> = value`), consulted by the verify suites.
    pub tolerances: BTreeMap<String, f64>,
}

impl RunConfig {
    /// Azukawa ladder settings; the estimator fallback uses `search`.
    pub fn limit(&self) -> LimitConfig {
        LimitConfig { search: self.search.clone(), ..self.limit.clone() }
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        let bad = |e: String| Error::Parse(format!("config key '{key}': {e}"));
        let float = || value.parse::<f64>().map_err(|e| bad(e.to_string()));
        let int = || value.parse::<usize>().map_err(|e| bad(e.to_string()));
        match key {
            "seed" => {
                let s = value.parse::<u64>().map_err(|e| bad(e.to_string()))?;
                self.seed = s;
                self.search.seed = s;
                self.quadrature.seed = s;
            }
            "format" => self.format = value.parse()?,
            "max_degree" => self.search.max_degree = int()?,
            "n_starts" => self.search.n_starts = int()?,
            "n_boundary_samples" => self.search.n_boundary_samples = int()?,
            "margin" => self.search.margin = float()?,
            "tol" => self.search.tol = float()?,
            "max_evals" => self.search.max_evals = int()?,
            "lambda0" => self.limit.lambda0 = float()?,
            "rungs" => self.limit.rungs = int()?,
            "limit_tol" => self.limit.tol = float()?,
            "quad_n_u" => self.quadrature.n_u = int()?,
            "quad_n_v" => self.quadrature.n_v = int()?,
            "radial_grading" => self.quadrature.radial_grading = float()?,
            "gap_bound" => self.quadrature.gap_bound = float()?,
            "quad_n_starts" => self.quadrature.n_starts = int()?,
            "quad_max_evals" => self.quadrature.max_evals = int()?,
            k if k.starts_with("tol.") => {
                let v = float()?;
                if !(v > 0.0) {
                    return Err(bad("tolerances must be positive".into()));
                }
                self.tolerances.insert(k["tol.".len()..].to_string(), v);
            }
            _ => return Err(Error::Parse(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config file {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.search.validate()?;
        self.limit().validate()?;
        self.quadrature.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_file() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nseed = 7\nmax_degree=2 # inline\n\nformat = csv\ntol.eq2 = 1e-12\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.search.seed, 7);
        assert_eq!(c.quadrature.seed, 7);
        assert_eq!(c.search.max_degree, 2);
        assert_eq!(c.limit().search.max_degree, 2);
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.tolerance("eq2", 1.0), 1e-12);
        assert_eq!(c.tolerance("other", 0.5), 0.5);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_text("nonsense"), Err(Error::Parse(_))));
        assert!(matches!(c.apply_text("colour = red"), Err(Error::Parse(_))));
        assert!(matches!(c.apply_text("seed = -1"), Err(Error::Parse(_))));
        assert!(matches!(c.apply_text("tol.x = 0"), Err(Error::Parse(_))));
        let mut c = RunConfig::default();
        c.apply_text("n_boundary_samples = 10").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.seed, 0);
        assert_eq!(c.format, OutputFormat::Json);
        c.validate().unwrap();
    }
}
