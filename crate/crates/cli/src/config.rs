//! Per-subcommand configuration documents and their flag overrides.

use std::path::Path;

use anosov_trace::config::DEFAULT_SEED;
use anosov_trace::torus::DEFAULT_ENUMERATION_BUDGET;
use anosov_trace::FieldConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn cat() -> Vec<Vec<i64>> {
    vec![vec![2, 1], vec![1, 1]]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitsConfig {
    pub matrix: Vec<Vec<i64>>,
    pub n: u32,
    pub budget: u64,
}

impl Default for OrbitsConfig {
    fn default() -> Self {
        Self { matrix: cat(), n: 6, budget: DEFAULT_ENUMERATION_BUDGET }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldCommandConfig {
    pub matrix: Vec<Vec<i64>>,
    /// Period whose lattice receives the sampled values.
    pub n: u32,
    pub seed: u64,
    /// Sample this band alone instead of the assembled roof.
    pub band: Option<u32>,
    pub budget: u64,
    pub field: FieldConfig,
}

impl Default for FieldCommandConfig {
    fn default() -> Self {
        Self { matrix: cat(), n: 6, seed: DEFAULT_SEED, band: None, budget: DEFAULT_ENUMERATION_BUDGET, field: FieldConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceConfig {
    pub matrix: Vec<Vec<i64>>,
    pub n: u32,
    pub seed: u64,
    pub c: f64,
    /// Explicit frequency; the regime value for `c` when absent.
    pub xi: Option<f64>,
    pub budget: u64,
    pub field: FieldConfig,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            matrix: cat(),
            n: 8,
            seed: DEFAULT_SEED,
            c: 0.9,
            xi: None,
            budget: DEFAULT_ENUMERATION_BUDGET,
            field: FieldConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PressureConfig {
    pub matrix: Vec<Vec<i64>>,
    pub betas: Vec<f64>,
    pub periods: Vec<u32>,
    pub budget: u64,
}

impl Default for PressureConfig {
    fn default() -> Self {
        Self { matrix: cat(), betas: vec![0.5, 1.0, 2.0, 4.0], periods: (1..=12).collect(), budget: DEFAULT_ENUMERATION_BUDGET }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegimeConfig {
    pub matrix: Vec<Vec<i64>>,
    pub alpha: f64,
    pub c: f64,
    pub periods: Vec<u32>,
    /// Report the largest admissible period at this frequency.
    pub xi: Option<f64>,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self { matrix: cat(), alpha: 1.25, c: 0.9, periods: (1..=12).collect(), xi: None }
    }
}

/// Reads a TOML (default) or JSON (`.json`) document; no file means all defaults.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config("ConfigRead", format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| CliError::config("ConfigParse", format!("{}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| CliError::config("ConfigParse", format!("{}: {e}", path.display())))
    }
}

/// `"2,1;1,1"` → `[[2,1],[1,1]]`.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>, String> {
    s.split(';')
        .map(|row| row.split(',').map(|v| v.trim().parse::<i64>().map_err(|e| format!("{v:?}: {e}"))).collect())
        .collect()
}

/// `"1..12"` (inclusive) or `"2,4,8"`.
pub fn parse_periods(s: &str) -> Result<Vec<u32>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{b:?}: {e}"))?;
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"))).collect()
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"))).collect()
}

/// Scalar overrides shared by the field-carrying subcommands.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct FieldFlags {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda_tilde: Option<f64>,
    #[arg(long)]
    pub j_max: Option<u32>,
    #[arg(long)]
    pub basis_size: Option<usize>,
}

impl FieldFlags {
    pub fn apply(&self, f: &mut FieldConfig) {
        if let Some(v) = self.alpha {
            f.alpha = v;
        }
        if let Some(v) = self.epsilon {
            f.epsilon = v;
        }
        if let Some(v) = self.gamma {
            f.gamma = v;
        }
        if let Some(v) = self.lambda_tilde {
            f.lambda_tilde = Some(v);
        }
        if let Some(v) = self.j_max {
            f.j_max = Some(v);
        }
        if let Some(v) = self.basis_size {
            f.basis_size = Some(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anosov_trace::ExperimentConfig;

    #[test]
    fn parsers() {
        assert_eq!(parse_matrix("2,1;1,1").unwrap(), cat());
        assert!(parse_matrix("2,x;1,1").is_err());
        assert_eq!(parse_periods("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_periods("3..=5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_periods("2, 8").unwrap(), vec![2, 8]);
        assert_eq!(parse_list("0.5,1").unwrap(), vec![0.5, 1.0]);
        assert_eq!(parse_list("").unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn toml_documents() {
        let c: TraceConfig = toml::from_str("n = 5\nxi = 10.0\n[field]\nepsilon = 0.25\n").unwrap();
        assert_eq!((c.n, c.xi, c.field.epsilon), (5, Some(10.0), 0.25));
        let e: ExperimentConfig = toml::from_str("trials = 200\n[cf_grid]\nmu = [0.0, 1.0]\nnu = [0.5]\n").unwrap();
        assert_eq!(e.cf_grid.points().count(), 2);
        assert!(toml::from_str::<OrbitsConfig>("m = 3").is_err());
    }
}
