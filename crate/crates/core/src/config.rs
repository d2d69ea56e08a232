//! Structured configuration shared by the harness and the command line.
//!
//! Every field has a default, so an empty document describes the desk-scale
//! cat-map experiment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{CoefficientSchedule, FieldSpec, FieldSpecParams, FourierPolynomial, FourierTerm, DEFAULT_MODE_CAP};
use crate::torus::{ToralAutomorphism, DEFAULT_ENUMERATION_BUDGET};

pub const DEFAULT_SEED: u64 = 2_718_281_828;

fn default_matrix() -> Vec<Vec<i64>> {
    vec![vec![2, 1], vec![1, 1]]
}

/// Random roof parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub alpha: f64,
    pub c0: f64,
    pub epsilon: f64,
    pub gamma: f64,
    /// Absolute `Λ̃`; when absent `lambda_tilde_ratio · Λ` is used.
    pub lambda_tilde: Option<f64>,
    pub lambda_tilde_ratio: f64,
    /// Highest band; defaults to `n + 4`.
    pub j_max: Option<u32>,
    /// `τ₀` terms; defaults to `cos(2π x₁)`.
    pub tau0: Option<Vec<FourierTerm>>,
    /// Basis size; defaults to the support of band `j_max`.
    pub basis_size: Option<usize>,
    pub mode_cap: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            alpha: 1.25,
            c0: 1.0,
            epsilon: 1.0,
            gamma: 0.1,
            lambda_tilde: None,
            lambda_tilde_ratio: 1.05,
            j_max: None,
            tau0: None,
            basis_size: None,
            mode_cap: DEFAULT_MODE_CAP,
        }
    }
}

impl FieldConfig {
    pub fn resolved_lambda_tilde(&self, map: &ToralAutomorphism) -> f64 {
        self.lambda_tilde.unwrap_or(self.lambda_tilde_ratio * map.lambda())
    }

    pub fn resolved_j_max(&self, n: u32) -> u32 {
        self.j_max.unwrap_or(n + 4)
    }

    /// Field spec for trace period `n`, with band cap overridden by `j_max` when given.
    pub fn to_spec(&self, map: &ToralAutomorphism, n: u32, j_max: Option<u32>) -> Result<FieldSpec> {
        let d = map.dimension();
        let tau0 = match &self.tau0 {
            None => FourierPolynomial::first_axis_cosine(d),
            Some(terms) => FourierPolynomial::new(terms.clone()),
        };
        FieldSpec::new(
            d,
            map.lambda(),
            FieldSpecParams {
                schedule: CoefficientSchedule::new(self.alpha, self.c0),
                epsilon: self.epsilon,
                tau0,
                gamma: self.gamma,
                lambda_tilde: self.resolved_lambda_tilde(map),
                j_max: j_max.unwrap_or_else(|| self.resolved_j_max(n)),
                basis_size: self.basis_size,
                mode_cap: self.mode_cap,
            },
        )
    }
}

/// The `(μ, ν)` grid of the characteristic-function comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CfGrid {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

impl Default for CfGrid {
    /// `{-2, -1.5, ..., 2}²`.
    fn default() -> Self {
        let axis: Vec<f64> = (-4..=4).map(|i| i as f64 * 0.5).collect();
        Self { mu: axis.clone(), nu: axis }
    }
}

impl CfGrid {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.mu.iter().flat_map(move |&m| self.nu.iter().map(move |&n| (m, n)))
    }
}

/// One Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub matrix: Vec<Vec<i64>>,
    pub n: u32,
    /// Regime constant `c ∈ (0, 1)`.
    pub c: f64,
    pub field: FieldConfig,
    pub trials: usize,
    pub seed: u64,
    pub cf_grid: CfGrid,
    pub budget: u64,
    pub significance: f64,
    pub cf_tolerance: f64,
    /// Band draws for the orbit covariance diagnostics.
    pub covariance_draws: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            matrix: default_matrix(),
            n: 8,
            c: 0.9,
            field: FieldConfig::default(),
            trials: 512,
            seed: DEFAULT_SEED,
            cf_grid: CfGrid::default(),
            budget: DEFAULT_ENUMERATION_BUDGET,
            significance: 0.01,
            cf_tolerance: 0.15,
            covariance_draws: 2000,
        }
    }
}

pub const MIN_TRIALS: usize = 100;
pub const MIN_COVARIANCE_DRAWS: usize = 1000;

impl ExperimentConfig {
    pub fn automorphism(&self) -> Result<ToralAutomorphism> {
        ToralAutomorphism::new(self.matrix.clone())
    }

    /// Checks the scalar invariants before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::InvalidConfig(format!("c = {} must lie in (0, 1)", self.c)));
        }
        if !(self.field.alpha > 1.0) {
            return Err(Error::ScheduleTooFlat { alpha: self.field.alpha });
        }
        if self.trials < MIN_TRIALS {
            return Err(Error::TooFewSamples { got: self.trials, min: MIN_TRIALS });
        }
        if !(self.significance > 0.0 && self.significance < 1.0) {
            return Err(Error::InvalidConfig("significance must lie in (0, 1)".into()));
        }
        if self.cf_grid.mu.is_empty() || self.cf_grid.nu.is_empty() {
            return Err(Error::InvalidConfig("cf_grid axes must be nonempty".into()));
        }
        Ok(())
    }
}
