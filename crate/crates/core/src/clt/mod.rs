//! Monte Carlo harness for the law of the rescaled flat trace `A_n · Tr♭`.
//!
//! Trials are independent: each draws a fresh roof from its own derived seed,
//! so the sample list does not depend on how rayon schedules the work.

mod covariance;
mod stats;

pub use covariance::{orbit_covariance_check, orbit_covariance_exact, CovarianceEstimate};
pub use stats::{
    empirical_cf, gaussian_cf, half_normal_cdf, kolmogorov_p_value, ks_half_normal, ks_statistic, normality_tests,
    CfEstimate, KsResult, NormalityReport,
};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::config::{CfGrid, ExperimentConfig};
use crate::error::Result;
use crate::fields::{assemble_roof, FieldSpec, LatticeSynthesizer};
use crate::rng::trial_seed;
use crate::torus::{enumerate_with_budget, OrbitTable, ToralAutomorphism};
use crate::trace::{flat_trace_with, xi_for_regime, TraceSample};

/// Everything shared by the trials of one experiment.
pub struct Experiment {
    config: ExperimentConfig,
    map: ToralAutomorphism,
    table: OrbitTable,
    spec: FieldSpec,
    synth: LatticeSynthesizer,
    xi: f64,
}

impl Experiment {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let map = config.automorphism()?;
        let table = enumerate_with_budget(&map, config.n, config.budget)?;
        let spec = config.field.to_spec(&map, config.n, None)?;
        spec.roof_plan()?;
        let synth = LatticeSynthesizer::new(table.lattice(), spec.basis());
        let xi = xi_for_regime(&map, config.n, config.field.alpha, config.c);
        Ok(Self { config: config.clone(), map, table, spec, synth, xi })
    }

    pub fn map(&self) -> &ToralAutomorphism {
        &self.map
    }

    pub fn table(&self) -> &OrbitTable {
        &self.table
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn trial(&self, t: u64) -> Result<TraceSample> {
        let roof = assemble_roof(&self.spec, trial_seed(self.config.seed, t))?;
        Ok(flat_trace_with(&self.table, &self.synth, &roof, self.xi))
    }

    pub fn run(&self) -> Result<Vec<TraceSample>> {
        (0..self.config.trials as u64).into_par_iter().map(|t| self.trial(t)).collect()
    }
}

/// `trials` scaled traces at the regime frequency.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TraceSample>> {
    Experiment::prepare(config)?.run()
}

/// `Π_O J₀(m A_n √(μ²+ν²) / weight(O))`.
pub fn bessel_product_prediction(table: &OrbitTable, mu: f64, nu: f64) -> f64 {
    let r = mu.hypot(nu);
    let a = table.amplitude();
    table
        .orbits()
        .iter()
        .map(|o| libm::j0(o.primitive_period() as f64 * a * r / o.weight()))
        .product()
}

/// `max_O m A_n / weight(O)`, the largest single-orbit contribution.
pub fn max_orbit_scale(table: &OrbitTable) -> f64 {
    let a = table.amplitude();
    table.orbits().iter().map(|o| o.primitive_period() as f64 * a / o.weight()).fold(0.0, f64::max)
}

/// One row of the characteristic-function comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfRow {
    pub mu: f64,
    pub nu: f64,
    pub empirical: Complex64,
    pub gaussian: f64,
    pub bessel: f64,
}

/// A named pass/fail decision with the threshold it used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub rule: String,
    pub threshold: f64,
    pub pass: bool,
}

impl Verdict {
    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, rule: ">".into(), threshold, pass: value > threshold }
    }

    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), value, rule: "<=".into(), threshold, pass: value <= threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub n: u32,
    pub xi: f64,
    pub amplitude: f64,
    pub orbits: usize,
    pub seed: u64,
    pub normality: NormalityReport,
    pub cf: Vec<CfRow>,
    /// `max |E(μ,ν) - e^{-(μ²+ν²)/4}|` over the grid.
    pub max_cf_deviation: f64,
    /// `max |Bessel product - e^{-(μ²+ν²)/4}|` over the grid.
    pub bessel_deviation: f64,
    pub orbit_covariance: Option<CovarianceEstimate>,
    pub verdicts: Vec<Verdict>,
}

impl StatReport {
    pub fn build(config: &ExperimentConfig, table: &OrbitTable, xi: f64, samples: &[TraceSample]) -> Result<Self> {
        let normality = normality_tests(samples, config.significance)?;
        let scaled: Vec<Complex64> = samples.iter().map(|s| s.scaled).collect();
        let cf: Vec<CfRow> = empirical_cf(&scaled, &config.cf_grid)
            .into_iter()
            .map(|e| CfRow {
                mu: e.mu,
                nu: e.nu,
                empirical: e.value,
                gaussian: gaussian_cf(e.mu, e.nu),
                bessel: bessel_product_prediction(table, e.mu, e.nu),
            })
            .collect();
        let max_cf_deviation = cf.iter().map(|r| (r.empirical - r.gaussian).norm()).fold(0.0, f64::max);
        let bessel_deviation = cf.iter().map(|r| (r.bessel - r.gaussian).abs()).fold(0.0, f64::max);
        let se_mean = (1.0 / samples.len() as f64).sqrt();
        let verdicts = vec![
            Verdict::above("ks_re_p_value", normality.ks_re.p_value, config.significance),
            Verdict::above("ks_im_p_value", normality.ks_im.p_value, config.significance),
            Verdict::at_most("max_cf_deviation", max_cf_deviation, config.cf_tolerance),
            Verdict::at_most(
                "cov_re_im_in_standard_errors",
                normality.covariance[0][1].abs() / normality.covariance_standard_error.max(f64::MIN_POSITIVE),
                3.0,
            ),
            Verdict::at_most("abs_mean_re", normality.mean[0].abs(), 3.0 * se_mean),
            Verdict::at_most("abs_mean_im", normality.mean[1].abs(), 3.0 * se_mean),
        ];
        Ok(Self {
            n: config.n,
            xi,
            amplitude: table.amplitude(),
            orbits: table.orbits().len(),
            seed: config.seed,
            normality,
            cf,
            max_cf_deviation,
            bessel_deviation,
            orbit_covariance: None,
            verdicts,
        })
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Attaches the band covariance diagnostics and their verdicts.
    pub fn with_covariance(mut self, est: CovarianceEstimate) -> Self {
        let (lo, hi) = est.ratio_range();
        self.verdicts.push(Verdict::above("min_variance_ratio", lo, 0.1));
        self.verdicts.push(Verdict::at_most("max_variance_ratio", hi, 10.0 * est.n as f64));
        if let Some(r) = est.off_diagonal_ratio {
            self.verdicts.push(Verdict::at_most("off_diagonal_ratio", r, 0.05));
        }
        self.orbit_covariance = Some(est);
        self
    }
}

/// Runs the trials and summarizes them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Vec<TraceSample>, StatReport)> {
    let exp = Experiment::prepare(config)?;
    let samples = exp.run()?;
    let report = StatReport::build(config, exp.table(), exp.xi(), &samples)?;
    Ok((samples, report))
}

/// CSV of the trace samples.
pub fn samples_csv(samples: &[TraceSample]) -> String {
    let mut out = String::from(TraceSample::CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&s.csv_row());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests;
