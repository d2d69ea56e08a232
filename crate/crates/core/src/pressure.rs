//! Topological pressure of `-β J_u` from exact periodic-orbit tables.
//!
//! For a toral automorphism `J_u` is constant, so `(J_u)^n_x = n J_u` at every
//! periodic point and the pressure is affine in `β` up to the `log N_n / n`
//! entropy term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::torus::{enumerate_with_budget, OrbitTable, ToralAutomorphism, DEFAULT_ENUMERATION_BUDGET};

fn log_sum_exp(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    // terms are (log weight, multiplicity)
    let terms: Vec<(f64, f64)> = terms.collect();
    let max = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|&(l, m)| m * (l - max).exp()).sum::<f64>().ln()
}

/// `(1/n) log Σ_{T^n x = x} e^{-β (J_u)^n_x}` over an exact table.
pub fn pressure_from_table(map: &ToralAutomorphism, table: &OrbitTable, beta: f64) -> f64 {
    let n = table.n() as f64;
    let birkhoff_ju = n * map.unstable_log_jacobian();
    log_sum_exp(table.orbits().iter().map(|o| (-beta * birkhoff_ju, o.primitive_period() as f64))) / n
}

pub fn pressure_estimate(map: &ToralAutomorphism, beta: f64, n: u32) -> Result<f64> {
    let table = enumerate_with_budget(map, n, DEFAULT_ENUMERATION_BUDGET)?;
    Ok(pressure_from_table(map, &table, beta))
}

/// `F_n(β) = Pr_n(-β J_u) / β`.
pub fn free_energy(map: &ToralAutomorphism, table: &OrbitTable, beta: f64) -> f64 {
    pressure_from_table(map, table, beta) / beta
}

/// `min_x (1/n) (J_u)^n_x` over `Per(n)`.
pub fn ju_min_from_table(map: &ToralAutomorphism, table: &OrbitTable) -> f64 {
    let n = table.n() as f64;
    table
        .orbits()
        .iter()
        .map(|_| (n * map.unstable_log_jacobian()) / n)
        .fold(f64::INFINITY, f64::min)
}

pub fn ju_min_estimate(map: &ToralAutomorphism, n: u32) -> Result<f64> {
    let table = enumerate_with_budget(map, n, DEFAULT_ENUMERATION_BUDGET)?;
    Ok(ju_min_from_table(map, &table))
}

/// `v_n = n · A_n · max_O 1/weight(O)`.
pub fn decay_value(table: &OrbitTable) -> f64 {
    let inv = table.orbits().iter().map(|o| 1.0 / o.weight()).fold(0.0, f64::max);
    table.n() as f64 * table.amplitude() * inv
}

/// `v_n` for every period in `periods`; fails as a whole if any period is over budget.
pub fn pression_decay_check(map: &ToralAutomorphism, periods: &[u32], budget: u64) -> Result<Vec<(u32, f64)>> {
    periods
        .iter()
        .map(|&n| enumerate_with_budget(map, n, budget).map(|t| (n, decay_value(&t))))
        .collect()
}

/// `F_n(β)` over a grid of `β` and periods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureCurve {
    pub betas: Vec<f64>,
    pub periods: Vec<u32>,
    /// `values[i][k] = F_{periods[i]}(betas[k])`.
    pub values: Vec<Vec<f64>>,
    /// `F_n` at the largest period.
    pub extrapolated: Vec<f64>,
    /// `2 F_{2n'} - F_{n'}` for the largest `n'` with both tables present.
    pub richardson: Option<Vec<f64>>,
    pub ju_min: f64,
    pub h_top: f64,
    pub decay: Vec<(u32, f64)>,
}

impl PressureCurve {
    pub fn compute(map: &ToralAutomorphism, betas: &[f64], periods: &[u32], budget: u64) -> Result<Self> {
        if betas.is_empty() {
            return Err(Error::InvalidConfig("beta grid is empty".into()));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta grid must be positive, got {b}")));
        }
        if periods.is_empty() || periods.contains(&0) {
            return Err(Error::InvalidConfig("period range must be nonempty and positive".into()));
        }
        let mut periods = periods.to_vec();
        periods.sort_unstable();
        periods.dedup();
        // all tables first so an over-budget period refuses the whole curve
        let tables: Vec<OrbitTable> =
            periods.iter().map(|&n| enumerate_with_budget(map, n, budget)).collect::<Result<_>>()?;
        let values: Vec<Vec<f64>> =
            tables.iter().map(|t| betas.iter().map(|&b| free_energy(map, t, b)).collect()).collect();
        let extrapolated = values.last().unwrap().clone();
        let richardson = periods.iter().enumerate().rev().find_map(|(i, &n)| {
            let j = periods.iter().position(|&m| m == 2 * n)?;
            Some(values[j].iter().zip(&values[i]).map(|(a, b)| 2.0 * a - b).collect())
        });
        let ju_min = tables.iter().map(|t| ju_min_from_table(map, t)).fold(f64::INFINITY, f64::min);
        let decay = periods.iter().zip(&tables).map(|(&n, t)| (n, decay_value(t))).collect();
        Ok(Self { betas: betas.to_vec(), periods, values, extrapolated, richardson, ju_min, h_top: map.h_top(), decay })
    }

    /// CSV with header `beta,n,F_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,n,F_n\n");
        for (i, &n) in self.periods.iter().enumerate() {
            for (k, &b) in self.betas.iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", crate::fmt_f64(b), n, crate::fmt_f64(self.values[i][k])));
            }
        }
        out
    }
}
