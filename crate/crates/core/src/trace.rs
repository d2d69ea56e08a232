//! Flat traces `Tr♭ L^n_{ξ,τ} = Σ_{T^n x = x} e^{iξ τ^n_x} / |det(1 - dT^n_x)|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fields::{FieldSample, LatticeSynthesizer};
use crate::torus::{OrbitTable, ToralAutomorphism};

/// Above this `|ξ τ|` the phase is reduced mod 2π in extended precision.
pub const PHASE_REDUCTION_THRESHOLD: f64 = 1e8;

const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `ξ τ mod 2π`, carrying the rounding error of the product and of 2π.
pub fn reduced_phase(xi: f64, tau: f64) -> f64 {
    let p = xi * tau;
    if p.abs() <= PHASE_REDUCTION_THRESHOLD {
        return p;
    }
    let err = xi.mul_add(tau, -p);
    let k = (p / TWO_PI_HI).round();
    let r = (-k).mul_add(TWO_PI_HI, p);
    (-k).mul_add(TWO_PI_LO, r) + err
}

/// `e^{iξτ}`.
pub fn unit_phase(xi: f64, tau: f64) -> Complex64 {
    Complex64::from_polar(1.0, reduced_phase(xi, tau))
}

/// One realization of the flat trace and its scaled version `A_n · Tr♭`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub n: u32,
    pub xi: f64,
    pub raw: Complex64,
    pub scaled: Complex64,
    pub seed: u64,
}

impl TraceSample {
    pub const CSV_HEADER: &'static str = "n,xi,seed,re_raw,im_raw,re_scaled,im_scaled";

    pub fn csv_row(&self) -> String {
        use crate::fmt_f64 as f;
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            f(self.xi),
            self.seed,
            f(self.raw.re),
            f(self.raw.im),
            f(self.scaled.re),
            f(self.scaled.im)
        )
    }
}

/// Birkhoff sums `τ^n_O` of every orbit, from roof values indexed by lattice position.
pub fn orbit_birkhoff_sums(table: &OrbitTable, values: &[f64]) -> Vec<f64> {
    let n = table.n();
    table
        .orbits()
        .iter()
        .map(|o| {
            let vals: Vec<f64> = o.lattice_indices().iter().map(|&i| values[i]).collect();
            crate::torus::birkhoff_sum(&vals, n, o.primitive_period())
        })
        .collect()
}

/// Orbit-grouped flat trace `Σ_O m e^{iξτ^n_O} / weight(O)` from lattice values.
pub fn flat_trace_from_values(table: &OrbitTable, values: &[f64], xi: f64, seed: u64) -> TraceSample {
    let sums = orbit_birkhoff_sums(table, values);
    let raw: Complex64 = table
        .orbits()
        .iter()
        .zip(&sums)
        .map(|(o, &tau)| unit_phase(xi, tau) * (o.primitive_period() as f64 / o.weight()))
        .sum();
    TraceSample { n: table.n(), xi, raw, scaled: raw * table.amplitude(), seed }
}

/// Flat trace of the roof over the synthesizer's lattice.
pub fn flat_trace_with(table: &OrbitTable, synth: &LatticeSynthesizer, roof: &FieldSample, xi: f64) -> TraceSample {
    flat_trace_from_values(table, &roof.evaluate_on(synth), xi, roof.seed())
}

/// Flat trace of `roof` at frequency `xi`.
pub fn flat_trace(table: &OrbitTable, roof: &FieldSample, xi: f64) -> TraceSample {
    let synth = LatticeSynthesizer::new(table.lattice(), roof.basis());
    flat_trace_with(table, &synth, roof, xi)
}

/// Point-wise flat trace: every periodic point accumulates its own Birkhoff
/// sum by iterating the map `n` times, with no orbit grouping.
pub fn flat_trace_pointwise(map: &ToralAutomorphism, table: &OrbitTable, values: &[f64], xi: f64) -> Complex64 {
    let lattice = table.lattice();
    let modulus = lattice.modulus() as i64;
    let weight = lattice.modulus() as f64;
    (0..lattice.len())
        .map(|start| {
            let mut p = lattice.numerators(start);
            let mut path = Vec::with_capacity(table.n() as usize);
            for _ in 0..table.n() {
                path.push(values[lattice.index_of(&p)]);
                p = map.apply_mod(&p, modulus);
            }
            let (s, c) = crate::torus::compensated_sum(&path);
            unit_phase(xi, s + c) / weight
        })
        .sum()
}

/// Smallest `ξ` satisfying `n ≤ c log ξ / (h_top + (d/2)(α - 1/2) log Λ)`.
pub fn xi_for_regime(map: &ToralAutomorphism, n: u32, alpha: f64, c: f64) -> f64 {
    assert!(c > 0.0 && c < 1.0, "regime constant must lie in (0, 1)");
    assert!(alpha > 1.0, "alpha must exceed 1");
    (n as f64 * regime_rate(map, alpha) / c).exp()
}

/// `h_top + (d/2)(α - 1/2) log Λ`.
pub fn regime_rate(map: &ToralAutomorphism, alpha: f64) -> f64 {
    let d = map.dimension() as f64;
    map.h_top() + 0.5 * d * (alpha - 0.5) * map.lambda().ln()
}
