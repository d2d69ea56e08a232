//! Gaussian random fields on the torus built from the Laplace eigenbasis.
//!
//! A roof function is `τ = τ₀ + ε δτ` with `δτ = Σ c_k ζ_k φ_k`. The random
//! part is assembled as independent pieces `δτ₀ + κ Σ_j δτ_j`, where the band
//! field `δτ_j = h_j^{dα+γ} Σ_k √χ(h_j² λ_k) ζ_{j,k} φ_k` lives at spatial
//! scale `h_j = Λ̃^{-j/2}` and `δτ₀` carries the remaining variance so that
//! every mode still has variance `c_k²`.

mod basis;
mod chi;
mod synth;

pub use basis::{weyl_slope, ModeKind, SpectralBasis};
pub use chi::{chi, ChiProfile, RETENTION_THRESHOLD};
pub use synth::LatticeSynthesizer;

use std::f64::consts::PI;
use std::ops::Range;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Default cap on the number of modes a single band may retain.
pub const DEFAULT_MODE_CAP: usize = 4_000_000;

/// One term `cos · cos(2πk·x) + sin · sin(2πk·x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub wavevector: Vec<i64>,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// A finite trigonometric polynomial, used for the deterministic roof `τ₀`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourierPolynomial {
    terms: Vec<FourierTerm>,
}

impl FourierPolynomial {
    pub fn new(terms: Vec<FourierTerm>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64, dimension: usize) -> Self {
        Self::new(vec![FourierTerm { wavevector: vec![0; dimension], cos: c, sin: 0.0 }])
    }

    /// `cos(2π x₁)`.
    pub fn first_axis_cosine(dimension: usize) -> Self {
        let mut k = vec![0; dimension];
        k[0] = 1;
        Self::new(vec![FourierTerm { wavevector: k, cos: 1.0, sin: 0.0 }])
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.cos == 0.0 && t.sin == 0.0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let phase = 2.0 * PI * t.wavevector.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum::<f64>();
                t.cos * phase.cos() + t.sin * phase.sin()
            })
            .sum()
    }

    fn scaled(&self, a: f64) -> impl Iterator<Item = FourierTerm> + '_ {
        self.terms.iter().map(move |t| FourierTerm { wavevector: t.wavevector.clone(), cos: a * t.cos, sin: a * t.sin })
    }
}

/// `c_j = C₀ (j+1)^{-α}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSchedule {
    pub alpha: f64,
    pub c0: f64,
}

impl CoefficientSchedule {
    pub fn new(alpha: f64, c0: f64) -> Self {
        Self { alpha, c0 }
    }

    pub fn coefficient(&self, j: usize) -> f64 {
        self.c0 * ((j + 1) as f64).powf(-self.alpha)
    }
}

/// Everything needed to draw roof functions.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    basis: Arc<SpectralBasis>,
    schedule: CoefficientSchedule,
    epsilon: f64,
    tau0: FourierPolynomial,
    gamma: f64,
    lambda_tilde: f64,
    j_max: u32,
    chi: ChiProfile,
    mode_cap: usize,
    plan: OnceLock<Arc<RoofPlan>>,
}

/// Builder inputs for [`FieldSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpecParams {
    pub schedule: CoefficientSchedule,
    pub epsilon: f64,
    pub tau0: FourierPolynomial,
    pub gamma: f64,
    pub lambda_tilde: f64,
    pub j_max: u32,
    /// Explicit basis size; `None` covers the support of band `j_max`.
    pub basis_size: Option<usize>,
    pub mode_cap: usize,
}

/// `h_j = Λ̃^{-j/2}`.
pub fn band_scale(lambda_tilde: f64, j: u32) -> f64 {
    lambda_tilde.powf(-(j as f64) / 2.0)
}

impl FieldSpec {
    /// Validates the parameters against the map's expansion constant `lambda`.
    pub fn new(dimension: usize, lambda: f64, params: FieldSpecParams) -> Result<Self> {
        if !(params.lambda_tilde > lambda) {
            return Err(Error::InvalidConfig(format!(
                "lambda_tilde = {} must exceed the expansion constant {}",
                params.lambda_tilde, lambda
            )));
        }
        if !(params.gamma > 0.0) {
            return Err(Error::InvalidConfig(format!("gamma = {} must be positive", params.gamma)));
        }
        if params.j_max < 1 {
            return Err(Error::InvalidConfig("j_max must be at least 1".into()));
        }
        if !params.epsilon.is_finite() || !params.schedule.c0.is_finite() || !params.schedule.alpha.is_finite() {
            return Err(Error::InvalidConfig("non-finite field parameter".into()));
        }
        if params.tau0.terms().iter().any(|t| t.wavevector.len() != dimension) {
            return Err(Error::InvalidConfig("tau0 wavevector dimension mismatch".into()));
        }
        let chi = ChiProfile::new(dimension);
        let basis = match params.basis_size {
            Some(size) if size >= 1 => SpectralBasis::with_size(dimension, size),
            Some(_) => return Err(Error::InvalidConfig("basis_size must be positive".into())),
            None => {
                let h = band_scale(params.lambda_tilde, params.j_max);
                SpectralBasis::up_to_eigenvalue(dimension, chi.support_end() / (h * h))
            }
        };
        Ok(Self {
            basis: Arc::new(basis),
            schedule: params.schedule,
            epsilon: params.epsilon,
            tau0: params.tau0,
            gamma: params.gamma,
            lambda_tilde: params.lambda_tilde,
            j_max: params.j_max,
            chi,
            mode_cap: params.mode_cap,
            plan: OnceLock::new(),
        })
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn schedule(&self) -> CoefficientSchedule {
        self.schedule
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tau0(&self) -> &FourierPolynomial {
        &self.tau0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda_tilde(&self) -> f64 {
        self.lambda_tilde
    }

    pub fn j_max(&self) -> u32 {
        self.j_max
    }

    pub fn chi(&self) -> &ChiProfile {
        &self.chi
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// `h_j`.
    pub fn band_scale(&self, j: u32) -> f64 {
        band_scale(self.lambda_tilde, j)
    }

    /// `h_j^{dα+γ}`.
    pub fn band_prefactor(&self, j: u32) -> f64 {
        let d = self.dimension() as f64;
        self.band_scale(j).powf(d * self.schedule.alpha + self.gamma)
    }

    /// `h_j^{d(2α-1)+2γ}`, the diagonal scale of `K_j`.
    pub fn diagonal_scale(&self, j: u32) -> f64 {
        let d = self.dimension() as f64;
        self.band_scale(j).powf(d * (2.0 * self.schedule.alpha - 1.0) + 2.0 * self.gamma)
    }

    /// Basis modes with `χ(h_j² λ_k) > RETENTION_THRESHOLD`.
    pub fn band_range(&self, j: u32) -> Range<usize> {
        let h2 = self.band_scale(j).powi(2);
        let range = self.basis.index_range(self.chi.support_start() / h2, self.chi.support_end() / h2);
        // the constant mode has χ(0) = 0
        range.start.max(1)..range.end.max(1)
    }

    /// `√χ(h_j² λ_k)` scaled by `h_j^{dα+γ}` for every retained mode of band `j`.
    fn band_amplitudes(&self, j: u32) -> (Range<usize>, Vec<f64>) {
        let range = self.band_range(j);
        let h2 = self.band_scale(j).powi(2);
        let pre = self.band_prefactor(j);
        let amps = range.clone().map(|k| pre * self.chi.eval(h2 * self.basis.eigenvalue(k)).sqrt()).collect();
        (range, amps)
    }

    fn check_band(&self, j: u32) -> Result<Range<usize>> {
        if j < 1 || j > self.j_max {
            return Err(Error::InvalidConfig(format!("band {j} outside 1..={}", self.j_max)));
        }
        let range = self.band_range(j);
        if range.len() > self.mode_cap {
            return Err(Error::BandBudgetExceeded { band: j, modes: range.len(), cap: self.mode_cap });
        }
        Ok(range)
    }

    /// The κ-rescaled band decomposition of the schedule.
    pub fn roof_plan(&self) -> Result<Arc<RoofPlan>> {
        if !(self.schedule.alpha > 1.0) {
            return Err(Error::ScheduleTooFlat { alpha: self.schedule.alpha });
        }
        if let Some(plan) = self.plan.get() {
            return Ok(plan.clone());
        }
        for j in 1..=self.j_max {
            self.check_band(j)?;
        }
        let plan = Arc::new(RoofPlan::build(self));
        Ok(self.plan.get_or_init(|| plan).clone())
    }
}

/// Per-mode amplitudes of the assembled roof `δτ₀ + κ Σ_j δτ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofPlan {
    kappa: f64,
    residual: Vec<f64>,
    bands: Vec<(u32, Range<usize>, Vec<f64>)>,
}

impl RoofPlan {
    fn build(spec: &FieldSpec) -> Self {
        let n_modes = spec.basis.len();
        let bands: Vec<(u32, Range<usize>, Vec<f64>)> = (1..=spec.j_max)
            .map(|j| {
                let (r, a) = spec.band_amplitudes(j);
                (j, r, a)
            })
            .collect();
        let mut band_var = vec![0.0; n_modes];
        for (_, range, amps) in &bands {
            for (k, a) in range.clone().zip(amps) {
                band_var[k] += a * a;
            }
        }
        let kappa = (0..n_modes)
            .filter(|&k| band_var[k] > 0.0)
            .map(|k| spec.schedule.coefficient(k) / band_var[k].sqrt())
            .fold(1.0, f64::min);
        let residual = (0..n_modes)
            .map(|k| {
                let c = spec.schedule.coefficient(k);
                (c * c - kappa * kappa * band_var[k]).max(0.0).sqrt()
            })
            .collect();
        Self { kappa, residual, bands }
    }

    /// The common band rescaling `κ = min(1, min_k c_k / c'_k)`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `√(c_k² - κ² c'_k²)`.
    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    /// `κ² Σ_j (band amplitude at k)² + residual_k²`.
    pub fn mode_variance(&self, k: usize) -> f64 {
        let bands: f64 = self
            .bands
            .iter()
            .filter(|(_, r, _)| r.contains(&k))
            .map(|(_, r, a)| a[k - r.start].powi(2))
            .sum();
        self.kappa * self.kappa * bands + self.residual[k].powi(2)
    }
}

/// Standard normal draws `ζ` of one lane, for modes `start..start + values.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandDraws {
    /// `0` for the residual field, `j ≥ 1` for band `j`.
    pub band: u32,
    pub start: usize,
    pub values: Vec<f64>,
}

fn draw(seed: u64, band: u32, range: Range<usize>) -> BandDraws {
    let lane = if band == 0 { rng::LANE_RESIDUAL } else { rng::band_lane(band) };
    let mut r = rng::stream(seed, lane);
    let values = range.clone().map(|_| r.sample(StandardNormal)).collect();
    BandDraws { band, start: range.start, values }
}

/// One realization `τ₀ + ε Σ_k a_k φ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    basis: Arc<SpectralBasis>,
    tau0: FourierPolynomial,
    epsilon: f64,
    coefficients: Vec<f64>,
    draws: Vec<BandDraws>,
    seed: u64,
}

impl FieldSample {
    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn tau0(&self) -> &FourierPolynomial {
        &self.tau0
    }

    /// Amplitudes `a_k` of the random part.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn draws(&self) -> &[BandDraws] {
        &self.draws
    }

    /// Direct evaluation at one point.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let random: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0.0)
            .map(|(j, &a)| a * self.basis.eval(j, x))
            .sum();
        self.tau0.eval(x) + self.epsilon * random
    }

    /// Values at every point of the synthesizer's lattice, by group index.
    pub fn evaluate_on(&self, synth: &LatticeSynthesizer) -> Vec<f64> {
        synth.synthesize(&self.basis, Some(&self.tau0), &self.coefficients, self.epsilon)
    }

    /// `a·f + b·g` over a shared basis.
    pub fn linear_combination(a: f64, f: &FieldSample, b: f64, g: &FieldSample) -> FieldSample {
        assert!(Arc::ptr_eq(&f.basis, &g.basis) || f.basis == g.basis, "bases differ");
        let coefficients = f
            .coefficients
            .iter()
            .zip(&g.coefficients)
            .map(|(x, y)| a * f.epsilon * x + b * g.epsilon * y)
            .collect();
        let tau0 = FourierPolynomial::new(f.tau0.scaled(a).chain(g.tau0.scaled(b)).collect());
        FieldSample { basis: f.basis.clone(), tau0, epsilon: 1.0, coefficients, draws: Vec::new(), seed: f.seed }
    }

    /// CSV: `mode,k1..kd,kind,coefficient` for every nonzero random amplitude.
    pub fn to_csv(&self) -> String {
        let d = self.basis.dimension();
        let mut out = String::from("mode");
        for i in 1..=d {
            out.push_str(&format!(",k{i}"));
        }
        out.push_str(",kind,coefficient\n");
        for (j, &a) in self.coefficients.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let k: Vec<String> = self.basis.wavevector(j).iter().map(|v| v.to_string()).collect();
            let kind = match self.basis.kind(j) {
                ModeKind::Constant => "const",
                ModeKind::Cos => "cos",
                ModeKind::Sin => "sin",
            };
            out.push_str(&format!("{},{},{},{}\n", j, k.join(","), kind, crate::fmt_f64(self.epsilon * a)));
        }
        out
    }
}

/// The band field `δτ_j` alone.
pub fn sample_band(spec: &FieldSpec, j: u32, seed: u64) -> Result<FieldSample> {
    let range = spec.check_band(j)?;
    let (_, amps) = spec.band_amplitudes(j);
    let draws = draw(seed, j, range.clone());
    let mut coefficients = vec![0.0; spec.basis.len()];
    for ((k, a), z) in range.zip(&amps).zip(&draws.values) {
        coefficients[k] = a * z;
    }
    Ok(FieldSample {
        basis: spec.basis.clone(),
        tau0: FourierPolynomial::zero(),
        epsilon: 1.0,
        coefficients,
        draws: vec![draws],
        seed,
    })
}

/// The full roof `τ = τ₀ + ε (δτ₀ + κ Σ_{j=1}^{j_max} δτ_j)`.
pub fn assemble_roof(spec: &FieldSpec, seed: u64) -> Result<FieldSample> {
    let plan = spec.roof_plan()?;
    let n_modes = spec.basis.len();
    let residual = draw(seed, 0, 0..n_modes);
    let mut coefficients: Vec<f64> = plan.residual.iter().zip(&residual.values).map(|(r, z)| r * z).collect();
    let mut draws = vec![residual];
    for (j, range, amps) in &plan.bands {
        let d = draw(seed, *j, range.clone());
        for ((k, a), z) in range.clone().zip(amps).zip(&d.values) {
            coefficients[k] += plan.kappa * a * z;
        }
        draws.push(d);
    }
    Ok(FieldSample {
        basis: spec.basis.clone(),
        tau0: spec.tau0.clone(),
        epsilon: spec.epsilon,
        coefficients,
        draws,
        seed,
    })
}

/// A plain centered Gaussian field `Σ_j c_j ζ_j φ_j` over `basis`.
pub fn sample_gaussian_field(basis: Arc<SpectralBasis>, schedule: CoefficientSchedule, seed: u64) -> FieldSample {
    let draws = draw(seed, 0, 0..basis.len());
    let coefficients = draws.values.iter().enumerate().map(|(j, z)| schedule.coefficient(j) * z).collect();
    FieldSample { basis, tau0: FourierPolynomial::zero(), epsilon: 1.0, coefficients, draws: vec![draws], seed }
}

/// `K_j(x, y) = h_j^{2(dα+γ)} Σ_k χ(h_j² λ_k) φ_k(x) φ_k(y)` over the retained modes.
pub fn covariance_kernel(spec: &FieldSpec, j: u32, x: &[f64], y: &[f64]) -> f64 {
    let (range, amps) = spec.band_amplitudes(j);
    range.zip(&amps).map(|(k, a)| a * a * spec.basis.eval(k, x) * spec.basis.eval(k, y)).sum()
}

/// `K_j(z, 0)` for every point `z` of the synthesizer's lattice, by group index.
pub fn kernel_on_lattice(spec: &FieldSpec, j: u32, synth: &LatticeSynthesizer) -> Vec<f64> {
    let (range, amps) = spec.band_amplitudes(j);
    let mut coefficients = vec![0.0; spec.basis.len()];
    for (k, a) in range.zip(&amps) {
        // φ_k(0) is √2 for cosines and 0 for sines
        if spec.basis.kind(k) == ModeKind::Cos {
            coefficients[k] = a * a * std::f64::consts::SQRT_2;
        }
    }
    synth.synthesize(&spec.basis, None, &coefficients, 1.0)
}

/// Partial `H^s` norm squared `Σ_{j<J} a_j² (1+λ_j)^s`.
pub fn sobolev_partial_norm(sample: &FieldSample, s: f64, truncation: usize) -> f64 {
    let basis = sample.basis();
    sample
        .coefficients
        .iter()
        .take(truncation)
        .enumerate()
        .map(|(j, a)| (sample.epsilon * a).powi(2) * (1.0 + basis.eigenvalue(j)).powf(s))
        .sum()
}
