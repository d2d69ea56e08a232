//! Flat traces of twisted transfer operators over hyperbolic toral
//! automorphisms, with Gaussian random roof functions built from the Laplace
//! eigenbasis of the torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`torus`]: automorphisms, exact periodic-orbit tables, amplitudes.
//! * [`fields`]: spectral basis, power-law Gaussian fields, band fields and
//!   their covariance kernels.
//! * [`trace`]: flat traces and the time/frequency regime.
//! * [`clt`]: Monte Carlo harness for the limiting complex Gaussian law.
//! * [`pressure`]: topological pressure and amplitude decay.

pub mod clt;
pub mod config;
pub mod error;
pub mod fields;
pub mod pressure;
pub mod rng;
pub mod torus;
pub mod trace;

pub use clt::{CovarianceEstimate, StatReport};
pub use config::{ExperimentConfig, FieldConfig};
pub use error::{Error, Result};
pub use fields::{CoefficientSchedule, FieldSample, FieldSpec, SpectralBasis};
pub use pressure::PressureCurve;
pub use torus::{OrbitTable, PeriodicOrbit, RationalPoint, ToralAutomorphism};
pub use trace::TraceSample;

/// Round-trip decimal rendering with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
