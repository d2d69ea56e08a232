//! Hyperbolic toral automorphisms and exact enumeration of their periodic orbits.

mod distance;
mod lattice;
mod orbits;
pub mod smith;

pub use distance::{fitted_separation_constant, min_periodic_distance, min_periodic_distance_brute_force};
pub use lattice::PeriodLattice;
pub(crate) use orbits::compensated_sum;
pub use orbits::{
    amplitude, birkhoff_sum, enumerate_periodic_points, enumerate_with_budget, primitive_period,
    OrbitTable, PeriodicOrbit, RationalPoint, DEFAULT_ENUMERATION_BUDGET,
};

use nalgebra::DMatrix;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `| |λ| - 1 |` below which an eigenvalue counts as neutral.
pub const HYPERBOLICITY_TOLERANCE: f64 = 1e-9;

/// A hyperbolic unimodular integer matrix acting on `T^d = R^d / Z^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToralAutomorphism {
    matrix: Vec<Vec<i64>>,
    eigenvalues: Vec<(f64, f64)>,
    unstable_log_jacobian: f64,
    h_top: f64,
    lambda: f64,
}

impl ToralAutomorphism {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let d = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        if d < 2 || matrix.iter().any(|r| r.len() != d) {
            return Err(Error::NotSquare { rows: d, cols });
        }
        let det = smith::det(&smith::from_i64(&matrix));
        if det.abs() != num_bigint::BigInt::from(1) {
            return Err(Error::NotUnimodular { det: det.to_string() });
        }

        let m = DMatrix::from_fn(d, d, |i, j| matrix[i][j] as f64);
        let eig = m.complex_eigenvalues();
        let eigenvalues: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im)).collect();
        let moduli: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
        if let Some(&modulus) = moduli.iter().find(|r| (**r - 1.0).abs() < HYPERBOLICITY_TOLERANCE) {
            return Err(Error::NotHyperbolic { modulus, tolerance: HYPERBOLICITY_TOLERANCE });
        }
        let h_top: f64 = moduli.iter().filter(|&&r| r > 1.0).map(|r| r.ln()).sum();
        let max = moduli.iter().cloned().fold(0.0, f64::max);
        let min = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
        let lambda = max.max(1.0 / min);

        Ok(Self { matrix, eigenvalues, unstable_log_jacobian: h_top, h_top, lambda })
    }

    /// The hyperbolic cat map `[[2,1],[1,1]]`.
    pub fn cat_map() -> Self {
        Self::new(vec![vec![2, 1], vec![1, 1]]).expect("cat map is hyperbolic")
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.len()
    }

    /// Eigenvalues as `(re, im)` pairs.
    pub fn eigenvalues(&self) -> &[(f64, f64)] {
        &self.eigenvalues
    }

    /// Sum of `log|λ|` over expanding eigenvalues. Constant in space for linear maps.
    pub fn unstable_log_jacobian(&self) -> f64 {
        self.unstable_log_jacobian
    }

    pub fn h_top(&self) -> f64 {
        self.h_top
    }

    /// Largest spectral radius of the matrix and of its inverse.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Image of `numerators / denominator` under the map, reduced mod the denominator.
    pub(crate) fn apply_mod(&self, p: &[i64], modulus: i64) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| {
                let s: i128 = row.iter().zip(p).map(|(&a, &x)| a as i128 * x as i128).sum();
                s.rem_euclid(modulus as i128) as i64
            })
            .collect()
    }
}

/// Validates `matrix` as a hyperbolic toral automorphism.
pub fn make_automorphism(matrix: Vec<Vec<i64>>) -> Result<ToralAutomorphism> {
    ToralAutomorphism::new(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_map_spectral_data() {
        let t = make_automorphism(vec![vec![2, 1], vec![1, 1]]).unwrap();
        // roots of x² - 3x + 1
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((t.h_top() - golden_sq.ln()).abs() < 1e-12);
        assert!((t.lambda() - golden_sq).abs() < 1e-12);
        assert_eq!(t.unstable_log_jacobian(), t.h_top());
        assert!((t.h_top() - 0.9624).abs() < 1e-4);
    }

    #[test]
    fn fibonacci_matrix_accepted() {
        // x² - x - 1: golden ratio and -1/golden ratio
        let t = make_automorphism(vec![vec![1, 1], vec![1, 0]]).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((t.h_top() - phi.ln()).abs() < 1e-12);
        assert!((t.lambda() - phi).abs() < 1e-12);
    }

    #[test]
    fn shear_rejected() {
        let err = make_automorphism(vec![vec![1, 1], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::NotHyperbolic { .. }));
    }

    #[test]
    fn non_unimodular_rejected() {
        let err = make_automorphism(vec![vec![2, 0], vec![0, 3]]).unwrap_err();
        assert_eq!(err, Error::NotUnimodular { det: "6".into() });
    }

    #[test]
    fn rotation_of_order_four_is_not_hyperbolic() {
        let err = make_automorphism(vec![vec![0, -1], vec![1, 0]]).unwrap_err();
        assert!(matches!(err, Error::NotHyperbolic { .. }));
    }

    #[test]
    fn non_square_rejected() {
        assert!(matches!(make_automorphism(vec![vec![1, 2, 3], vec![4, 5, 6]]), Err(Error::NotSquare { .. })));
        assert!(matches!(make_automorphism(vec![vec![1]]), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn three_dimensional_map_respects_entropy_bound() {
        // companion matrix of x³ - x - 1 (det 1, no eigenvalue on the circle)
        let t = make_automorphism(vec![vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]]).unwrap();
        assert!(t.h_top() > 0.0);
        assert!(t.h_top() <= 1.5 * t.lambda().ln() + 1e-12);
    }
}
