use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::smith::{self, IntMatrix};
use super::ToralAutomorphism;
use crate::error::{Error, Result};

/// The solution group of `(M^n - I) x ∈ Z^d` modulo `Z^d`.
///
/// With `P (M^n - I) Q = diag(s)` every period-`n` point is
/// `x = Q diag(1/s) y mod 1` for a unique `y ∈ Π Z/s_i`. Numerators over the
/// common denominator `N = Π s_i` are `p = generator · y mod N`, and
/// `y_i = (Q⁻¹ p)_i / (N / s_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodLattice {
    modulus: u64,
    factors: Vec<u64>,
    generator: Vec<Vec<i64>>,
    coordinates: Vec<Vec<i64>>,
}

fn reduce(m: &IntMatrix, modulus: &BigInt) -> Vec<Vec<i64>> {
    m.iter()
        .map(|r| r.iter().map(|v| ((v % modulus + modulus) % modulus).to_i64().unwrap()).collect())
        .collect()
}

impl PeriodLattice {
    pub(crate) fn new(map: &ToralAutomorphism, n: u32, budget: u64) -> Result<Self> {
        let d = map.dimension();
        let mut b = smith::pow(&smith::from_i64(map.matrix()), n);
        for (i, row) in b.iter_mut().enumerate() {
            row[i] -= BigInt::one();
        }
        let count = smith::det(&b).abs();
        if count > BigInt::from(budget) {
            return Err(Error::PeriodTooLarge { n, points: count.to_string(), budget });
        }
        let modulus = count.to_u64().expect("bounded by budget");
        let snf = smith::smith_normal_form(&b);
        let factors: Vec<u64> = snf.factors.iter().map(|f| f.to_u64().unwrap()).collect();
        let big_mod = BigInt::from(modulus);

        let mut scaled = snf.col_ops.clone();
        for row in scaled.iter_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v *= BigInt::from(modulus / factors[j]);
            }
        }
        debug_assert_eq!(scaled.len(), d);
        Ok(Self {
            modulus,
            factors,
            generator: reduce(&scaled, &big_mod),
            coordinates: reduce(&snf.col_ops_inv, &big_mod),
        })
    }

    /// Number of points `N = |det(M^n - I)|`, also the common denominator.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Invariant factors `s_1 | s_2 | ... | s_d`.
    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.modulus as usize
    }

    pub fn is_empty(&self) -> bool {
        self.modulus == 0
    }

    pub fn dimension(&self) -> usize {
        self.factors.len()
    }

    fn y_of_index(&self, mut index: usize) -> Vec<u64> {
        let mut y = vec![0u64; self.dimension()];
        for i in (0..self.dimension()).rev() {
            let s = self.factors[i] as usize;
            y[i] = (index % s) as u64;
            index /= s;
        }
        y
    }

    /// Numerators over `N` of the point with row-major group index `index`.
    pub fn numerators(&self, index: usize) -> Vec<i64> {
        let y = self.y_of_index(index);
        let n = self.modulus as i128;
        self.generator
            .iter()
            .map(|row| {
                let s: i128 = row.iter().zip(&y).map(|(&g, &yi)| g as i128 * yi as i128).sum();
                s.rem_euclid(n) as i64
            })
            .collect()
    }

    /// Group index of the point with numerators `p` over `N`.
    pub fn index_of(&self, p: &[i64]) -> usize {
        let n = self.modulus as i128;
        let mut index = 0usize;
        for (row, &s) in self.coordinates.iter().zip(&self.factors) {
            let w: i128 = row.iter().zip(p).map(|(&c, &x)| c as i128 * x as i128).sum();
            let w = w.rem_euclid(n) as u64;
            let step = self.modulus / s;
            debug_assert_eq!(w % step, 0, "numerators not on the period lattice");
            index = index * s as usize + (w / step) as usize;
        }
        index
    }

    /// Group index of `x_a - x_b`.
    pub fn difference(&self, a: usize, b: usize) -> usize {
        let (ya, yb) = (self.y_of_index(a), self.y_of_index(b));
        let mut index = 0usize;
        for ((&s, &u), &v) in self.factors.iter().zip(&ya).zip(&yb) {
            index = index * s as usize + ((u + s - v) % s) as usize;
        }
        index
    }

    /// Frequency of the character `x ↦ e^{2πi k·x}` in group coordinates: `k·x = Σ f_i y_i / s_i`.
    pub fn frequency(&self, k: &[i64], out: &mut [usize]) {
        let n = self.modulus as i128;
        for (i, &s) in self.factors.iter().enumerate() {
            let w: i128 = (0..k.len()).map(|r| self.generator[r][i] as i128 * k[r] as i128).sum();
            let w = w.rem_euclid(n) as u64;
            out[i] = (w / (self.modulus / s)) as usize;
        }
    }

    /// Integer basis (columns) of the scaled lattice `N · (M^n - I)^{-1} Z^d + N Z^d`.
    pub(crate) fn scaled_basis(&self) -> Vec<Vec<i64>> {
        let d = self.dimension();
        // columns of generator span the points; together with N·e_i they span the full lattice
        let mut gens: Vec<Vec<i64>> = (0..d).map(|j| (0..d).map(|i| self.generator[i][j]).collect()).collect();
        for i in 0..d {
            let mut e = vec![0i64; d];
            e[i] = self.modulus as i64;
            gens.push(e);
        }
        super::distance::hermite_basis(gens, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_index_round_trips_and_solves_the_congruence() {
        let cat = ToralAutomorphism::cat_map();
        for n in 1..=6 {
            let lat = PeriodLattice::new(&cat, n, 1_000_000).unwrap();
            let b = {
                let mut b = smith::pow(&smith::from_i64(cat.matrix()), n);
                b[0][0] -= 1;
                b[1][1] -= 1;
                b
            };
            let modulus = lat.modulus() as i64;
            for idx in 0..lat.len() {
                let p = lat.numerators(idx);
                assert_eq!(lat.index_of(&p), idx);
                for row in &b {
                    let s: BigInt = row.iter().zip(&p).map(|(a, &x)| a * x).sum();
                    assert_eq!(s % modulus, BigInt::from(0));
                }
            }
        }
    }

    #[test]
    fn difference_subtracts_numerators() {
        let map = ToralAutomorphism::new(vec![vec![3, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        for (m, n) in [(ToralAutomorphism::cat_map(), 5), (map, 2)] {
            let lat = PeriodLattice::new(&m, n, 1_000_000).unwrap();
            let big_n = lat.modulus() as i64;
            for a in (0..lat.len()).step_by(7) {
                for b in (0..lat.len()).step_by(5) {
                    let p: Vec<i64> =
                        lat.numerators(a).iter().zip(lat.numerators(b)).map(|(x, y)| (x - y).rem_euclid(big_n)).collect();
                    assert_eq!(lat.difference(a, b), lat.index_of(&p));
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let cat = ToralAutomorphism::cat_map();
        let err = PeriodLattice::new(&cat, 12, 100_000).unwrap_err();
        assert_eq!(err, Error::PeriodTooLarge { n: 12, points: "103680".into(), budget: 100_000 });
    }
}
