use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::lattice::PeriodLattice;
use super::ToralAutomorphism;
use crate::error::Result;

/// Default refusal threshold on `|det(M^n - I)|`.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 5_000_000;

/// A rational torus point `numerators / denominator` in canonical form:
/// `0 ≤ p_i < q` and `gcd(p_1, ..., p_d, q) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    numerators: Vec<i64>,
    denominator: u64,
}

impl RationalPoint {
    pub fn new(numerators: Vec<i64>, denominator: u64) -> Self {
        assert!(denominator > 0, "denominator must be positive");
        let q = denominator as i64;
        let mut p: Vec<i64> = numerators.into_iter().map(|x| x.rem_euclid(q)).collect();
        let g = p.iter().fold(q, |g, &x| g.gcd(&x));
        p.iter_mut().for_each(|x| *x /= g);
        Self { numerators: p, denominator: (q / g) as u64 }
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn dimension(&self) -> usize {
        self.numerators.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators.iter().map(|&p| p as f64 / self.denominator as f64).collect()
    }

    /// Exact image under `map`.
    pub fn image(&self, map: &ToralAutomorphism) -> Self {
        Self::new(map.apply_mod(&self.numerators, self.denominator as i64), self.denominator)
    }

    /// Coordinates as exact fraction strings `p/q`.
    pub fn fraction_strings(&self) -> Vec<String> {
        self.numerators.iter().map(|p| format!("{}/{}", p, self.denominator)).collect()
    }
}

impl Ord for RationalPoint {
    /// Lexicographic in coordinate values.
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.numerators.iter().zip(&other.numerators) {
            let lhs = *a as i128 * other.denominator as i128;
            let rhs = *b as i128 * self.denominator as i128;
            match lhs.cmp(&rhs) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for RationalPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.fraction_strings().join(", "))
    }
}

/// One `T`-cycle inside `Per(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    points: Vec<RationalPoint>,
    indices: Vec<usize>,
    weight: f64,
}

impl PeriodicOrbit {
    /// The cycle starting at the representative; `T(points[i]) = points[(i+1) % m]`.
    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    /// Group indices of the points in the period lattice, in cycle order.
    pub fn lattice_indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn primitive_period(&self) -> u32 {
        self.points.len() as u32
    }

    /// `|det(I - M^n)|` for the ambient period.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Lexicographically smallest point of the cycle.
    pub fn representative(&self) -> &RationalPoint {
        &self.points[0]
    }
}

/// All points of `Per(n)` grouped into orbits, ordered by primitive period
/// then representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTable {
    n: u32,
    orbits: Vec<PeriodicOrbit>,
    total_points: u64,
    amplitude: f64,
    lattice: PeriodLattice,
}

impl OrbitTable {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn orbits(&self) -> &[PeriodicOrbit] {
        &self.orbits
    }

    pub fn total_points(&self) -> u64 {
        self.total_points
    }

    /// `A_n`.
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn lattice(&self) -> &PeriodLattice {
        &self.lattice
    }

    pub fn points(&self) -> impl Iterator<Item = &RationalPoint> {
        self.orbits.iter().flat_map(|o| o.points.iter())
    }

    /// `Σ_O m² A_n² / weight(O)²`, equal to 1 by construction of `A_n`.
    pub fn normalization(&self) -> f64 {
        let a2 = self.amplitude * self.amplitude;
        self.orbits
            .iter()
            .map(|o| {
                let m = o.primitive_period() as f64;
                m * m * a2 / (o.weight * o.weight)
            })
            .sum()
    }

    /// CSV with one row per point: `n,orbit_id,m,weight,x1,...,xd`.
    pub fn to_csv(&self) -> String {
        let d = self.lattice.dimension();
        let mut out = String::from("n,orbit_id,m,weight");
        for i in 1..=d {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (id, orbit) in self.orbits.iter().enumerate() {
            for p in &orbit.points {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    self.n,
                    id,
                    orbit.primitive_period(),
                    crate::fmt_f64(orbit.weight),
                    p.fraction_strings().join(",")
                ));
            }
        }
        out
    }
}

/// Smallest divisor `m` of `n` with `T^m x = x`, testing divisors in increasing order.
pub fn primitive_period(map: &ToralAutomorphism, x: &RationalPoint, n: u32) -> Option<u32> {
    let mut current = x.clone();
    let mut steps = 0;
    for m in (1..=n).filter(|m| n.is_multiple_of(*m)) {
        while steps < m {
            current = current.image(map);
            steps += 1;
        }
        if &current == x {
            return Some(m);
        }
    }
    None
}

/// Compensated sum as an unevaluated pair `(sum, correction)`.
pub(crate) fn compensated_sum<'a>(values: impl IntoIterator<Item = &'a f64>) -> (f64, f64) {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &v in values {
        let t = s + v;
        c += if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
        s = t;
    }
    (s, c)
}

/// The Birkhoff sum `(n/m) Σ_{x∈O} value(x)` of an orbit with primitive period `m`.
///
/// Summed with compensation and scaled exactly before the final rounding, so
/// the result does not depend on where along the cycle the sum starts.
pub fn birkhoff_sum(values: &[f64], n: u32, m: u32) -> f64 {
    debug_assert_eq!(values.len(), m as usize);
    let (s, c) = compensated_sum(values);
    let k = (n / m) as f64;
    let p = s * k;
    let e = s.mul_add(k, -p);
    p + (e + c * k)
}

/// `A_n = (Σ_{x∈Per(n)} m_x / weight²)^{-1/2}`.
pub fn amplitude(table: &OrbitTable) -> f64 {
    table.amplitude
}

fn amplitude_of(orbits: &[PeriodicOrbit]) -> f64 {
    let s: f64 = orbits
        .iter()
        .map(|o| {
            let m = o.primitive_period() as f64;
            m * m / (o.weight * o.weight)
        })
        .sum();
    s.powf(-0.5)
}

pub fn enumerate_periodic_points(map: &ToralAutomorphism, n: u32) -> Result<OrbitTable> {
    enumerate_with_budget(map, n, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_with_budget(map: &ToralAutomorphism, n: u32, budget: u64) -> Result<OrbitTable> {
    assert!(n >= 1, "period must be positive");
    let lattice = PeriodLattice::new(map, n, budget)?;
    let total = lattice.len();
    let modulus = lattice.modulus() as i64;
    let weight = lattice.modulus() as f64;

    let mut seen = vec![false; total];
    let mut orbits = Vec::new();
    for start in 0..total {
        if seen[start] {
            continue;
        }
        let mut cycle_idx = vec![start];
        let mut cycle_num = vec![lattice.numerators(start)];
        seen[start] = true;
        loop {
            let next = map.apply_mod(cycle_num.last().unwrap(), modulus);
            let idx = lattice.index_of(&next);
            if idx == start {
                break;
            }
            seen[idx] = true;
            cycle_idx.push(idx);
            cycle_num.push(next);
        }
        debug_assert_eq!(n as usize % cycle_idx.len(), 0);
        // numerators share the denominator N, so their lexicographic order is the value order
        let rep = (0..cycle_num.len()).min_by(|&a, &b| cycle_num[a].cmp(&cycle_num[b])).unwrap();
        cycle_idx.rotate_left(rep);
        cycle_num.rotate_left(rep);
        let points = cycle_num.into_iter().map(|p| RationalPoint::new(p, lattice.modulus())).collect();
        orbits.push((cycle_idx.len(), PeriodicOrbit { points, indices: cycle_idx, weight }));
    }
    orbits.sort_by(|(ma, a), (mb, b)| {
        ma.cmp(mb).then_with(|| lattice.numerators(a.indices[0]).cmp(&lattice.numerators(b.indices[0])))
    });
    let orbits: Vec<PeriodicOrbit> = orbits.into_iter().map(|(_, o)| o).collect();
    let amplitude = amplitude_of(&orbits);
    Ok(OrbitTable { n, orbits, total_points: total as u64, amplitude, lattice })
}
