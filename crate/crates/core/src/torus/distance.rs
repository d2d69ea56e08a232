//! Minimal distance between distinct periodic points.
//!
//! `Per(n)` is a subgroup of the torus, so the distances between distinct
//! points are the torus norms of its nonzero elements, and the minimum is the
//! shortest vector of the lattice `(M^n - I)^{-1} Z^d` outside `Z^d`.

use super::orbits::OrbitTable;
use crate::error::{Error, Result};

/// Row-style Hermite reduction of integer generators to a basis of their span.
pub(crate) fn hermite_basis(mut rows: Vec<Vec<i64>>, d: usize) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i128>> = rows.drain(..).map(|r| r.into_iter().map(i128::from).collect()).collect();
    let mut basis = Vec::with_capacity(d);
    for col in 0..d {
        loop {
            let nonzero: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nonzero.len() <= 1 {
                if let Some(&i) = nonzero.first() {
                    basis.push(rows.swap_remove(i));
                }
                break;
            }
            let pivot = *nonzero.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            for &i in &nonzero {
                if i == pivot {
                    continue;
                }
                let f = rows[i][col].div_euclid(rows[pivot][col]);
                for c in 0..d {
                    rows[i][c] -= f * rows[pivot][c];
                }
            }
        }
    }
    basis.into_iter().map(|r| r.into_iter().map(|v| v as i64).collect()).collect()
}

fn norm_sq(v: &[i128]) -> i128 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(basis: &[Vec<i128>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let d = basis.len();
    let b: Vec<Vec<f64>> = basis.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut mu = vec![vec![0.0; d]; d];
    let mut norms = vec![0.0; d];
    for i in 0..d {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / norms[j];
            for (vk, sk) in v.iter_mut().zip(&star[j]) {
                *vk -= mu[i][j] * sk;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (mu, norms)
}

fn lll(mut basis: Vec<Vec<i128>>) -> Vec<Vec<i128>> {
    let d = basis.len();
    let mut k = 1;
    while k < d {
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&basis);
            let q = mu[k][j].round() as i128;
            if q != 0 {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
            }
        }
        let (mu, norms) = gram_schmidt(&basis);
        if norms[k] >= (0.75 - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    basis
}

/// Squared length of the shortest vector of the integer lattice spanned by
/// `basis` that is not in `modulus · Z^d`.
fn shortest_nontrivial(basis: Vec<Vec<i64>>, modulus: i64) -> i128 {
    let basis = lll(basis.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect());
    let d = basis.len();
    let trivial = |v: &[i128]| v.iter().all(|x| x.rem_euclid(modulus as i128) == 0);
    let mut best = basis
        .iter()
        .filter(|v| !trivial(v))
        .map(|v| norm_sq(v))
        .min()
        .expect("a nontrivial lattice contains a nontrivial basis vector");

    let (mu, norms) = gram_schmidt(&basis);
    let bound = best as f64 * (1.0 + 1e-9);
    let mut coeffs = vec![0i128; d];
    let mut search = |coeffs: &mut Vec<i128>| {
        let v: Vec<i128> = (0..d).map(|c| (0..d).map(|i| coeffs[i] * basis[i][c]).sum()).collect();
        let n = norm_sq(&v);
        if n > 0 && n < best && !trivial(&v) {
            best = n;
        }
    };
    enumerate(d, &mu, &norms, bound, &mut coeffs, 0.0, &mut search);
    best
}

fn enumerate(
    level: usize,
    mu: &[Vec<f64>],
    norms: &[f64],
    bound: f64,
    coeffs: &mut Vec<i128>,
    partial: f64,
    visit: &mut dyn FnMut(&mut Vec<i128>),
) {
    if level == 0 {
        visit(coeffs);
        return;
    }
    let i = level - 1;
    let d = coeffs.len();
    let center: f64 = -(i + 1..d).map(|j| coeffs[j] as f64 * mu[j][i]).sum::<f64>();
    let radius = ((bound - partial).max(0.0) / norms[i]).sqrt();
    let lo = (center - radius).ceil() as i128;
    let hi = (center + radius).floor() as i128;
    for x in lo..=hi {
        coeffs[i] = x;
        let t = x as f64 - center;
        let next = partial + t * t * norms[i];
        if next <= bound {
            enumerate(i, mu, norms, bound, coeffs, next, visit);
        }
    }
    coeffs[i] = 0;
}

/// Minimal flat-torus distance between two distinct points of the table.
pub fn min_periodic_distance(table: &OrbitTable) -> Result<f64> {
    if table.total_points() < 2 {
        return Err(Error::Degenerate(format!("period {} has a single periodic point", table.n())));
    }
    let lat = table.lattice();
    let n2 = shortest_nontrivial(lat.scaled_basis(), lat.modulus() as i64);
    Ok((n2 as f64).sqrt() / lat.modulus() as f64)
}

/// All-pairs minimal torus distance; quadratic in the number of points.
pub fn min_periodic_distance_brute_force(table: &OrbitTable) -> Result<f64> {
    let points: Vec<Vec<f64>> = table.points().map(|p| p.to_f64()).collect();
    if points.len() < 2 {
        return Err(Error::Degenerate(format!("period {} has a single periodic point", table.n())));
    }
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d2: f64 = a
                .iter()
                .zip(b)
                .map(|(x, y)| {
                    let t = x - y;
                    let t = t - t.round();
                    t * t
                })
                .sum();
            best = best.min(d2);
        }
    }
    Ok(best.sqrt())
}

/// Largest `C` with `dist_n ≥ C · Λ'^{-n/2}` over the supplied `(n, dist_n)`.
pub fn fitted_separation_constant(samples: &[(u32, f64)], lambda_prime: f64) -> f64 {
    samples
        .iter()
        .map(|&(n, dist)| dist * lambda_prime.powf(n as f64 / 2.0))
        .fold(f64::INFINITY, f64::min)
}
