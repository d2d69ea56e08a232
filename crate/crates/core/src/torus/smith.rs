//! Smith normal form of square integer matrices over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn identity(d: usize) -> IntMatrix {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn from_i64(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

pub fn mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(BigInt::zero(), |acc, l| acc + &a[i][l] * &b[l][j]))
                .collect()
        })
        .collect()
}

pub fn pow(a: &IntMatrix, mut e: u32) -> IntMatrix {
    let mut result = identity(a.len());
    let mut base = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base);
        }
    }
    result
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(a: &IntMatrix) -> BigInt {
    let n = a.len();
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `row_ops · A · col_ops = diag(factors)` with `factors[i] | factors[i+1]`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub factors: Vec<BigInt>,
    pub row_ops: IntMatrix,
    pub col_ops: IntMatrix,
    pub col_ops_inv: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let d = a.len();
    let mut m = a.clone();
    let mut p = identity(d);
    let mut q = identity(d);
    let mut qinv = identity(d);

    for t in 0..d {
        loop {
            // pivot: smallest nonzero |entry| in the trailing block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..d {
                for j in t..d {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    if pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else { break };
            if pi != t {
                m.swap(pi, t);
                p.swap(pi, t);
            }
            if pj != t {
                for row in m.iter_mut().chain(q.iter_mut()) {
                    row.swap(pj, t);
                }
                qinv.swap(pj, t);
            }

            let mut clean = true;
            for i in t + 1..d {
                if m[i][t].is_zero() {
                    continue;
                }
                let f = m[i][t].div_floor(&m[t][t]);
                for j in 0..d {
                    let v = &f * &m[t][j];
                    m[i][j] -= v;
                    let v = &f * &p[t][j];
                    p[i][j] -= v;
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..d {
                if m[t][j].is_zero() {
                    continue;
                }
                let f = m[t][j].div_floor(&m[t][t]);
                // col_j -= f * col_t
                for row in m.iter_mut().chain(q.iter_mut()) {
                    let v = &f * &row[t];
                    row[j] -= v;
                }
                // inverse op on rows: row_t += f * row_j
                for k in 0..d {
                    let v = &f * &qinv[j][k];
                    qinv[t][k] += v;
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }

            // divisibility of the trailing block by the pivot
            let bad_row = (t + 1..d).find(|&i| (t + 1..d).any(|j| !m[i][j].is_multiple_of(&m[t][t])));
            match bad_row {
                Some(i) => {
                    for j in 0..d {
                        let v = m[i][j].clone();
                        m[t][j] += v;
                        let v = p[i][j].clone();
                        p[t][j] += v;
                    }
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for j in 0..d {
                m[t][j] = -&m[t][j];
                p[t][j] = -&p[t][j];
            }
        }
    }

    SmithForm { factors: (0..d).map(|i| m[i][i].clone()).collect(), row_ops: p, col_ops: q, col_ops_inv: qinv }
}
