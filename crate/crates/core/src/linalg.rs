//! Exact dense linear algebra over the rationals and small integer matrices.

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type RatMatrix = Vec<Vec<Rational>>;

/// Solves `a * x = b_k` for every right-hand side `b_k` by Gauss-Jordan
/// elimination. Returns `None` when `a` is singular.
pub fn solve_many(a: &[Vec<Rational>], rhs: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let m = rhs.len();
    // Augmented matrix [a | b_0 ... b_{m-1}].
    let mut aug: RatMatrix = (0..n)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend(rhs.iter().map(|b| b[i].clone()));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                let (pivot_row, row) = if r < col {
                    let (lo, hi) = aug.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = aug.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(
        (0..m)
            .map(|k| (0..n).map(|i| aug[i][n + k].clone()).collect())
            .collect(),
    )
}

pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    solve_many(a, &[b.to_vec()]).map(|mut v| v.pop().unwrap())
}

pub fn inverse(a: &[Vec<Rational>]) -> Option<RatMatrix> {
    let n = a.len();
    let unit: Vec<Vec<Rational>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| if i == k { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    // Columns of the inverse come back as solution vectors.
    let cols = solve_many(a, &unit)?;
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for c in col..n {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
    }
    det
}

/// Determinant of a small integer matrix by fraction-free (Bareiss)
/// elimination. Every intermediate value is itself a minor of the input.
pub fn int_determinant(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m = a.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Rank of an integer matrix given by rows.
pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: RatMatrix = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let Some(ncols) = m.first().map(Vec::len) else {
        return 0;
    };
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for c in col..ncols {
                    let delta = &f * &m[rank][c];
                    m[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Generalised cross product of `d - 1` vectors in `Z^d`: the vector of signed
/// maximal minors, orthogonal to all inputs and zero iff they are dependent.
pub fn cross_product(vectors: &[Vec<i64>], d: usize) -> Vec<i128> {
    debug_assert_eq!(vectors.len() + 1, d);
    (0..d)
        .map(|skip| {
            let minor: Vec<Vec<i128>> = vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != skip)
                        .map(|(_, &x)| x as i128)
                        .collect()
                })
                .collect();
            let det = int_determinant(&minor);
            if (skip + d + 1).is_multiple_of(2) {
                det
            } else {
                -det
            }
        })
        .collect()
}
