//! Integer points and symmetric tensors.
//!
//! A [`SymTensor`] of rank `r` on `R^d` stores one entry per sorted
//! multi-index `i_1 <= ... <= i_r`, in lexicographic order, so the storage is
//! a dense vector of length `C(d + r - 1, r)`. Entries are exact rationals.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, from_i128, Rational};

/// A lattice point of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoint(pub Vec<i64>);

impl IntPoint {
    pub fn new(coords: Vec<i64>) -> Self {
        IntPoint(coords)
    }

    pub fn origin(dim: usize) -> Self {
        IntPoint(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dot(&self, other: &[i64]) -> i128 {
        self.0
            .iter()
            .zip(other)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }

    pub fn scaled(&self, k: i64) -> IntPoint {
        IntPoint(self.0.iter().map(|&x| x * k).collect())
    }

    pub fn to_rational(&self) -> Vec<Rational> {
        self.0.iter().map(|&x| Rational::from_integer(x.into())).collect()
    }
}

impl Index<usize> for IntPoint {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl Add for &IntPoint {
    type Output = IntPoint;
    fn add(self, rhs: &IntPoint) -> IntPoint {
        IntPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &IntPoint {
    type Output = IntPoint;
    fn sub(self, rhs: &IntPoint) -> IntPoint {
        IntPoint(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for IntPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// All sorted multi-indices of length `rank` over `0..dim`, in lexicographic
/// order.
pub fn multi_indices(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, rank: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == rank {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, rank, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, rank, 0, &mut Vec::with_capacity(rank), &mut out);
    out
}

/// Number of distinct orderings of a sorted multi-index.
fn multiplicity(index: &[usize]) -> BigInt {
    let mut m = factorial(index.len());
    let mut i = 0;
    while i < index.len() {
        let j = index[i..].iter().take_while(|&&x| x == index[i]).count();
        m /= factorial(j);
        i += j;
    }
    m
}

/// Symmetric tensor of rank `r` on `R^d` with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymTensor {
    rank: usize,
    dim: usize,
    entries: Vec<Rational>,
}

impl SymTensor {
    pub fn zeros(rank: usize, dim: usize) -> Self {
        let len = binomial((dim + rank) as i64 - 1, rank as i64);
        let len = if rank == 0 { 1 } else { usize::try_from(len).unwrap() };
        SymTensor {
            rank,
            dim,
            entries: vec![Rational::zero(); len],
        }
    }

    pub fn scalar(value: Rational, dim: usize) -> Self {
        SymTensor {
            rank: 0,
            dim,
            entries: vec![value],
        }
    }

    pub fn from_vector(v: &[Rational]) -> Self {
        SymTensor {
            rank: 1,
            dim: v.len(),
            entries: v.to_vec(),
        }
    }

    /// Builds a rank-2 tensor from a symmetric matrix.
    pub fn from_matrix(m: &[Vec<Rational>]) -> Result<Self> {
        let d = m.len();
        for (i, row) in m.iter().enumerate() {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            for j in 0..i {
                if m[i][j] != m[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let entries = multi_indices(d, 2)
            .into_iter()
            .map(|ix| m[ix[0]][ix[1]].clone())
            .collect();
        Ok(SymTensor { rank: 2, dim: d, entries })
    }

    /// Builds a tensor from entries listed in the order of [`multi_indices`].
    pub fn from_entries(rank: usize, dim: usize, entries: Vec<Rational>) -> Result<Self> {
        let t = SymTensor::zeros(rank, dim);
        if entries.len() != t.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: t.entries.len(),
                found: entries.len(),
            });
        }
        Ok(SymTensor { rank, dim, entries })
    }

    pub(crate) fn from_integer_entries(rank: usize, dim: usize, entries: &[i128]) -> Self {
        SymTensor {
            rank,
            dim,
            entries: entries.iter().map(|&x| from_i128(x)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entries in the order of [`multi_indices`]`(dim, rank)`.
    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn position(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: index.len() });
        }
        if let Some(&bad) = index.iter().find(|&&i| i >= self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: bad + 1 });
        }
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        // Lexicographic rank of a sorted multi-index.
        let mut pos = 0usize;
        let mut lo = 0usize;
        for (k, &i) in sorted.iter().enumerate() {
            let remaining = self.rank - k - 1;
            for j in lo..i {
                pos += count_sorted(self.dim - j, remaining);
            }
            lo = i;
        }
        Ok(pos)
    }

    /// Entry at a multi-index given in any order (0-based).
    pub fn get(&self, index: &[usize]) -> Result<&Rational> {
        Ok(&self.entries[self.position(index)?])
    }

    /// The value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<&Rational> {
        (self.rank == 0).then(|| &self.entries[0])
    }

    /// Rank-2 tensor as a full symmetric `d x d` matrix.
    pub fn to_matrix(&self) -> Result<Vec<Vec<Rational>>> {
        if self.rank != 2 {
            return Err(Error::RankMismatch { expected: 2, found: self.rank });
        }
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(&[i, j]).unwrap().clone()).collect())
            .collect())
    }

    /// Diagonal evaluation `T(v, ..., v)`.
    pub fn apply(&self, v: &[Rational]) -> Result<Rational> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        let mut total = Rational::zero();
        for (ix, t) in multi_indices(self.dim, self.rank).iter().zip(&self.entries) {
            if t.is_zero() {
                continue;
            }
            let mut term = t * Rational::from_integer(multiplicity(ix));
            for &i in ix {
                term *= &v[i];
            }
            total += term;
        }
        Ok(total)
    }

    fn check_compatible(&self, other: &SymTensor) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, found: other.rank });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &SymTensor) -> Result<SymTensor> {
        self.check_compatible(other)?;
        Ok(SymTensor {
            rank: self.rank,
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &SymTensor) -> Result<SymTensor> {
        self.check_compatible(other)?;
        Ok(SymTensor {
            rank: self.rank,
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, k: &Rational) -> SymTensor {
        SymTensor {
            rank: self.rank,
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * k).collect(),
        }
    }

    /// Symmetric product normalised so that `x^a ⊙ x^b = x^(a+b)`; for two
    /// vectors this is `(uv + vu) / 2`.
    pub fn sym_product(&self, other: &SymTensor) -> Result<SymTensor> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let (a, b) = (self.rank, other.rank);
        let rank = a + b;
        let norm = Rational::from_integer(binomial(rank as i64, a as i64)).recip();
        let subsets = position_subsets(rank, a);
        let entries = multi_indices(self.dim, rank)
            .iter()
            .map(|ix| {
                let mut acc = Rational::zero();
                for chosen in &subsets {
                    let left: Vec<usize> = chosen.iter().map(|&p| ix[p]).collect();
                    let right: Vec<usize> =
                        (0..rank).filter(|p| !chosen.contains(p)).map(|p| ix[p]).collect();
                    acc += self.get(&left).unwrap() * other.get(&right).unwrap();
                }
                acc * &norm
            })
            .collect();
        Ok(SymTensor { rank, dim: self.dim, entries })
    }

    /// Pushes the tensor forward along the linear map `m: R^k -> R^n`
    /// (`m` given as `n` rows of length `k`), so that
    /// `result(w, ..., w) = self(m^t w, ..., m^t w)`.
    pub fn push_forward(&self, m: &[Vec<Rational>]) -> Result<SymTensor> {
        let n = m.len();
        if let Some(row) = m.iter().find(|row| row.len() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: row.len() });
        }
        let tuples = all_tuples(self.dim, self.rank);
        let entries = multi_indices(n, self.rank)
            .iter()
            .map(|ix| {
                let mut acc = Rational::zero();
                for t in &tuples {
                    let mut term = self.get(t).unwrap().clone();
                    if term.is_zero() {
                        continue;
                    }
                    for (&i, &j) in ix.iter().zip(t) {
                        term *= &m[i][j];
                    }
                    acc += term;
                }
                acc
            })
            .collect();
        Ok(SymTensor { rank: self.rank, dim: n, entries })
    }
}

/// Number of sorted multi-indices of length `len` over an alphabet of `n`.
fn count_sorted(n: usize, len: usize) -> usize {
    if len == 0 {
        return 1;
    }
    if n == 0 {
        return 0;
    }
    usize::try_from(binomial((n + len - 1) as i64, len as i64)).unwrap()
}

fn position_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn all_tuples(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..dim).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// `x^r = x ⊗ ... ⊗ x`, with `x^0 = 1`.
pub fn outer_power(x: &IntPoint, r: usize) -> SymTensor {
    let entries: Vec<i128> = multi_indices(x.dim(), r)
        .iter()
        .map(|ix| ix.iter().map(|&i| x[i] as i128).product())
        .collect();
    SymTensor::from_integer_entries(r, x.dim(), &entries)
}

/// `v^r` for a rational vector.
pub fn outer_power_rational(v: &[Rational], r: usize) -> SymTensor {
    let entries = multi_indices(v.len(), r)
        .iter()
        .map(|ix| ix.iter().fold(Rational::one(), |acc, &i| acc * &v[i]))
        .collect();
    SymTensor { rank: r, dim: v.len(), entries }
}

impl Add for &SymTensor {
    type Output = SymTensor;
    /// Panics on rank or dimension mismatch; see [`SymTensor::checked_add`].
    fn add(self, rhs: &SymTensor) -> SymTensor {
        self.checked_add(rhs).expect("SymTensor addition")
    }
}

impl Sub for &SymTensor {
    type Output = SymTensor;
    fn sub(self, rhs: &SymTensor) -> SymTensor {
        self.checked_sub(rhs).expect("SymTensor subtraction")
    }
}

impl Neg for &SymTensor {
    type Output = SymTensor;
    fn neg(self) -> SymTensor {
        self.scale(&-Rational::one())
    }
}

impl Mul<&Rational> for &SymTensor {
    type Output = SymTensor;
    fn mul(self, k: &Rational) -> SymTensor {
        self.scale(k)
    }
}

/// Accumulates integer moment sums `Σ x^r` without going through rationals.
pub(crate) struct MomentAccumulator {
    rank: usize,
    dim: usize,
    indices: Vec<Vec<usize>>,
    sums: Vec<i128>,
}

impl MomentAccumulator {
    pub fn new(rank: usize, dim: usize) -> Self {
        let indices = multi_indices(dim, rank);
        let sums = vec![0; indices.len()];
        MomentAccumulator { rank, dim, indices, sums }
    }

    pub fn add(&mut self, x: &[i64]) {
        for (ix, s) in self.indices.iter().zip(self.sums.iter_mut()) {
            let term = ix
                .iter()
                .try_fold(1i128, |acc, &i| acc.checked_mul(x[i] as i128))
                .expect("moment term overflows i128");
            *s = s.checked_add(term).expect("moment sum overflows i128");
        }
    }

    pub fn finish(self) -> SymTensor {
        SymTensor::from_integer_entries(self.rank, self.dim, &self.sums)
    }
}

/// Polynomial in `n` with symmetric-tensor coefficients, `coeffs[k]` being
/// the coefficient of `n^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorPolynomial {
    pub coeffs: Vec<SymTensor>,
}

impl TensorPolynomial {
    pub fn rank(&self) -> usize {
        self.coeffs[0].rank()
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].dim()
    }

    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&SymTensor> {
        self.coeffs.get(k)
    }

    pub fn evaluate(&self, n: &Rational) -> SymTensor {
        // Horner
        let mut acc = SymTensor::zeros(self.rank(), self.dim());
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(n) + c;
        }
        acc
    }
}

/// The `h^r`-vector `(h_0, ..., h_{d+r})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HrVector {
    pub entries: Vec<SymTensor>,
}

impl HrVector {
    pub fn rank(&self) -> usize {
        self.entries[0].rank()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expands `Σ_i h_i C(n + D - i, D)` with `D = len - 1` into the monomial
    /// basis.
    pub fn to_polynomial(&self) -> TensorPolynomial {
        let big_d = self.entries.len() - 1;
        let mut coeffs = vec![SymTensor::zeros(self.rank(), self.dim()); big_d + 1];
        for (i, h) in self.entries.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let basis = shifted_binomial_poly(big_d as i64 - i as i64, big_d);
            for (k, c) in basis.iter().enumerate() {
                if !c.is_zero() {
                    coeffs[k] = &coeffs[k] + &h.scale(c);
                }
            }
        }
        TensorPolynomial { coeffs }
    }

    /// Sum of all entries.
    pub fn total(&self) -> SymTensor {
        self.entries
            .iter()
            .fold(SymTensor::zeros(self.rank(), self.dim()), |acc, h| &acc + h)
    }
}

/// Coefficients in `n` of `C(n + shift, big_d) = Π_{k=1..D} (n + shift - D + k) / k`.
pub fn shifted_binomial_poly(shift: i64, big_d: usize) -> Vec<Rational> {
    let mut poly = vec![Rational::one()];
    for k in 1..=big_d as i64 {
        let c = Rational::from_integer((shift - big_d as i64 + k).into());
        let mut next = vec![Rational::zero(); poly.len() + 1];
        for (i, p) in poly.iter().enumerate() {
            next[i] += p * &c;
            next[i + 1] += p;
        }
        poly = next;
    }
    let denom = Rational::from_integer(factorial(big_d)).recip();
    poly.iter().map(|p| p * &denom).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn mat(rows: &[&[i64]]) -> SymTensor {
        let m: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        SymTensor::from_matrix(&m).unwrap()
    }

    #[test]
    fn outer_power_examples() {
        assert_eq!(outer_power(&IntPoint(vec![1, 2]), 2), mat(&[&[1, 2], &[2, 4]]));
        let s = outer_power(&IntPoint(vec![5, -3]), 0);
        assert_eq!(s.as_scalar(), Some(&int(1)));
        let z = outer_power(&IntPoint(vec![0, 0]), 3);
        assert_eq!(z.rank(), 3);
        assert!(z.is_zero());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(mat(&[&[1, 0], &[0, 1]]).apply(&[int(3), int(4)]).unwrap(), int(25));
        assert_eq!(mat(&[&[1, 1], &[1, 1]]).apply(&[int(1), int(-1)]).unwrap(), int(0));
        let t = outer_power(&IntPoint(vec![1, 2]), 2);
        assert_eq!(t.apply(&[int(2), int(1)]).unwrap(), int(16));
        assert!(matches!(
            t.apply(&[int(1)]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn linear_examples() {
        let i = mat(&[&[1, 0], &[0, 1]]);
        let j = mat(&[&[1, 1], &[1, 1]]);
        assert_eq!(&i + &j, mat(&[&[2, 1], &[1, 2]]));
        let half = mat(&[&[1, 2], &[2, 4]]).scale(&rat(1, 2));
        let expected = SymTensor::from_matrix(&[vec![rat(1, 2), int(1)], vec![int(1), int(2)]]).unwrap();
        assert_eq!(half, expected);
        assert!((&i - &i).is_zero());
        let v = SymTensor::from_vector(&[int(1), int(2)]);
        assert!(matches!(i.checked_add(&v), Err(Error::RankMismatch { .. })));
        let i3 = SymTensor::zeros(2, 3);
        assert!(matches!(i.checked_sub(&i3), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn position_matches_enumeration_order() {
        for (d, r) in [(1, 3), (2, 2), (3, 3), (4, 2), (4, 4), (3, 0)] {
            let t = SymTensor::zeros(r, d);
            for (k, ix) in multi_indices(d, r).iter().enumerate() {
                assert_eq!(t.position(ix).unwrap(), k);
                let mut rev = ix.clone();
                rev.reverse();
                assert_eq!(t.position(&rev).unwrap(), k);
            }
            assert_eq!(t.entries().len(), multi_indices(d, r).len());
        }
    }

    #[test]
    fn sym_product_of_vectors() {
        let u = SymTensor::from_vector(&[int(1), int(0)]);
        let v = SymTensor::from_vector(&[int(0), int(1)]);
        let p = u.sym_product(&v).unwrap();
        let expected = SymTensor::from_matrix(&[vec![int(0), rat(1, 2)], vec![rat(1, 2), int(0)]]).unwrap();
        assert_eq!(p, expected);
        let x = IntPoint(vec![2, -1, 3]);
        assert_eq!(
            outer_power(&x, 1).sym_product(&outer_power(&x, 2)).unwrap(),
            outer_power(&x, 3)
        );
    }

    #[test]
    fn binomial_basis_polynomials() {
        // C(n + 2, 2) = (n^2 + 3n + 2) / 2
        assert_eq!(shifted_binomial_poly(2, 2), vec![int(1), rat(3, 2), rat(1, 2)]);
        // C(n, 2) = (n^2 - n) / 2
        assert_eq!(shifted_binomial_poly(0, 2), vec![int(0), rat(-1, 2), rat(1, 2)]);
    }
}
