//! Half-open lattice simplices: box points of the lifted cone, Eulerian
//! polynomials, the generating-function formula for their `h^r`-vectors and
//! the closed forms for polygons.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::ehrhart::{discrete_moment, LatticeBody};
use crate::error::{Error, Result};
use crate::linalg::int_determinant;
use crate::polytope::{convex_hull, EmbeddedPolytope, Polytope};
use crate::rational::{binomial, int, multinomial, Rational};
use crate::tensor::{multi_indices, outer_power, HrVector, IntPoint, MomentAccumulator, SymTensor};
use crate::triangulation::{HalfOpenCell, Triangulation};

/// Univariate polynomial with integer coefficients, `coeffs[k]` multiplying
/// `t^k`. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    pub coeffs: Vec<BigInt>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn one() -> Self {
        UniPoly::new(vec![BigInt::one()])
    }

    /// `(1 - t)^k`.
    pub fn one_minus_t_pow(k: usize) -> Self {
        UniPoly::new(
            (0..=k)
                .map(|i| {
                    let c = binomial(k as i64, i as i64);
                    if i % 2 == 1 { -c } else { c }
                })
                .collect(),
        )
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UniPoly::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }
}

/// The Eulerian polynomial
/// `A_j(t) = Σ_{n=0}^{j} Σ_{i=0}^{n} (-1)^i C(j+1, i) (n-i)^j t^n`
/// with `0^0 = 1`, so that `Σ_n n^j t^n = A_j(t) / (1-t)^{j+1}`.
pub fn eulerian_polynomial(j: usize) -> UniPoly {
    UniPoly::new(
        (0..=j)
            .map(|n| {
                (0..=n).fold(BigInt::zero(), |acc, i| {
                    let term = binomial(j as i64 + 1, i as i64) * BigInt::from(n - i).pow(j as u32);
                    if i % 2 == 1 { acc - term } else { acc + term }
                })
            })
            .collect(),
    )
}

/// A lattice simplex with some of its facets removed. Facet `i` is the one
/// opposite `vertices[i]`; indices in `removed` are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfOpenSimplex {
    vertices: Vec<IntPoint>,
    removed: Vec<usize>,
    /// Adjugate of the lifted vertex matrix (columns `(v_i, 1)`), so that
    /// `det * λ = adj * (x, n)`.
    adj: Vec<Vec<i128>>,
    det: i128,
}

/// Wire format `{"vertices": [[...], ...], "removed": [i, ...]}` with
/// 1-based facet indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfOpenSimplexJson {
    pub vertices: Vec<Vec<i64>>,
    pub removed: Vec<usize>,
}

fn lifted_matrix(vertices: &[IntPoint]) -> Vec<Vec<i128>> {
    let d = vertices[0].dim();
    (0..=d)
        .map(|row| {
            vertices
                .iter()
                .map(|v| if row < d { v[row] as i128 } else { 1 })
                .collect()
        })
        .collect()
}

fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let k = m.len();
    let minor = |skip_r: usize, skip_c: usize| -> i128 {
        let sub: Vec<Vec<i128>> = (0..k)
            .filter(|&r| r != skip_r)
            .map(|r| (0..k).filter(|&c| c != skip_c).map(|c| m[r][c]).collect())
            .collect();
        int_determinant(&sub)
    };
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let s = minor(j, i);
                    if (i + j) % 2 == 0 { s } else { -s }
                })
                .collect()
        })
        .collect()
}

impl HalfOpenSimplex {
    /// `d + 1` affinely independent points of `Z^d` and the 0-based indices
    /// of the removed facets. Removing every facet is rejected: the result
    /// is no longer a half-open simplex in the sense of a visibility
    /// decomposition and its `h^r`-vector does not fit in `d + r + 1` slots.
    pub fn new(vertices: Vec<IntPoint>, removed: Vec<usize>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::InvalidInput("simplex needs vertices".into()));
        };
        let d = first.dim();
        if vertices.len() != d + 1 {
            return Err(Error::InvalidInput(format!(
                "a simplex in R^{d} needs {} vertices, got {}",
                d + 1,
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: v.dim() });
        }
        let mut removed = removed;
        removed.sort_unstable();
        removed.dedup();
        if removed.iter().any(|&i| i > d) {
            return Err(Error::InvalidInput(format!("facet index out of range 0..={d}")));
        }
        if removed.len() == d + 1 {
            return Err(Error::InvalidInput("cannot remove every facet".into()));
        }
        let m = lifted_matrix(&vertices);
        let det = int_determinant(&m);
        if det == 0 {
            return Err(Error::Degenerate { affine_dim: crate::polytope::affine_dim(&vertices), ambient_dim: d });
        }
        let adj = adjugate(&m);
        Ok(HalfOpenSimplex { vertices, removed, adj, det })
    }

    pub fn closed(vertices: Vec<IntPoint>) -> Result<Self> {
        Self::new(vertices, vec![])
    }

    pub fn from_json(json: &HalfOpenSimplexJson) -> Result<Self> {
        if json.removed.contains(&0) {
            return Err(Error::InvalidInput("facet indices are 1-based".into()));
        }
        Self::new(
            json.vertices.iter().map(|v| IntPoint(v.clone())).collect(),
            json.removed.iter().map(|i| i - 1).collect(),
        )
    }

    pub fn to_json(&self) -> HalfOpenSimplexJson {
        HalfOpenSimplexJson {
            vertices: self.vertices.iter().map(|v| v.0.clone()).collect(),
            removed: self.removed.iter().map(|i| i + 1).collect(),
        }
    }

    /// The cell of a half-open decomposition as a simplex.
    pub fn from_cell(t: &Triangulation, cell: &HalfOpenCell) -> Result<Self> {
        Self::new(cell.simplex.iter().map(|&i| t.points()[i].clone()).collect(), cell.removed.clone())
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[IntPoint] {
        &self.vertices
    }

    pub fn removed(&self) -> &[usize] {
        &self.removed
    }

    /// Normalised volume `|det(v̄_1, ..., v̄_{d+1})|`.
    pub fn normalized_volume(&self) -> u128 {
        self.det.unsigned_abs()
    }

    /// The same half-open simplex moved by `t`.
    pub fn translate(&self, t: &IntPoint) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| v + t).collect(), self.removed.clone())
    }

    /// `det * λ(z)` for the lifted point `z = (x, n)`, sign-normalised so
    /// that `det > 0`.
    fn scaled_barycentric(&self, x: &[i64], n: i64) -> (Vec<i128>, i128) {
        let d = self.dim();
        let s = self.det.signum();
        let lam = self
            .adj
            .iter()
            .map(|row| {
                let v: i128 = (0..d).map(|k| row[k] * x[k] as i128).sum::<i128>() + row[d] * n as i128;
                s * v
            })
            .collect();
        (lam, self.det.abs())
    }

    fn is_removed(&self, i: usize) -> bool {
        self.removed.binary_search(&i).is_ok()
    }

    /// Whether `x` lies in `n S*`.
    pub fn contains(&self, x: &[i64], n: i64) -> bool {
        let (lam, _) = self.scaled_barycentric(x, n);
        lam.iter()
            .enumerate()
            .all(|(i, &l)| if self.is_removed(i) { l > 0 } else { l >= 0 })
    }

    fn closed_polytope(&self) -> Polytope {
        convex_hull(&self.vertices).expect("vertices are affinely independent")
    }
}

/// Integer points of the half-open parallelepiped of the lifted cone, grouped
/// by height and projected to `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxSlices {
    pub slices: Vec<Vec<IntPoint>>,
}

impl BoxSlices {
    pub fn total(&self) -> usize {
        self.slices.iter().map(Vec::len).sum()
    }
}

/// Scans the integer bounding box of `Π = {Σ λ_i v̄_i}` with
/// `0 < λ_i <= 1` for removed facets and `0 <= λ_i < 1` otherwise.
pub fn box_slices(s: &HalfOpenSimplex) -> BoxSlices {
    let d = s.dim();
    let lifted: Vec<Vec<i64>> = s
        .vertices
        .iter()
        .map(|v| v.0.iter().copied().chain([1]).collect())
        .collect();
    let ranges: Vec<(i64, i64)> = (0..=d)
        .map(|k| {
            let lo = lifted.iter().map(|v| v[k].min(0)).sum();
            let hi = lifted.iter().map(|v| v[k].max(0)).sum();
            (lo, hi)
        })
        .collect();
    let mut slices = vec![Vec::new(); d + 1];
    let mut z = vec![0i64; d + 1];
    scan_box(s, &ranges, 0, &mut z, &mut slices);
    for sl in &mut slices {
        sl.sort();
    }
    BoxSlices { slices }
}

fn scan_box(s: &HalfOpenSimplex, ranges: &[(i64, i64)], k: usize, z: &mut Vec<i64>, out: &mut [Vec<IntPoint>]) {
    if k == ranges.len() {
        let d = s.dim();
        let (lam, det) = s.scaled_barycentric(&z[..d], z[d]);
        let inside = lam.iter().enumerate().all(|(i, &l)| {
            if s.is_removed(i) {
                l > 0 && l <= det
            } else {
                l >= 0 && l < det
            }
        });
        if inside {
            out[z[d] as usize].push(IntPoint(z[..d].to_vec()));
        }
        return;
    }
    for v in ranges[k].0..=ranges[k].1 {
        z[k] = v;
        scan_box(s, ranges, k + 1, z, out);
    }
}

/// `Σ_{x ∈ S_i} x^r` for each slice.
fn slice_moments(b: &BoxSlices, r: usize, d: usize) -> Vec<SymTensor> {
    b.slices
        .iter()
        .map(|sl| {
            let mut acc = MomentAccumulator::new(r, d);
            for x in sl {
                acc.add(&x.0);
            }
            acc.finish()
        })
        .collect()
}

const MAX_FORMULA_RANK: usize = 2;

/// `h^r`-vector of a half-open simplex from the generating function
/// `Σ_k C(r; k) v_1^{k_1} ⋯ v_{d+1}^{k_{d+1}} (1-t)^{k_0} A_{k_1}(t) ⋯ A_{k_{d+1}}(t) Σ_i L^{k_0}(S_i) t^i`
/// over `(1-t)^{d+r+1}`, for `r <= 2`.
pub fn hr_halfopen(s: &HalfOpenSimplex, r: usize) -> Result<HrVector> {
    if r > MAX_FORMULA_RANK {
        return Err(Error::UnsupportedRank { rank: r, max: MAX_FORMULA_RANK });
    }
    let d = s.dim();
    let b = box_slices(s);
    let slice_mom: Vec<Vec<SymTensor>> = (0..=r).map(|k0| slice_moments(&b, k0, d)).collect();
    let mut numer = vec![SymTensor::zeros(r, d); d + r + 1];
    // Each sorted multi-index over the d + 2 slots (slot 0 for the slice
    // moment, slot i for vertex i) is one composition k of r.
    for choice in multi_indices(d + 2, r) {
        let mut k = vec![0usize; d + 2];
        for &c in &choice {
            k[c] += 1;
        }
        let mut vpart = SymTensor::scalar(Rational::from_integer(multinomial(&k)), d);
        let mut poly = UniPoly::one_minus_t_pow(k[0]);
        for i in 1..=d + 1 {
            if k[i] > 0 {
                vpart = vpart.sym_product(&outer_power(&s.vertices[i - 1], k[i]))?;
                poly = poly.mul(&eulerian_polynomial(k[i]));
            }
        }
        for (height, m) in slice_mom[k[0]].iter().enumerate() {
            if m.is_zero() && k[0] > 0 {
                continue;
            }
            let term = vpart.sym_product(m)?;
            for (e, c) in poly.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    let slot = &mut numer[height + e];
                    *slot = &*slot + &term.scale(&Rational::from_integer(c.clone()));
                }
            }
        }
    }
    Ok(HrVector { entries: numer })
}

/// `L^r(n S*)` by enumerating `nS` and dropping points on removed facets.
pub fn moment_halfopen(s: &HalfOpenSimplex, r: usize, n: u64) -> SymTensor {
    let mut acc = MomentAccumulator::new(r, s.dim());
    s.closed_polytope().for_each_lattice_point(n, false, &mut |x| {
        if s.contains(x, n as i64) {
            acc.add(x);
        }
    });
    acc.finish()
}

/// `L^r(n S*)` by inclusion–exclusion over the faces `F_J = ∩_{j ∈ J} F_j`,
/// `J ⊆ I`: `Σ_J (-1)^{|J|} L^r(n F_J)`, each face counted as a closed
/// lattice polytope in its own affine hull.
pub fn moment_halfopen_inclusion_exclusion(s: &HalfOpenSimplex, r: usize, n: u64) -> SymTensor {
    let d = s.dim();
    let mut acc = SymTensor::zeros(r, d);
    for mask in 0u32..(1 << s.removed.len()) {
        let j: Vec<usize> = (0..s.removed.len()).filter(|b| mask >> b & 1 == 1).map(|b| s.removed[b]).collect();
        let face: Vec<IntPoint> = (0..=d).filter(|i| !j.contains(i)).map(|i| s.vertices[i].clone()).collect();
        let term = match face.len() {
            0 => SymTensor::zeros(r, d),
            1 => outer_power(&face[0].scaled(n as i64), r),
            _ => {
                let fp = EmbeddedPolytope::from_points(&face).expect("faces of a simplex are simplices");
                debug_assert_eq!(fp.intrinsic_dim(), face.len() - 1);
                discrete_moment(&fp, r, n)
            }
        };
        acc = if j.len().is_multiple_of(2) { &acc + &term } else { &acc - &term };
    }
    acc
}

fn require_triangle(s: &HalfOpenSimplex) -> Result<()> {
    if s.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: s.dim() });
    }
    Ok(())
}

/// `h^1_i = L^1(S_i) - L^1(S_{i-1}) + L(S_{i-1}) (v_1+v_2+v_3)` for a
/// half-open triangle.
pub fn h1_halfopen_2d(s: &HalfOpenSimplex) -> Result<HrVector> {
    require_triangle(s)?;
    let b = box_slices(s);
    let l0 = slice_moments(&b, 0, 2);
    let l1 = slice_moments(&b, 1, 2);
    let vsum = s.vertices.iter().fold(IntPoint::origin(2), |a, v| &a + v);
    let vsum = outer_power(&vsum, 1);
    let at = |v: &[SymTensor], i: isize, rank: usize| -> SymTensor {
        if i < 0 || i as usize >= v.len() { SymTensor::zeros(rank, 2) } else { v[i as usize].clone() }
    };
    let entries = (0..4isize)
        .map(|i| {
            let c = at(&l0, i - 1, 0).as_scalar().unwrap().clone();
            &(&at(&l1, i, 1) - &at(&l1, i - 1, 1)) + &vsum.scale(&c)
        })
        .collect();
    Ok(HrVector { entries })
}

/// For a half-open triangle:
///
/// ```text
/// h^2_i = L^2(S_i) - 2L^2(S_{i-1}) + L^2(S_{i-2})
///       + 2(v_1+v_2+v_3)(L^1(S_{i-1}) - L^1(S_{i-2}))
///       + (v_1²+v_2²+v_3²) L(S_{i-1}) + (v_1+v_2+v_3)² L(S_{i-2})
/// ```
pub fn h2_halfopen_2d(s: &HalfOpenSimplex) -> Result<HrVector> {
    require_triangle(s)?;
    let b = box_slices(s);
    let l: Vec<Vec<SymTensor>> = (0..=2).map(|k| slice_moments(&b, k, 2)).collect();
    let at = |rank: usize, i: isize| -> SymTensor {
        if i < 0 || i as usize >= l[rank].len() { SymTensor::zeros(rank, 2) } else { l[rank][i as usize].clone() }
    };
    let vsum = s.vertices.iter().fold(IntPoint::origin(2), |a, v| &a + v);
    let vsum1 = outer_power(&vsum, 1);
    let vsum2 = outer_power(&vsum, 2);
    let vsq = s.vertices.iter().fold(SymTensor::zeros(2, 2), |a, v| &a + &outer_power(v, 2));
    let two = int(2);
    let entries = (0..5isize)
        .map(|i| {
            let c1 = at(0, i - 1).as_scalar().unwrap().clone();
            let c2 = at(0, i - 2).as_scalar().unwrap().clone();
            let mut h = &(&at(2, i) - &at(2, i - 1).scale(&two)) + &at(2, i - 2);
            let diff = &at(1, i - 1) - &at(1, i - 2);
            h = &h + &vsum1.sym_product(&diff).unwrap().scale(&two);
            h = &h + &vsq.scale(&c1);
            &h + &vsum2.scale(&c2)
        })
        .collect();
    Ok(HrVector { entries })
}
