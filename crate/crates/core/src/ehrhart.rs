//! Discrete moment tensors, Ehrhart tensor polynomials, `h^r`-vectors,
//! reciprocity and the exact moment integrals behind the leading and
//! second-highest coefficients.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{cross_product, int_determinant, inverse};
use crate::polytope::{EmbeddedPolytope, Polytope};
use crate::rational::{binomial, factorial, Rational};
use crate::tensor::{multi_indices, outer_power, HrVector, IntPoint, MomentAccumulator, SymTensor, TensorPolynomial};

/// A finite family of lattice points indexed by dilation factor, such as the
/// lattice points of `nP` or of its relative interior.
pub trait LatticeBody: Sync {
    /// Dimension of the affine hull; the degree bound of the Ehrhart tensor
    /// polynomial is this plus the rank.
    fn intrinsic_dim(&self) -> usize;
    /// Dimension of the space the tensors live in.
    fn ambient_dim(&self) -> usize;
    fn for_each_point(&self, n: u64, interior: bool, f: &mut dyn FnMut(&[i64]));
}

impl LatticeBody for Polytope {
    fn intrinsic_dim(&self) -> usize {
        self.dim()
    }

    fn ambient_dim(&self) -> usize {
        self.dim()
    }

    fn for_each_point(&self, n: u64, interior: bool, f: &mut dyn FnMut(&[i64])) {
        self.for_each_lattice_point(n, interior, f)
    }
}

impl LatticeBody for EmbeddedPolytope {
    fn intrinsic_dim(&self) -> usize {
        self.local.dim()
    }

    fn ambient_dim(&self) -> usize {
        self.embedding.ambient_dim()
    }

    fn for_each_point(&self, n: u64, interior: bool, f: &mut dyn FnMut(&[i64])) {
        self.local.for_each_lattice_point(n, interior, &mut |y| {
            f(&self.embedding.lift(y, n as i64).0)
        })
    }
}

/// `L^r(nP) = Σ_{x ∈ nP ∩ Z^d} x^r`.
pub fn discrete_moment<B: LatticeBody + ?Sized>(body: &B, r: usize, n: u64) -> SymTensor {
    let mut acc = MomentAccumulator::new(r, body.ambient_dim());
    body.for_each_point(n, false, &mut |x| acc.add(x));
    acc.finish()
}

/// `L^r` of the relative interior of `nP`.
pub fn discrete_moment_interior<B: LatticeBody + ?Sized>(body: &B, r: usize, n: u64) -> SymTensor {
    let mut acc = MomentAccumulator::new(r, body.ambient_dim());
    body.for_each_point(n, true, &mut |x| acc.add(x));
    acc.finish()
}

/// `L^r(nP)` for `n = 0..count`, computed in parallel.
pub fn moments_up_to<B: LatticeBody + ?Sized>(body: &B, r: usize, count: usize) -> Vec<SymTensor> {
    (0..count as u64)
        .into_par_iter()
        .map(|n| discrete_moment(body, r, n))
        .collect()
}

/// The polynomial of degree at most `dim(P) + r` interpolating
/// `L^r(nP)` at `n = 0, ..., dim(P) + r`.
pub fn ehrhart_tensor_polynomial<B: LatticeBody + ?Sized>(body: &B, r: usize) -> TensorPolynomial {
    let big_d = body.intrinsic_dim() + r;
    interpolate(&moments_up_to(body, r, big_d + 1))
}

/// Interpolates values at the nodes `0, 1, ..., len - 1` by an exact
/// Vandermonde solve, entry by entry.
pub fn interpolate(values: &[SymTensor]) -> TensorPolynomial {
    let m = values.len();
    let vandermonde: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|k| Rational::from_integer(BigInt::from(i).pow(k as u32)))
                .collect()
        })
        .collect();
    let inv = inverse(&vandermonde).expect("distinct interpolation nodes");
    let (rank, dim) = (values[0].rank(), values[0].dim());
    let coeffs = (0..m)
        .map(|k| {
            (0..m).fold(SymTensor::zeros(rank, dim), |acc, i| {
                if inv[k][i].is_zero() {
                    acc
                } else {
                    &acc + &values[i].scale(&inv[k][i])
                }
            })
        })
        .collect();
    TensorPolynomial { coeffs }
}

/// `h_i = Σ_{j<=i} (-1)^{i-j} C(D + 1, i - j) L^r(jP)` for `i = 0..=D`, where
/// `moments[j] = L^r(jP)` and `D = moments.len() - 1`.
pub fn hr_from_moments(moments: &[SymTensor]) -> HrVector {
    let big_d = moments.len() as i64 - 1;
    let (rank, dim) = (moments[0].rank(), moments[0].dim());
    let entries = (0..moments.len())
        .map(|i| {
            (0..=i).fold(SymTensor::zeros(rank, dim), |acc, j| {
                let mut c = Rational::from_integer(binomial(big_d + 1, (i - j) as i64));
                if (i - j) % 2 == 1 {
                    c = -c;
                }
                &acc + &moments[j].scale(&c)
            })
        })
        .collect();
    HrVector { entries }
}

/// The `h^r`-vector `(h^r_0, ..., h^r_{dim(P)+r})`.
pub fn to_hr_vector<B: LatticeBody + ?Sized>(body: &B, r: usize) -> HrVector {
    let big_d = body.intrinsic_dim() + r;
    hr_from_moments(&moments_up_to(body, r, big_d + 1))
}

/// Checks `L^r_P(-n) = (-1)^{dim(P)+r} L^r(nP°)` exactly.
pub fn reciprocity_check<B: LatticeBody + ?Sized>(body: &B, r: usize, n: u64) -> bool {
    let poly = ehrhart_tensor_polynomial(body, r);
    reciprocity_holds(&poly, body, r, n)
}

pub(crate) fn reciprocity_holds<B: LatticeBody + ?Sized>(
    poly: &TensorPolynomial,
    body: &B,
    r: usize,
    n: u64,
) -> bool {
    let lhs = poly.evaluate(&Rational::from_integer(-BigInt::from(n)));
    let mut rhs = discrete_moment_interior(body, r, n);
    if (body.intrinsic_dim() + r) % 2 == 1 {
        rhs = -&rhs;
    }
    lhs == rhs
}

/// `Σ` over all multisets of size `r` of the vertices of the symmetric
/// product of the chosen vertices (the complete homogeneous sum `h_r`).
fn complete_homogeneous(vertices: &[IntPoint], r: usize) -> SymTensor {
    let dim = vertices[0].dim();
    let mut acc = SymTensor::zeros(r, dim);
    for choice in multi_indices(vertices.len(), r) {
        let mut term = SymTensor::scalar(Rational::one(), dim);
        let mut i = 0;
        while i < choice.len() {
            let run = choice[i..].iter().take_while(|&&c| c == choice[i]).count();
            term = term.sym_product(&outer_power(&vertices[choice[i]], run)).unwrap();
            i += run;
        }
        acc = &acc + &term;
    }
    acc
}

/// `∫_Δ x^r` for a `k`-simplex with `k + 1` vertices, measured so that the
/// simplex has volume `scale / k!`. Follows from
/// `∫_Δ λ^a = vol(Δ) k! Π a_i! / (k + |a|)!` in barycentric coordinates.
fn simplex_moment(vertices: &[IntPoint], r: usize, scale: &BigInt) -> SymTensor {
    let k = vertices.len() - 1;
    let c = Rational::new(scale * factorial(r), factorial(k + r));
    complete_homogeneous(vertices, r).scale(&c)
}

const MAX_INTEGRAL_RANK: usize = 2;

/// Moment tensor `M^r(P) = ∫_P x^r dx` for `r <= 2`.
pub fn moment_tensor(p: &Polytope, r: usize) -> Result<SymTensor> {
    if r > MAX_INTEGRAL_RANK {
        return Err(Error::UnsupportedRank { rank: r, max: MAX_INTEGRAL_RANK });
    }
    Ok(moment_tensor_any_rank(p, r))
}

pub(crate) fn moment_tensor_any_rank(p: &Polytope, r: usize) -> SymTensor {
    let mut acc = SymTensor::zeros(r, p.dim());
    for cell in p.pulling_triangulation() {
        let base = &cell[0];
        let rows: Vec<Vec<i128>> = cell[1..]
            .iter()
            .map(|v| (v - base).0.iter().map(|&x| x as i128).collect())
            .collect();
        let det = BigInt::from(int_determinant(&rows)).abs();
        acc = &acc + &simplex_moment(&cell, r, &det);
    }
    acc
}

/// `(1/2) Σ_F ∫_F x^r dx / |det(aff(F) ∩ Z^d)|` over the facets of `P`,
/// the coefficient of `n^{d+r-1}` in the Ehrhart tensor polynomial, for
/// `r <= 2`.
pub fn second_coefficient_facets(p: &Polytope, r: usize) -> Result<SymTensor> {
    if r > MAX_INTEGRAL_RANK {
        return Err(Error::UnsupportedRank { rank: r, max: MAX_INTEGRAL_RANK });
    }
    let d = p.dim();
    let mut acc = SymTensor::zeros(r, d);
    for facet in p.facets() {
        for cell in p.facet_triangulation(facet) {
            // The signed maximal minors of the edge vectors are a multiple of
            // the primitive facet normal; that multiple is the lattice-
            // normalised volume of the cell.
            let base = &cell[0];
            let diffs: Vec<Vec<i64>> = cell[1..].iter().map(|v| (v - base).0).collect();
            let minors = cross_product(&diffs, d);
            let g = minors.iter().fold(BigInt::zero(), |g, &m| num_integer::Integer::gcd(&g, &BigInt::from(m)));
            acc = &acc + &simplex_moment(&cell, r, &g);
        }
    }
    Ok(acc.scale(&Rational::new(BigInt::one(), BigInt::from(2))))
}
