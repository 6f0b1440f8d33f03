//! Lattice polytopes given by their vertices, with derived facet
//! inequalities, exact lattice-point enumeration of dilates, reflexivity and
//! seeded random generation.

use std::collections::BTreeSet;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cross_product, int_rank};
use crate::tensor::IntPoint;

/// Facet inequality `normal · x <= rhs` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FacetIneq {
    pub normal: Vec<i64>,
    pub rhs: i64,
}

impl FacetIneq {
    /// `normal · x - n * rhs`; non-positive exactly on the polytope side of
    /// the facet of the `n`-th dilate.
    pub fn slack(&self, x: &[i64], n: i64) -> i128 {
        let dot: i128 = self
            .normal
            .iter()
            .zip(x)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        dot - n as i128 * self.rhs as i128
    }
}

/// A full-dimensional lattice polytope in `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<IntPoint>,
    facets: Vec<FacetIneq>,
}

/// Wire format `{"dim": d, "vertices": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub vertices: Vec<Vec<i64>>,
}

pub(crate) fn affine_dim(points: &[IntPoint]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<i64>> = points[1..].iter().map(|p| (p - first).0).collect();
    if diffs.is_empty() {
        0
    } else {
        int_rank(&diffs)
    }
}

fn gcd_all(v: &[i128]) -> i128 {
    v.iter().fold(0i128, |g, &x| g.gcd(&x))
}

/// Convex hull of a finite set of integer points.
///
/// The points must affinely span `R^d`; otherwise [`Error::Degenerate`]
/// reports the dimension of their affine hull.
pub fn convex_hull(points: &[IntPoint]) -> Result<Polytope> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("empty point set".into()));
    };
    let d = first.dim();
    if d == 0 {
        return Err(Error::InvalidInput("ambient dimension must be positive".into()));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: p.dim() });
    }
    let pts: Vec<IntPoint> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let adim = affine_dim(&pts);
    if adim < d {
        return Err(Error::Degenerate { affine_dim: adim, ambient_dim: d });
    }
    let facets = if d == 2 {
        polygon_facets(&pts)
    } else {
        brute_force_facets(&pts, d)
    };
    let vertices = pts
        .into_iter()
        .filter(|p| {
            let tight: Vec<Vec<i64>> = facets
                .iter()
                .filter(|f| f.slack(&p.0, 1) == 0)
                .map(|f| f.normal.clone())
                .collect();
            tight.len() >= d && int_rank(&tight) == d
        })
        .collect();
    Ok(Polytope { dim: d, vertices, facets })
}

/// Every hyperplane through `d` affinely independent input points that
/// supports the whole set is a facet hyperplane.
fn brute_force_facets(pts: &[IntPoint], d: usize) -> Vec<FacetIneq> {
    let mut facets = BTreeSet::new();
    let mut subset = Vec::with_capacity(d);
    fn rec(
        pts: &[IntPoint],
        d: usize,
        start: usize,
        subset: &mut Vec<usize>,
        out: &mut BTreeSet<FacetIneq>,
    ) {
        if subset.len() == d {
            let base = &pts[subset[0]];
            let diffs: Vec<Vec<i64>> = subset[1..].iter().map(|&i| (&pts[i] - base).0).collect();
            let normal = cross_product(&diffs, d);
            let g = gcd_all(&normal);
            if g == 0 {
                return;
            }
            let normal: Vec<i64> = normal.iter().map(|&x| (x / g) as i64).collect();
            let rhs = base.dot(&normal);
            let (mut above, mut below) = (false, false);
            for p in pts {
                let v = p.dot(&normal);
                above |= v > rhs;
                below |= v < rhs;
                if above && below {
                    return;
                }
            }
            if above {
                out.insert(FacetIneq {
                    normal: normal.iter().map(|x| -x).collect(),
                    rhs: -rhs as i64,
                });
            } else {
                out.insert(FacetIneq { normal, rhs: rhs as i64 });
            }
            return;
        }
        for i in start..pts.len() {
            subset.push(i);
            rec(pts, d, i + 1, subset, out);
            subset.pop();
        }
    }
    rec(pts, d, 0, &mut subset, &mut facets);
    facets.into_iter().collect()
}

fn orient(a: &IntPoint, b: &IntPoint, c: &IntPoint) -> i128 {
    let (ax, ay) = (a[0] as i128, a[1] as i128);
    (b[0] as i128 - ax) * (c[1] as i128 - ay) - (b[1] as i128 - ay) * (c[0] as i128 - ax)
}

/// Andrew's monotone chain; returns the facet inequalities of the polygon.
fn polygon_facets(pts: &[IntPoint]) -> Vec<FacetIneq> {
    // `pts` is sorted lexicographically and deduplicated.
    let mut hull: Vec<&IntPoint> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &IntPoint>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let k = hull.len();
    let mut facets: Vec<FacetIneq> = (0..k)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % k]);
            // Counter-clockwise order: the interior lies to the left of a->b.
            let nx = (b[1] - a[1]) as i128;
            let ny = (a[0] - b[0]) as i128;
            let g = nx.gcd(&ny);
            let normal = vec![(nx / g) as i64, (ny / g) as i64];
            let rhs = a.dot(&normal) as i64;
            FacetIneq { normal, rhs }
        })
        .collect();
    facets.sort();
    facets
}

impl Polytope {
    pub fn from_vertices(points: &[IntPoint]) -> Result<Self> {
        convex_hull(points)
    }

    pub fn from_json(json: &PolytopeJson) -> Result<Self> {
        let pts: Vec<IntPoint> = json.vertices.iter().map(|v| IntPoint(v.clone())).collect();
        if let Some(p) = pts.iter().find(|p| p.dim() != json.dim) {
            return Err(Error::DimensionMismatch { expected: json.dim, found: p.dim() });
        }
        convex_hull(&pts)
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.0.clone()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[IntPoint] {
        &self.vertices
    }

    pub fn facets(&self) -> &[FacetIneq] {
        &self.facets
    }

    pub fn contains(&self, x: &[i64], n: i64) -> bool {
        self.facets.iter().all(|f| f.slack(x, n) <= 0)
    }

    pub fn contains_in_interior(&self, x: &[i64], n: i64) -> bool {
        self.facets.iter().all(|f| f.slack(x, n) < 0)
    }

    /// Vertices of `P` lying on the given facet.
    pub fn facet_vertices(&self, facet: &FacetIneq) -> Vec<IntPoint> {
        self.vertices
            .iter()
            .filter(|v| facet.slack(&v.0, 1) == 0)
            .cloned()
            .collect()
    }

    /// `(min, max)` of every coordinate over the vertices.
    pub fn bounding_box(&self) -> Vec<(i64, i64)> {
        (0..self.dim)
            .map(|i| {
                let it = self.vertices.iter().map(|v| v[i]);
                (it.clone().min().unwrap(), it.max().unwrap())
            })
            .collect()
    }

    /// Calls `f` on every lattice point of `nP` (or of its interior when
    /// `interior` is set), in lexicographic order.
    pub fn for_each_lattice_point(&self, n: u64, interior: bool, f: &mut dyn FnMut(&[i64])) {
        let n = n as i64;
        let bbox: Vec<(i64, i64)> = self
            .bounding_box()
            .into_iter()
            .map(|(lo, hi)| (lo * n, hi * n))
            .collect();
        let strict = i128::from(interior);
        let mut x = vec![0i64; self.dim];
        // Partial dot products of every facet normal with the fixed prefix.
        let mut partial = vec![vec![0i128; self.facets.len()]; self.dim + 1];
        self.scan(0, n, strict, &bbox, &mut x, &mut partial, f);
    }

    #[allow(clippy::too_many_arguments)]
    fn scan(
        &self,
        level: usize,
        n: i64,
        strict: i128,
        bbox: &[(i64, i64)],
        x: &mut Vec<i64>,
        partial: &mut Vec<Vec<i128>>,
        f: &mut dyn FnMut(&[i64]),
    ) {
        let last = self.dim - 1;
        if level == last {
            // Solve every facet inequality for the last coordinate.
            let (mut lo, mut hi) = (bbox[last].0 as i128, bbox[last].1 as i128);
            for (k, fct) in self.facets.iter().enumerate() {
                let a = fct.normal[last] as i128;
                let b = n as i128 * fct.rhs as i128 - partial[level][k] - strict;
                if a > 0 {
                    hi = hi.min(Integer::div_floor(&b, &a));
                } else if a < 0 {
                    lo = lo.max(Integer::div_ceil(&b, &a));
                } else if b < 0 {
                    return;
                }
            }
            for v in lo..=hi {
                x[last] = v as i64;
                f(x);
            }
            return;
        }
        for v in bbox[level].0..=bbox[level].1 {
            x[level] = v;
            let (head, tail) = partial.split_at_mut(level + 1);
            for (k, fct) in self.facets.iter().enumerate() {
                tail[0][k] = head[level][k] + fct.normal[level] as i128 * v as i128;
            }
            self.scan(level + 1, n, strict, bbox, x, partial, f);
        }
    }

    /// Lattice points of `nP`; `n = 0` gives the origin.
    pub fn lattice_points(&self, n: u64) -> Vec<IntPoint> {
        let mut out = Vec::new();
        self.for_each_lattice_point(n, false, &mut |x| out.push(IntPoint(x.to_vec())));
        out
    }

    /// Lattice points in the interior of `nP`.
    pub fn interior_lattice_points(&self, n: u64) -> Vec<IntPoint> {
        let mut out = Vec::new();
        self.for_each_lattice_point(n, true, &mut |x| out.push(IntPoint(x.to_vec())));
        out
    }

    pub fn count_lattice_points(&self, n: u64) -> usize {
        let mut c = 0;
        self.for_each_lattice_point(n, false, &mut |_| c += 1);
        c
    }

    /// Whether the origin lies in the interior.
    pub fn has_origin_in_interior(&self) -> bool {
        self.facets.iter().all(|f| f.rhs > 0)
    }

    /// Reflexive iff the origin is interior and every facet reads
    /// `normal · x <= 1` with a primitive normal.
    pub fn is_reflexive(&self) -> bool {
        self.has_origin_in_interior() && self.facets.iter().all(|f| f.rhs == 1)
    }

    pub fn translate(&self, t: &IntPoint) -> Polytope {
        let verts: Vec<IntPoint> = self.vertices.iter().map(|v| v + t).collect();
        convex_hull(&verts).expect("translate preserves full dimension")
    }

    /// Image under an integer matrix given by rows; fails when the matrix is
    /// singular.
    pub fn transform(&self, m: &[Vec<i64>]) -> Result<Polytope> {
        let verts: Vec<IntPoint> = self
            .vertices
            .iter()
            .map(|v| IntPoint(m.iter().map(|row| v.dot(row) as i64).collect()))
            .collect();
        convex_hull(&verts)
    }
}

impl Polytope {
    /// Vertex sets of the proper faces of dimension `face_dim - 1` of the face
    /// spanned by `face` (given as vertex indices, of dimension `face_dim`).
    fn subfaces(&self, face: &[usize], face_dim: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for f in &self.facets {
            let sub: Vec<usize> = face
                .iter()
                .copied()
                .filter(|&i| f.slack(&self.vertices[i].0, 1) == 0)
                .collect();
            if sub.len() < face_dim || sub.len() == face.len() {
                continue;
            }
            let pts: Vec<IntPoint> = sub.iter().map(|&i| self.vertices[i].clone()).collect();
            if affine_dim(&pts) + 1 == face_dim && !out.contains(&sub) {
                out.push(sub);
            }
        }
        out
    }

    fn pull(&self, face: &[usize], face_dim: usize, out: &mut Vec<Vec<usize>>) {
        if face_dim == 0 {
            out.push(vec![face[0]]);
            return;
        }
        let apex = face[0];
        for sub in self.subfaces(face, face_dim) {
            if sub.contains(&apex) {
                continue;
            }
            let mut cells = Vec::new();
            self.pull(&sub, face_dim - 1, &mut cells);
            for mut c in cells {
                c.push(apex);
                out.push(c);
            }
        }
    }

    /// Pulling triangulation: full-dimensional lattice simplices with
    /// vertices among the vertices of `P`, covering `P` with disjoint
    /// interiors.
    pub fn pulling_triangulation(&self) -> Vec<Vec<IntPoint>> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut cells = Vec::new();
        self.pull(&all, self.dim, &mut cells);
        self.index_cells(cells)
    }

    /// Triangulation of one facet into `(d - 1)`-simplices.
    pub fn facet_triangulation(&self, facet: &FacetIneq) -> Vec<Vec<IntPoint>> {
        let face: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| facet.slack(&self.vertices[i].0, 1) == 0)
            .collect();
        let mut cells = Vec::new();
        self.pull(&face, self.dim - 1, &mut cells);
        self.index_cells(cells)
    }

    fn index_cells(&self, cells: Vec<Vec<usize>>) -> Vec<Vec<IntPoint>> {
        cells
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.vertices[i].clone()).collect())
            .collect()
    }
}

/// Maximum number of draws [`random_lattice_polytope`] makes before giving up.
pub const RANDOM_RETRY_BUDGET: usize = 1000;

/// Convex hull of `num_gens` points drawn uniformly from
/// `[-coord_bound, coord_bound]^d` with a ChaCha8 generator seeded by `seed`.
/// Degenerate draws are redrawn from the same stream.
pub fn random_lattice_polytope(d: usize, coord_bound: i64, num_gens: usize, seed: u64) -> Result<Polytope> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lattice_polytope_with(&mut rng, d, coord_bound, num_gens)
}

pub fn random_lattice_polytope_with<R: Rng>(
    rng: &mut R,
    d: usize,
    coord_bound: i64,
    num_gens: usize,
) -> Result<Polytope> {
    if d == 0 || coord_bound <= 0 || num_gens < d + 1 {
        return Err(Error::InvalidInput(format!(
            "need d >= 1, coord_bound >= 1 and num_gens >= d + 1 (got d={d}, bound={coord_bound}, gens={num_gens})"
        )));
    }
    for _ in 0..RANDOM_RETRY_BUDGET {
        let pts: Vec<IntPoint> = (0..num_gens)
            .map(|_| IntPoint((0..d).map(|_| rng.random_range(-coord_bound..=coord_bound)).collect()))
            .collect();
        match convex_hull(&pts) {
            Ok(p) => return Ok(p),
            Err(Error::Degenerate { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetryBudgetExhausted { attempts: RANDOM_RETRY_BUDGET })
}

/// Unimodular change of coordinates identifying the lattice of an affine
/// subspace `x0 + L` of `R^D` with `Z^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeEmbedding {
    origin: IntPoint,
    /// `k x D`: local coordinates of `x - origin`.
    to_local: Vec<Vec<i64>>,
    /// `D x k`: ambient image of the local unit vectors.
    to_ambient: Vec<Vec<i64>>,
}

impl LatticeEmbedding {
    /// Builds the embedding of the affine lattice spanned by `points`.
    pub fn of_points(points: &[IntPoint]) -> Result<Self> {
        let Some(origin) = points.first().cloned() else {
            return Err(Error::InvalidInput("empty point set".into()));
        };
        let big_d = origin.dim();
        // Columns are the difference vectors; row-reduce over Z while
        // recording the unimodular row operations in `u`.
        let cols: Vec<Vec<i64>> = points[1..].iter().map(|p| (p - &origin).0).collect();
        let mut a: Vec<Vec<i128>> = (0..big_d)
            .map(|i| cols.iter().map(|c| c[i] as i128).collect())
            .collect();
        let mut u: Vec<Vec<i128>> = (0..big_d)
            .map(|i| (0..big_d).map(|j| i128::from(i == j)).collect())
            .collect();
        let mut row = 0;
        for c in 0..cols.len() {
            if row == big_d {
                break;
            }
            loop {
                // Smallest nonzero entry in this column at or below `row`.
                let Some(p) = (row..big_d)
                    .filter(|&r| a[r][c] != 0)
                    .min_by_key(|&r| a[r][c].abs())
                else {
                    break;
                };
                a.swap(row, p);
                u.swap(row, p);
                let mut done = true;
                for r in row + 1..big_d {
                    if a[r][c] != 0 {
                        let q = Integer::div_floor(&a[r][c], &a[row][c]);
                        for j in 0..a[r].len() {
                            a[r][j] -= q * a[row][j];
                        }
                        for j in 0..big_d {
                            u[r][j] -= q * u[row][j];
                        }
                        done &= a[r][c] == 0;
                    }
                }
                if done {
                    row += 1;
                    break;
                }
            }
        }
        let k = row;
        let uq: Vec<Vec<crate::rational::Rational>> = u
            .iter()
            .map(|r| r.iter().map(|&x| crate::rational::from_i128(x)).collect())
            .collect();
        let inv = crate::linalg::inverse(&uq).expect("row operations are unimodular");
        let to_ambient = inv
            .iter()
            .map(|r| r[..k].iter().map(|x| i64::try_from(x.to_integer()).unwrap()).collect())
            .collect();
        let to_local = u[..k]
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        Ok(LatticeEmbedding { origin, to_local, to_ambient })
    }

    pub fn local_dim(&self) -> usize {
        self.to_local.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.origin.dim()
    }

    /// Local coordinates of a point of the affine subspace.
    pub fn project(&self, x: &IntPoint) -> IntPoint {
        let diff = x - &self.origin;
        IntPoint(self.to_local.iter().map(|r| diff.dot(r) as i64).collect())
    }

    /// Ambient coordinates of a local point of the `n`-th dilate:
    /// `n * origin + B y`.
    pub fn lift(&self, y: &[i64], n: i64) -> IntPoint {
        IntPoint(
            self.to_ambient
                .iter()
                .enumerate()
                .map(|(i, r)| n * self.origin[i] + r.iter().zip(y).map(|(a, b)| a * b).sum::<i64>())
                .collect(),
        )
    }

    pub fn origin(&self) -> &IntPoint {
        &self.origin
    }

    /// `D x k` integer matrix mapping local directions to ambient ones.
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.to_ambient
    }
}

/// A lattice polytope that is full-dimensional only inside its affine hull,
/// e.g. a polygon in `R^3`. Computations run on the local copy and results
/// are mapped back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedPolytope {
    pub local: Polytope,
    pub embedding: LatticeEmbedding,
}

impl EmbeddedPolytope {
    pub fn from_points(points: &[IntPoint]) -> Result<Self> {
        let embedding = LatticeEmbedding::of_points(points)?;
        if embedding.local_dim() == 0 {
            return Err(Error::Degenerate { affine_dim: 0, ambient_dim: embedding.ambient_dim() });
        }
        let local_pts: Vec<IntPoint> = points.iter().map(|p| embedding.project(p)).collect();
        let local = convex_hull(&local_pts)?;
        Ok(EmbeddedPolytope { local, embedding })
    }

    pub fn vertices(&self) -> Vec<IntPoint> {
        self.local.vertices().iter().map(|y| self.embedding.lift(&y.0, 1)).collect()
    }
}
