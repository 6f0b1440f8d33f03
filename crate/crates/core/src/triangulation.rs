//! Unimodular triangulations of lattice polygons, their edge graphs, the
//! Pick-type formulas for `h^1`, `h^2` and the Ehrhart vector and matrix
//! polynomials, half-open decompositions and sparse decompositions.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{convex_hull, Polytope};
use crate::rational::{int, rat, Rational};
use crate::tensor::{HrVector, IntPoint, MomentAccumulator, SymTensor, TensorPolynomial};

/// Twice the signed area of the triangle `abc`.
pub(crate) fn orient(a: &[i64], b: &[i64], c: &[i64]) -> i128 {
    let (ux, uy) = ((b[0] - a[0]) as i128, (b[1] - a[1]) as i128);
    let (vx, vy) = ((c[0] - a[0]) as i128, (c[1] - a[1]) as i128);
    ux * vy - uy * vx
}

fn orient_rational(a: &[i64], b: &[i64], q: &[Rational; 2]) -> Rational {
    let ux = int(b[0] - a[0]);
    let uy = int(b[1] - a[1]);
    let vx = &q[0] - int(a[0]);
    let vy = &q[1] - int(a[1]);
    ux * vy - uy * vx
}

fn require_polygon(p: &Polytope) -> Result<()> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    Ok(())
}

/// A triangulation of a lattice polygon using all of its lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    points: Vec<IntPoint>,
    triangles: Vec<[usize; 3]>,
    polygon: Polytope,
}

/// Wire format `{"points": [[x, y], ...], "triangles": [[i, j, k], ...]}`
/// with 0-based indices into `points`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub points: Vec<Vec<i64>>,
    pub triangles: Vec<[usize; 3]>,
}

impl Triangulation {
    pub fn points(&self) -> &[IntPoint] {
        &self.points
    }

    /// Index triples into [`Triangulation::points`], each counterclockwise.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn polygon(&self) -> &Polytope {
        &self.polygon
    }

    pub fn triangle_vertices(&self, t: usize) -> [IntPoint; 3] {
        self.triangles[t].map(|i| self.points[i].clone())
    }

    /// Undirected edges as sorted index pairs, in increasing order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                set.insert((a.min(b), a.max(b)));
            }
        }
        set.into_iter().collect()
    }

    pub fn to_json(&self) -> TriangulationJson {
        TriangulationJson {
            points: self.points.iter().map(|p| p.0.clone()).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Rebuilds a triangulation from its wire format, checking that it is a
    /// unimodular triangulation of the hull of its points.
    pub fn from_json(json: &TriangulationJson) -> Result<Self> {
        let points: Vec<IntPoint> = json.points.iter().map(|p| IntPoint(p.clone())).collect();
        let polygon = convex_hull(&points)?;
        require_polygon(&polygon)?;
        let n = points.len();
        let mut triangles = Vec::with_capacity(json.triangles.len());
        for t in &json.triangles {
            if t.iter().any(|&i| i >= n) {
                return Err(Error::InvalidInput(format!("triangle index out of range in {t:?}")));
            }
            let [a, b, c] = *t;
            let o = orient(&points[a].0, &points[b].0, &points[c].0);
            if o.abs() != 1 {
                return Err(Error::InvalidInput(format!("triangle {t:?} is not unimodular")));
            }
            triangles.push(if o > 0 { [a, b, c] } else { [a, c, b] });
        }
        let tri = Triangulation { points, triangles, polygon };
        let expected = tri.polygon.lattice_points(1);
        let mut sorted = tri.points.clone();
        sorted.sort();
        sorted.dedup();
        if sorted != expected || sorted.len() != n {
            return Err(Error::InvalidInput("points must be exactly the lattice points of their hull".into()));
        }
        let area2: i128 = (1..tri.polygon.vertices().len().saturating_sub(1))
            .map(|i| {
                let v = tri.polygon.vertices();
                orient(&v[0].0, &v[i].0, &v[i + 1].0).abs()
            })
            .sum();
        if tri.triangles.len() as i128 != area2_of_hull(&tri.polygon).max(area2) {
            return Err(Error::InvalidInput("triangles do not cover the polygon".into()));
        }
        Ok(tri)
    }
}

/// Twice the area of a convex polygon, from its vertices in angular order.
fn area2_of_hull(p: &Polytope) -> i128 {
    let v = ccw_vertices(p);
    (0..v.len())
        .map(|i| {
            let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
            a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
        })
        .sum::<i128>()
        .abs()
}

/// Vertices of a polygon in counterclockwise order.
pub(crate) fn ccw_vertices(p: &Polytope) -> Vec<IntPoint> {
    let v = p.vertices();
    let pivot = v[0].clone();
    let mut rest: Vec<IntPoint> = v[1..].to_vec();
    // All other vertices lie in a half-plane seen from the lexicographically
    // smallest vertex, so orientation is a strict angular order.
    rest.sort_by(|a, b| 0.cmp(&orient(&pivot.0, &a.0, &b.0)));
    let mut out = vec![pivot];
    out.extend(rest);
    out
}

/// Unimodular triangulation by lexicographic incremental insertion.
pub fn unimodular_triangulation(p: &Polytope) -> Result<Triangulation> {
    unimodular_triangulation_with_order(p, [1, 0])
}

/// Same construction with points inserted in increasing order of
/// `(a·x, a⊥·x)` where `a⊥ = (-a_2, a_1)`. Different directions give
/// different triangulations of the same polygon.
pub fn unimodular_triangulation_with_order(p: &Polytope, a: [i64; 2]) -> Result<Triangulation> {
    require_polygon(p)?;
    if a == [0, 0] {
        return Err(Error::InvalidInput("ordering direction must be nonzero".into()));
    }
    let key = |x: &IntPoint| {
        (
            a[0] as i128 * x[0] as i128 + a[1] as i128 * x[1] as i128,
            -(a[1] as i128) * x[0] as i128 + a[0] as i128 * x[1] as i128,
        )
    };
    let mut order = p.lattice_points(1);
    order.sort_by_key(|x| key(x));
    let mut points = p.lattice_points(1);
    points.sort();
    let index = |x: &IntPoint| points.binary_search(x).unwrap();

    let mut triangles: Vec<[usize; 3]> = Vec::new();
    // Initial collinear chain.
    let mut k = 2;
    while orient(&order[0].0, &order[1].0, &order[k].0) == 0 {
        k += 1;
    }
    let apex = &order[k];
    for w in order[..k].windows(2) {
        let (u, v) = (&w[0], &w[1]);
        if orient(&u.0, &v.0, &apex.0) > 0 {
            triangles.push([index(u), index(v), index(apex)]);
        } else {
            triangles.push([index(v), index(u), index(apex)]);
        }
    }
    let mut hull: Vec<usize> = if orient(&order[0].0, &order[k - 1].0, &apex.0) > 0 {
        order[..k].iter().map(index).collect()
    } else {
        order[..k].iter().rev().map(index).collect()
    };
    hull.push(index(apex));

    for x in &order[k + 1..] {
        let xi = index(x);
        let m = hull.len();
        let visible: Vec<bool> = (0..m)
            .map(|i| orient(&points[hull[i]].0, &points[hull[(i + 1) % m]].0, &x.0) < 0)
            .collect();
        let start = (0..m)
            .find(|&i| visible[i] && !visible[(i + m - 1) % m])
            .expect("new point sees part of the hull");
        let rotated: Vec<usize> = (0..m).map(|i| hull[(start + i) % m]).collect();
        let count = (0..m).take_while(|&i| visible[(start + i) % m]).count();
        for i in 0..count {
            // The edge runs clockwise as seen from x, so swap for CCW.
            triangles.push([rotated[i + 1], rotated[i], xi]);
        }
        let mut next = vec![rotated[0], xi];
        next.extend_from_slice(&rotated[count..]);
        hull = next;
    }
    Ok(Triangulation { points, triangles, polygon: p.clone() })
}

/// Edge graph of a triangulation with the interior/boundary split of its
/// vertices and edges. Indices refer to [`Triangulation::points`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGraph {
    pub vertices: Vec<IntPoint>,
    pub interior_vertices: Vec<usize>,
    pub boundary_vertices: Vec<usize>,
    pub interior_edges: Vec<(usize, usize)>,
    pub boundary_edges: Vec<(usize, usize)>,
}

impl EdgeGraph {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut all: Vec<_> = self.interior_edges.iter().chain(&self.boundary_edges).copied().collect();
        all.sort();
        all
    }
}

pub fn edge_graph(t: &Triangulation) -> EdgeGraph {
    let p = &t.polygon;
    let on_facet = |x: &IntPoint, f: usize| p.facets()[f].slack(&x.0, 1) == 0;
    let (mut interior_vertices, mut boundary_vertices) = (Vec::new(), Vec::new());
    for (i, x) in t.points.iter().enumerate() {
        if p.contains_in_interior(&x.0, 1) {
            interior_vertices.push(i);
        } else {
            boundary_vertices.push(i);
        }
    }
    let (mut interior_edges, mut boundary_edges) = (Vec::new(), Vec::new());
    for (a, b) in t.edges() {
        let shared = (0..p.facets().len()).any(|f| on_facet(&t.points[a], f) && on_facet(&t.points[b], f));
        if shared {
            boundary_edges.push((a, b));
        } else {
            interior_edges.push((a, b));
        }
    }
    EdgeGraph { vertices: t.points.clone(), interior_vertices, boundary_vertices, interior_edges, boundary_edges }
}

/// The tensor sums over the edge graph that enter the Pick-type formulas.
/// Squares are symmetric outer squares, so `(y+z)^2 = (y+z)⊗(y+z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStats {
    pub graph: EdgeGraph,
    /// `Σ_V x`
    pub sum_v: SymTensor,
    /// `Σ_{V°} x`
    pub sum_v_int: SymTensor,
    /// `Σ_{∂V} x`
    pub sum_v_bd: SymTensor,
    /// `Σ_V x^2`
    pub sum_v_sq: SymTensor,
    /// `Σ_{V°} x^2`
    pub sum_v_int_sq: SymTensor,
    /// `Σ_{∂V} x^2`
    pub sum_v_bd_sq: SymTensor,
    /// `Σ_E (y+z)^2`
    pub sum_e_sq: SymTensor,
    /// `Σ_{E°} (y+z)`
    pub sum_e_int: SymTensor,
    /// `Σ_{E°} (y+z)^2`
    pub sum_e_int_sq: SymTensor,
    /// `Σ_{∂E} (y+z)^2`
    pub sum_e_bd_sq: SymTensor,
    /// `Σ_{∂E} (y-z)^2`
    pub sum_e_bd_diff_sq: SymTensor,
}

fn point_sum(points: &[IntPoint], idx: &[usize], rank: usize) -> SymTensor {
    let mut acc = MomentAccumulator::new(rank, 2);
    for &i in idx {
        acc.add(&points[i].0);
    }
    acc.finish()
}

fn edge_sum(points: &[IntPoint], edges: &[(usize, usize)], rank: usize, diff: bool) -> SymTensor {
    let mut acc = MomentAccumulator::new(rank, 2);
    for &(a, b) in edges {
        let v = if diff { &points[a] - &points[b] } else { &points[a] + &points[b] };
        acc.add(&v.0);
    }
    acc.finish()
}

pub fn edge_stats(t: &Triangulation) -> EdgeStats {
    let graph = edge_graph(t);
    let pts = &t.points;
    let all: Vec<usize> = (0..pts.len()).collect();
    let edges = graph.edges();
    EdgeStats {
        sum_v: point_sum(pts, &all, 1),
        sum_v_int: point_sum(pts, &graph.interior_vertices, 1),
        sum_v_bd: point_sum(pts, &graph.boundary_vertices, 1),
        sum_v_sq: point_sum(pts, &all, 2),
        sum_v_int_sq: point_sum(pts, &graph.interior_vertices, 2),
        sum_v_bd_sq: point_sum(pts, &graph.boundary_vertices, 2),
        sum_e_sq: edge_sum(pts, &edges, 2, false),
        sum_e_int: edge_sum(pts, &graph.interior_edges, 1, false),
        sum_e_int_sq: edge_sum(pts, &graph.interior_edges, 2, false),
        sum_e_bd_sq: edge_sum(pts, &graph.boundary_edges, 2, false),
        sum_e_bd_diff_sq: edge_sum(pts, &graph.boundary_edges, 2, true),
        graph,
    }
}

/// `h^1 = (0, Σ_V x, Σ_{E°}(y+z) - 2Σ_{V°} x, Σ_{V°} x)`.
pub fn h1_pick(t: &Triangulation) -> HrVector {
    let s = edge_stats(t);
    let two = int(2);
    HrVector {
        entries: vec![
            SymTensor::zeros(1, 2),
            s.sum_v.clone(),
            &s.sum_e_int - &s.sum_v_int.scale(&two),
            s.sum_v_int.clone(),
        ],
    }
}

/// Ehrhart vector polynomial from the edge graph:
/// `n/6 (2Σ_V x + 4Σ_{V°} x - Σ_{E°}(y+z)) + n²/2 Σ_{∂V} x
///  + n³/6 (Σ_{∂V} x + Σ_{E°}(y+z))`.
pub fn ehrhart_vector_pick(t: &Triangulation) -> TensorPolynomial {
    let s = edge_stats(t);
    let n1 = &(&s.sum_v.scale(&int(2)) + &s.sum_v_int.scale(&int(4))) - &s.sum_e_int;
    TensorPolynomial {
        coeffs: vec![
            SymTensor::zeros(1, 2),
            n1.scale(&rat(1, 6)),
            s.sum_v_bd.scale(&rat(1, 2)),
            (&s.sum_v_bd + &s.sum_e_int).scale(&rat(1, 6)),
        ],
    }
}

/// `h^2 = (0, Σ_V x², Σ_E (y+z)² - Σ_V x², Σ_{E°}(y+z)² - Σ_{V°} x², Σ_{V°} x²)`.
pub fn h2_pick(t: &Triangulation) -> HrVector {
    let s = edge_stats(t);
    HrVector {
        entries: vec![
            SymTensor::zeros(2, 2),
            s.sum_v_sq.clone(),
            &s.sum_e_sq - &s.sum_v_sq,
            &s.sum_e_int_sq - &s.sum_v_int_sq,
            s.sum_v_int_sq.clone(),
        ],
    }
}

/// Ehrhart matrix polynomial from the edge graph:
/// `n/12 Σ_{∂E}(y-z)² + n²/24 (12Σ_V x² + 12Σ_{V°} x² - Σ_E(y+z)² - Σ_{E°}(y+z)²)
///  + n³/12 (2Σ_{∂V} x² + Σ_{∂E}(y+z)²) + n⁴/24 (Σ_E(y+z)² + Σ_{E°}(y+z)²)`.
pub fn ehrhart_matrix_pick(t: &Triangulation) -> TensorPolynomial {
    let s = edge_stats(t);
    let twelve = int(12);
    let n2 = &(&(&s.sum_v_sq.scale(&twelve) + &s.sum_v_int_sq.scale(&twelve)) - &s.sum_e_sq) - &s.sum_e_int_sq;
    let n3 = &s.sum_v_bd_sq.scale(&int(2)) + &s.sum_e_bd_sq;
    let n4 = &s.sum_e_sq + &s.sum_e_int_sq;
    TensorPolynomial {
        coeffs: vec![
            SymTensor::zeros(2, 2),
            s.sum_e_bd_diff_sq.scale(&rat(1, 12)),
            n2.scale(&rat(1, 24)),
            n3.scale(&rat(1, 12)),
            n4.scale(&rat(1, 24)),
        ],
    }
}

/// A triangle of a triangulation with the facets visible from the chosen
/// point removed. Facet `i` is the edge opposite `simplex[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfOpenCell {
    pub simplex: [usize; 3],
    pub removed: Vec<usize>,
}

/// Whether `q` avoids the affine hull of every triangulation edge.
pub fn is_generic_point(t: &Triangulation, q: &[Rational; 2]) -> bool {
    t.edges()
        .iter()
        .all(|&(a, b)| !orient_rational(&t.points[a].0, &t.points[b].0, q).is_zero())
}

const PERTURBATION_PRIMES: [i64; 12] = [1009, 1013, 1019, 1021, 1031, 1033, 1039, 1049, 1051, 1061, 1063, 1069];

/// Number of perturbations tried by [`generic_point`].
pub const GENERIC_RETRY_BUDGET: usize = PERTURBATION_PRIMES.len() * (PERTURBATION_PRIMES.len() - 1);

/// Centroid of the first triangle shifted by `(1/p, 1/p')` for distinct
/// primes `p, p'`, trying pairs until the point is generic.
pub fn generic_point(t: &Triangulation) -> Result<[Rational; 2]> {
    let tri = t.triangle_vertices(0);
    let centroid: [Rational; 2] =
        [0, 1].map(|k| Rational::new(BigInt::from(tri.iter().map(|v| v[k]).sum::<i64>()), BigInt::from(3)));
    for &p1 in &PERTURBATION_PRIMES {
        for &p2 in &PERTURBATION_PRIMES {
            if p1 == p2 {
                continue;
            }
            let q = [&centroid[0] + rat(1, p1), &centroid[1] + rat(1, p2)];
            if is_generic_point(t, &q) {
                return Ok(q);
            }
        }
    }
    Err(Error::NonGenericPoint { attempts: GENERIC_RETRY_BUDGET })
}

/// Half-open decomposition with respect to `q`: a facet of a triangle is
/// removed when `q` lies strictly on the other side of it than the opposite
/// vertex. Rejects `q` on the line of any edge.
pub fn half_open_decomposition(t: &Triangulation, q: &[Rational; 2]) -> Result<Vec<HalfOpenCell>> {
    if !is_generic_point(t, q) {
        return Err(Error::NonGenericPoint { attempts: 1 });
    }
    Ok(t.triangles
        .iter()
        .map(|&simplex| {
            let removed = (0..3)
                .filter(|&i| {
                    let a = &t.points[simplex[(i + 1) % 3]].0;
                    let b = &t.points[simplex[(i + 2) % 3]].0;
                    let side_v = orient(a, b, &t.points[simplex[i]].0).signum();
                    let side_q = orient_rational(a, b, q);
                    (side_q.is_positive() && side_v < 0) || (side_q.is_negative() && side_v > 0)
                })
                .collect();
            HalfOpenCell { simplex, removed }
        })
        .collect())
}

/// Half-open decomposition at an automatically chosen generic point.
pub fn half_open_decomposition_auto(t: &Triangulation) -> Result<(Vec<HalfOpenCell>, [Rational; 2])> {
    let q = generic_point(t)?;
    Ok((half_open_decomposition(t, &q)?, q))
}

/// Sparse decomposition: lattice polygons with 3 or 4 lattice points each,
/// meeting pairwise in at most a common vertex, whose lattice points cover
/// those of `P`.
///
/// Points are sorted by `a·x` for `a = (1, N)` with `N` larger than the
/// horizontal spread, i.e. by `y` and then `x`, decreasing. The two largest
/// points `u_1, u_2` are peeled off; if the rest spans the plane it is
/// decomposed recursively and the triangle on `u_1, u_2` and the first later
/// point off their line is added. If the rest is collinear, the line points
/// are fanned from `u_1` or `u_2`.
pub fn sparse_decomposition(p: &Polytope) -> Result<Vec<Polytope>> {
    require_polygon(p)?;
    let mut pts = p.lattice_points(1);
    pts.sort_by(|a, b| (b[1], b[0]).cmp(&(a[1], a[0])));
    let pieces = sparse_rec(&pts)?;
    if !is_sparse_decomposition(p, &pieces) {
        return Err(Error::InvalidInput("sparse decomposition failed its own check".into()));
    }
    Ok(pieces)
}

fn hull_of(pts: &[&IntPoint]) -> Result<Polytope> {
    convex_hull(&pts.iter().map(|&x| x.clone()).collect::<Vec<_>>())
}

fn sparse_rec(u: &[IntPoint]) -> Result<Vec<Polytope>> {
    if u.len() <= 4 {
        return Ok(vec![convex_hull(u)?]);
    }
    let rest = &u[2..];
    let rest_collinear = rest[2..].iter().all(|x| orient(&rest[0].0, &rest[1].0, &x.0) == 0);
    if !rest_collinear {
        let mut pieces = sparse_rec(rest)?;
        let i = rest
            .iter()
            .find(|x| orient(&u[0].0, &u[1].0, &x.0) != 0)
            .expect("rest spans the plane");
        pieces.push(hull_of(&[&u[0], &u[1], i])?);
        return Ok(pieces);
    }
    // The remaining points w_1, w_2, ... lie on a line, in order.
    let w = rest;
    if orient(&u[0].0, &u[1].0, &w[0].0) != 0 {
        for apex in [0, 1] {
            if orient(&w[0].0, &w[1].0, &u[apex].0) == 0 {
                continue;
            }
            let mut pieces = vec![hull_of(&[&u[0], &u[1], &w[0]])?];
            pieces.extend(fan(&u[apex], &w[1..])?);
            if pairwise_sparse(&pieces) {
                return Ok(pieces);
            }
        }
        Err(Error::InvalidInput("no visible apex for the collinear fan".into()))
    } else {
        // u_1, u_2, w_1 on one line and w on another.
        let mut pieces = vec![hull_of(&[&u[1], &w[0], &w[1]])?];
        if w.len() == 3 {
            pieces.push(hull_of(&[&u[0], &w[1], &w[2]])?);
        } else {
            pieces.extend(fan(&u[0], &w[2..])?);
        }
        Ok(pieces)
    }
}

/// Triangles from `apex` over consecutive pairs of the line points `w`,
/// with a final triple when the count is odd. Needs `w.len() >= 2`.
fn fan(apex: &IntPoint, w: &[IntPoint]) -> Result<Vec<Polytope>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let left = w.len() - i;
        let end = if left == 3 { i + 3 } else { i + 2 };
        let mut piece: Vec<&IntPoint> = vec![apex];
        piece.extend(&w[i..end]);
        out.push(hull_of(&piece)?);
        i = end;
    }
    Ok(out)
}

/// Exact intersection of two convex polygons, as the vertex list of the
/// clipped region (possibly degenerate, possibly with repeats).
fn convex_intersection(a: &Polytope, b: &Polytope) -> Vec<[Rational; 2]> {
    let mut poly: Vec<[Rational; 2]> = ccw_vertices(a).iter().map(|v| [int(v[0]), int(v[1])]).collect();
    for f in b.facets() {
        let slack = |x: &[Rational; 2]| int(f.normal[0]) * &x[0] + int(f.normal[1]) * &x[1] - int(f.rhs);
        let mut next = Vec::new();
        let m = poly.len();
        for i in 0..m {
            let (cur, nxt) = (&poly[i], &poly[(i + 1) % m]);
            let (sc, sn) = (slack(cur), slack(nxt));
            if !sc.is_positive() {
                next.push(cur.clone());
            }
            if (sc.is_positive() && sn.is_negative()) || (sc.is_negative() && sn.is_positive()) {
                let t = &sc / (&sc - &sn);
                next.push([&cur[0] + &t * (&nxt[0] - &cur[0]), &cur[1] + &t * (&nxt[1] - &cur[1])]);
            }
        }
        poly = next;
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// Whether `a ∩ b` is empty or a single common vertex.
pub fn meets_in_vertex_or_empty(a: &Polytope, b: &Polytope) -> bool {
    let (ba, bb) = (a.bounding_box(), b.bounding_box());
    if ba.iter().zip(&bb).any(|(x, y)| x.1 < y.0 || y.1 < x.0) {
        return true;
    }
    let mut pts = convex_intersection(a, b);
    pts.sort();
    pts.dedup();
    match pts.as_slice() {
        [] => true,
        [x] => {
            let is_vertex = |p: &Polytope| p.vertices().iter().any(|v| int(v[0]) == x[0] && int(v[1]) == x[1]);
            is_vertex(a) && is_vertex(b)
        }
        _ => false,
    }
}

fn pairwise_sparse(pieces: &[Polytope]) -> bool {
    (0..pieces.len()).all(|i| (i + 1..pieces.len()).all(|j| meets_in_vertex_or_empty(&pieces[i], &pieces[j])))
}

/// Checks the three defining conditions of a sparse decomposition.
pub fn is_sparse_decomposition(p: &Polytope, pieces: &[Polytope]) -> bool {
    let sizes_ok = pieces.iter().all(|q| matches!(q.count_lattice_points(1), 3 | 4));
    let covered: BTreeSet<IntPoint> = pieces.iter().flat_map(|q| q.lattice_points(1)).collect();
    let target: BTreeSet<IntPoint> = p.lattice_points(1).into_iter().collect();
    sizes_ok && covered == target && pairwise_sparse(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ehrhart::{ehrhart_tensor_polynomial, moment_tensor, second_coefficient_facets, to_hr_vector};
    use crate::polytope::random_lattice_polytope;

    fn poly(raw: &[[i64; 2]]) -> Polytope {
        convex_hull(&raw.iter().map(|p| IntPoint(p.to_vec())).collect::<Vec<_>>()).unwrap()
    }

    fn mat(a: [[i64; 2]; 2]) -> SymTensor {
        SymTensor::from_matrix(&a.map(|r| r.map(int).to_vec())).unwrap()
    }

    fn vec2(a: i64, b: i64) -> SymTensor {
        SymTensor::from_vector(&[int(a), int(b)])
    }

    fn square() -> Polytope {
        poly(&[[0, 0], [1, 0], [0, 1], [1, 1]])
    }

    fn std_triangle() -> Polytope {
        poly(&[[0, 0], [1, 0], [0, 1]])
    }

    fn assert_unimodular(t: &Triangulation) {
        for k in 0..t.triangles().len() {
            let [a, b, c] = t.triangle_vertices(k);
            assert_eq!(orient(&a.0, &b.0, &c.0), 1);
            assert_eq!(poly(&[[a[0], a[1]], [b[0], b[1]], [c[0], c[1]]]).count_lattice_points(1), 3);
        }
        assert_eq!(t.triangles().len() as i128, area2_of_hull(t.polygon()));
    }

    #[test]
    fn triangle_counts() {
        let t = unimodular_triangulation(&square()).unwrap();
        assert_eq!(t.triangles().len(), 2);
        assert_unimodular(&t);
        let t = unimodular_triangulation(&poly(&[[0, 0], [2, 0], [0, 2]])).unwrap();
        assert_eq!((t.points().len(), t.triangles().len()), (6, 4));
        assert_unimodular(&t);
        let ex = poly(&[[0, 1], [-1, -7], [1, -4]]);
        let t = unimodular_triangulation(&ex).unwrap();
        assert_unimodular(&t);
        let lead = moment_tensor(&ex, 0).unwrap();
        assert_eq!(int(t.triangles().len() as i64), lead.as_scalar().unwrap() * int(2));
    }

    #[test]
    fn random_triangulations_are_unimodular() {
        for seed in 0..30 {
            let p = random_lattice_polytope(2, 6, 6, seed).unwrap();
            for dir in [[1, 0], [0, 1], [2, -3], [-1, 5]] {
                assert_unimodular(&unimodular_triangulation_with_order(&p, dir).unwrap());
            }
        }
    }

    #[test]
    fn square_edge_sums() {
        let t = unimodular_triangulation(&square()).unwrap();
        let s = edge_stats(&t);
        assert_eq!(t.edges().len(), 5);
        assert_eq!(s.sum_e_sq, mat([[7, 5], [5, 7]]));
        assert_eq!(s.sum_e_int_sq, mat([[1, 1], [1, 1]]));
        assert_eq!(s.sum_v_bd_sq, mat([[2, 1], [1, 2]]));
        let s = edge_stats(&unimodular_triangulation(&std_triangle()).unwrap());
        assert!(s.graph.interior_vertices.is_empty() && s.graph.interior_edges.is_empty());
    }

    #[test]
    fn pick_examples() {
        let t = unimodular_triangulation(&std_triangle()).unwrap();
        let h1 = h1_pick(&t);
        assert_eq!(h1.entries, vec![SymTensor::zeros(1, 2), vec2(1, 1), SymTensor::zeros(1, 2), SymTensor::zeros(1, 2)]);
        let h2 = h2_pick(&t);
        assert_eq!(h2.entries[1], mat([[1, 0], [0, 1]]));
        assert_eq!(h2.entries[2], mat([[1, 1], [1, 1]]));
        let v = ehrhart_vector_pick(&t);
        assert_eq!(v.coeffs[1], vec2(1, 1).scale(&rat(1, 3)));
        assert_eq!(v.coeffs[2], vec2(1, 1).scale(&rat(1, 2)));
        assert_eq!(v.coeffs[3], vec2(1, 1).scale(&rat(1, 6)));

        let sq = square();
        let t = unimodular_triangulation(&sq).unwrap();
        assert_eq!(h1_pick(&t).entries[1], vec2(2, 2));
        assert_eq!(h2_pick(&t).entries[2], mat([[5, 4], [4, 5]]));
        let m = ehrhart_matrix_pick(&t);
        assert_eq!(m.coeffs[4], moment_tensor(&sq, 2).unwrap());
        assert_eq!(m.coeffs[3], second_coefficient_facets(&sq, 2).unwrap());
    }

    #[test]
    fn example_triangle_matrix_polynomial() {
        let ex = poly(&[[0, 1], [-1, -7], [1, -4]]);
        let t = unimodular_triangulation(&ex).unwrap();
        assert_eq!(ehrhart_matrix_pick(&t), ehrhart_tensor_polynomial(&ex, 2));
        assert_eq!(ehrhart_vector_pick(&t), ehrhart_tensor_polynomial(&ex, 1));
    }

    #[test]
    fn pick_agrees_with_interpolation_and_other_orders() {
        for seed in 100..120 {
            let p = random_lattice_polytope(2, 5, 7, seed).unwrap();
            let t = unimodular_triangulation(&p).unwrap();
            let t2 = unimodular_triangulation_with_order(&p, [3, -1]).unwrap();
            assert_eq!(h1_pick(&t), to_hr_vector(&p, 1));
            assert_eq!(h2_pick(&t), to_hr_vector(&p, 2));
            assert_eq!(h1_pick(&t2), h1_pick(&t));
            assert_eq!(h2_pick(&t2), h2_pick(&t));
        }
    }

    #[test]
    fn half_open_square() {
        let t = unimodular_triangulation(&square()).unwrap();
        // Diagonal (1,0)-(0,1); q inside the lower-left triangle.
        let q = [rat(1, 5), rat(1, 7)];
        let cells = half_open_decomposition(&t, &q).unwrap();
        let removed: usize = cells.iter().map(|c| c.removed.len()).sum();
        assert_eq!(removed, 1);
        for c in &cells {
            let tri = c.simplex.map(|i| t.points()[i].clone());
            if tri.contains(&IntPoint(vec![0, 0])) {
                assert!(c.removed.is_empty());
            } else {
                let gone = c.removed[0];
                assert_eq!(tri[gone], IntPoint(vec![1, 1]));
            }
        }
        assert!(half_open_decomposition(&t, &[rat(1, 2), rat(1, 2)]).is_err());
        let single = unimodular_triangulation(&std_triangle()).unwrap();
        let cells = half_open_decomposition(&single, &[rat(1, 4), rat(1, 5)]).unwrap();
        assert!(cells[0].removed.is_empty());
    }

    #[test]
    fn generic_point_is_generic() {
        for seed in 0..20 {
            let p = random_lattice_polytope(2, 6, 8, seed).unwrap();
            let t = unimodular_triangulation(&p).unwrap();
            let q = generic_point(&t).unwrap();
            assert!(is_generic_point(&t, &q));
        }
    }

    #[test]
    fn sparse_examples() {
        assert_eq!(sparse_decomposition(&square()).unwrap(), vec![square()]);
        assert_eq!(sparse_decomposition(&std_triangle()).unwrap().len(), 1);
        let rect = poly(&[[0, 0], [3, 0], [0, 1], [3, 1]]);
        let pieces = sparse_decomposition(&rect).unwrap();
        assert!(is_sparse_decomposition(&rect, &pieces));
        let skinny = poly(&[[0, 0], [6, 0], [0, 1]]);
        assert!(is_sparse_decomposition(&skinny, &sparse_decomposition(&skinny).unwrap()));
        let pencil = poly(&[[0, 0], [1, 5], [1, 6], [2, 0]]);
        assert!(is_sparse_decomposition(&pencil, &sparse_decomposition(&pencil).unwrap()));
    }

    #[test]
    fn sparse_random() {
        for seed in 0..60 {
            let p = random_lattice_polytope(2, 5, 5, seed).unwrap();
            let pieces = sparse_decomposition(&p).unwrap();
            assert!(is_sparse_decomposition(&p, &pieces));
        }
    }

    #[test]
    fn vertex_contact_detection() {
        let a = poly(&[[0, 0], [1, 0], [0, 1]]);
        let b = poly(&[[1, 0], [2, 0], [2, 1]]);
        let c = poly(&[[1, 0], [0, 1], [1, 1]]);
        let d = poly(&[[5, 5], [6, 5], [5, 6]]);
        assert!(meets_in_vertex_or_empty(&a, &b));
        assert!(!meets_in_vertex_or_empty(&a, &c));
        assert!(meets_in_vertex_or_empty(&a, &d));
    }

    #[test]
    fn json_round_trip() {
        let t = unimodular_triangulation(&poly(&[[0, 0], [3, 0], [0, 2]])).unwrap();
        let j = t.to_json();
        let s = serde_json::to_string(&j).unwrap();
        let back: TriangulationJson = serde_json::from_str(&s).unwrap();
        assert_eq!(Triangulation::from_json(&back).unwrap(), t);
    }
}
