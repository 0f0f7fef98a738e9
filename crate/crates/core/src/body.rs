//! Bounded convex domains: polytopes, balls and intersections of convex constraints.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, norm, Point};
use crate::{BISECTION_REL_WIDTH, DIRECTION_FLOOR, EPS_GEO, MAX_FACET_DIM, MAX_FACET_VERTICES};

/// Supporting inequality `normal·x ≤ offset` with a unit outward normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Point,
    pub offset: f64,
}

#[derive(Debug, Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    interior: Point,
}

#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// `a·x ≤ b`
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub a: Point,
    pub b: f64,
}

/// `xᵀQx + c·x ≤ r` with `Q` positive semidefinite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub q: Vec<Point>,
    pub c: Point,
    pub r: f64,
}

impl Quadratic {
    fn value(&self, x: &[f64]) -> f64 {
        let mut quad = 0.0;
        for (i, row) in self.q.iter().enumerate() {
            quad += x[i] * dot(row, x);
        }
        quad + dot(&self.c, x)
    }

    fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.q.iter().enumerate().map(|(i, row)| x[i] * dot(row, y)).sum()
    }
}

/// Black-box convex constraint `g(x) ≤ 0`.
#[derive(Clone)]
pub struct ConvexConstraint {
    pub name: String,
    pub g: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl ConvexConstraint {
    pub fn new(name: impl Into<String>, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ConvexConstraint { name: name.into(), g: Arc::new(g) }
    }
}

impl fmt::Debug for ConvexConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvexConstraint({})", self.name)
    }
}

#[derive(Debug, Clone)]
pub struct Intersection {
    dim: usize,
    pub halfspaces: Vec<Halfspace>,
    pub quadratics: Vec<Quadratic>,
    pub constraints: Vec<ConvexConstraint>,
    pub bbox: (Point, Point),
    interior: Point,
}

#[derive(Debug, Clone)]
pub enum ConvexBody {
    Polytope(Polytope),
    Ball(Ball),
    Intersection(Intersection),
}

/// Identifies which constraint is tightest at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintId {
    Facet(usize),
    Sphere,
    Halfspace(usize),
    Quadratic(usize),
    Custom(usize),
    BoxLower(usize),
    BoxUpper(usize),
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintId::Facet(i) => write!(f, "facet {i}"),
            ConstraintId::Sphere => write!(f, "ball radius"),
            ConstraintId::Halfspace(i) => write!(f, "halfspace {i}"),
            ConstraintId::Quadratic(i) => write!(f, "quadratic {i}"),
            ConstraintId::Custom(i) => write!(f, "constraint {i}"),
            ConstraintId::BoxLower(j) => write!(f, "bbox lower bound on coordinate {j}"),
            ConstraintId::BoxUpper(j) => write!(f, "bbox upper bound on coordinate {j}"),
        }
    }
}

/// Facets of the convex hull of `vertices`, found by brute force over `d`-subsets.
///
/// Normals are unit and outward; the list is sorted lexicographically by normal.
pub fn polytope_facets(vertices: &[Point]) -> Result<Vec<Facet>> {
    let Some(first) = vertices.first() else {
        return Err(Error::Degenerate("no vertices".into()));
    };
    let d = first.len();
    if d == 0 || d > MAX_FACET_DIM {
        return Err(Error::Unsupported(format!("facet enumeration needs 1 ≤ d ≤ {MAX_FACET_DIM}, got {d}")));
    }
    if vertices.len() > MAX_FACET_VERTICES {
        return Err(Error::Unsupported(format!("at most {MAX_FACET_VERTICES} vertices, got {}", vertices.len())));
    }
    for v in vertices {
        check_dim(d, v.len())?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite vertex coordinate".into()));
        }
    }
    let diffs: Vec<Point> = vertices.iter().skip(1).map(|v| linalg::sub(v, first)).collect();
    let scale = diffs.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if vertices.len() < d + 1 || scale == 0.0 || linalg::rank(&diffs, d, 1e-10) < d {
        return Err(Error::Degenerate("vertices do not span a full-dimensional hull".into()));
    }
    let tol = 1e-9 * scale.max(1.0);
    let mut facets: Vec<Facet> = Vec::new();
    for subset in (0..vertices.len()).combinations(d) {
        let base = &vertices[subset[0]];
        let spans: Vec<Point> = subset[1..].iter().map(|&k| linalg::sub(&vertices[k], base)).collect();
        let refs: Vec<&[f64]> = spans.iter().map(|v| v.as_slice()).collect();
        let Some(mut n) = linalg::orthogonal_complement_vector(&refs, d) else {
            continue;
        };
        let mut offset = dot(&n, base);
        let (mut above, mut below) = (false, false);
        for v in vertices {
            let s = dot(&n, v) - offset;
            above |= s > tol;
            below |= s < -tol;
        }
        if above && below {
            continue;
        }
        if above {
            n = linalg::scale(&n, -1.0);
            offset = -offset;
        }
        let n: Point = n.into_iter().map(linalg::clean_zero).collect();
        if !facets
            .iter()
            .any(|f| linalg::approx_eq(&f.normal, &n, 1e-9) && (f.offset - offset).abs() <= tol)
        {
            facets.push(Facet { normal: n, offset });
        }
    }
    facets.sort_by(|a, b| linalg::lex_cmp(&a.normal, &b.normal));
    Ok(facets)
}

impl Polytope {
    pub fn from_vertices(vertices: Vec<Point>) -> Result<Self> {
        let facets = polytope_facets(&vertices)?;
        let dim = vertices[0].len();
        let mut interior = vec![0.0; dim];
        for v in &vertices {
            for (c, x) in interior.iter_mut().zip(v) {
                *c += x / vertices.len() as f64;
            }
        }
        Ok(Polytope { dim, vertices, facets, interior })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn centroid(&self) -> &[f64] {
        &self.interior
    }

    /// Facets tight at `x` within `tol`.
    pub fn active_facets(&self, x: &[f64], tol: f64) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| (self.facets[i].offset - dot(&self.facets[i].normal, x)).abs() <= tol)
            .collect()
    }

    /// Indices of input vertices that are vertices of the hull.
    pub fn extreme_vertex_indices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&k| {
                let normals: Vec<Point> = self
                    .active_facets(&self.vertices[k], 1e-9)
                    .into_iter()
                    .map(|i| self.facets[i].normal.clone())
                    .collect();
                linalg::rank(&normals, self.dim, 1e-9) == self.dim
            })
            .collect()
    }

    /// Whether every listed vertex is a vertex of the hull.
    pub fn in_convex_position(&self) -> bool {
        self.extreme_vertex_indices().len() == self.vertices.len()
    }
}

impl Intersection {
    pub fn new(
        dim: usize,
        halfspaces: Vec<Halfspace>,
        quadratics: Vec<Quadratic>,
        constraints: Vec<ConvexConstraint>,
        bbox: (Point, Point),
        interior: Option<Point>,
    ) -> Result<Self> {
        check_dim(dim, bbox.0.len())?;
        check_dim(dim, bbox.1.len())?;
        if bbox.0.iter().zip(&bbox.1).any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(Error::Domain("bbox must satisfy lo < hi with finite entries".into()));
        }
        for h in &halfspaces {
            check_dim(dim, h.a.len())?;
            if norm(&h.a) == 0.0 {
                return Err(Error::Degenerate("zero halfspace normal".into()));
            }
        }
        for q in &quadratics {
            check_dim(dim, q.c.len())?;
            check_dim(dim, q.q.len())?;
            for row in &q.q {
                check_dim(dim, row.len())?;
            }
            let m = nalgebra::DMatrix::from_fn(dim, dim, |i, j| 0.5 * (q.q[i][j] + q.q[j][i]));
            if m.symmetric_eigenvalues().iter().any(|e| *e < -1e-12) {
                return Err(Error::Domain("quadratic constraint matrix is not positive semidefinite".into()));
            }
        }
        let mut body = Intersection {
            dim,
            halfspaces,
            quadratics,
            constraints,
            bbox,
            interior: vec![0.0; dim],
        };
        body.spot_check_convexity()?;
        body.interior = match interior {
            Some(p) => {
                check_dim(dim, p.len())?;
                let (s, id) = body.min_slack(&p);
                if s <= EPS_GEO {
                    return Err(Error::NotInterior { constraint: id.to_string(), slack: s });
                }
                p
            }
            None => body.search_interior()?,
        };
        Ok(body)
    }

    fn sample_box(&self, rng: &mut ChaCha8Rng) -> Point {
        (0..self.dim)
            .map(|j| {
                let (lo, hi) = (self.bbox.0[j], self.bbox.1[j]);
                lo + (hi - lo) * rng.random::<f64>()
            })
            .collect()
    }

    fn spot_check_convexity(&self) -> Result<()> {
        if self.constraints.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..64 {
            let a = self.sample_box(&mut rng);
            let b = self.sample_box(&mut rng);
            let m = linalg::lerp(&a, &b, 0.5);
            for c in &self.constraints {
                let (ga, gb, gm) = ((c.g)(&a), (c.g)(&b), (c.g)(&m));
                if gm > 0.5 * (ga + gb) + 1e-9 * (1.0 + ga.abs() + gb.abs()) {
                    return Err(Error::Domain(format!("constraint '{}' failed the convexity spot check", c.name)));
                }
            }
        }
        Ok(())
    }

    fn search_interior(&self) -> Result<Point> {
        let center = linalg::lerp(&self.bbox.0, &self.bbox.1, 0.5);
        let mut best = (self.min_slack(&center).0, center);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..4096 {
            let p = self.sample_box(&mut rng);
            let s = self.min_slack(&p).0;
            if s > best.0 {
                best = (s, p);
            }
        }
        if best.0 <= EPS_GEO {
            return Err(Error::Degenerate("no interior point found in the bounding box".into()));
        }
        Ok(best.1)
    }

    fn min_slack(&self, x: &[f64]) -> (f64, ConstraintId) {
        let mut best = (f64::INFINITY, ConstraintId::BoxLower(0));
        let mut take = |s: f64, id: ConstraintId| {
            if s < best.0 || s.is_nan() {
                best = (s, id);
            }
        };
        for (i, h) in self.halfspaces.iter().enumerate() {
            take((h.b - dot(&h.a, x)) / norm(&h.a), ConstraintId::Halfspace(i));
        }
        for (i, q) in self.quadratics.iter().enumerate() {
            take(q.r - q.value(x), ConstraintId::Quadratic(i));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            take(-(c.g)(x), ConstraintId::Custom(i));
        }
        for j in 0..self.dim {
            take(x[j] - self.bbox.0[j], ConstraintId::BoxLower(j));
            take(self.bbox.1[j] - x[j], ConstraintId::BoxUpper(j));
        }
        best
    }

    fn exit_param(&self, x: &[f64], u: &[f64]) -> f64 {
        let mut t = f64::INFINITY;
        for h in &self.halfspaces {
            t = t.min(linear_exit(&h.a, h.b, x, u));
        }
        for j in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[j] = 1.0;
            t = t.min(linear_exit(&e, self.bbox.1[j], x, u));
            e[j] = -1.0;
            t = t.min(linear_exit(&e, -self.bbox.0[j], x, u));
        }
        for q in &self.quadratics {
            let a = q.bilinear(u, u);
            let b = 2.0 * q.bilinear(x, u) + dot(&q.c, u);
            let c = q.value(x) - q.r;
            t = t.min(positive_root(a, b, c));
        }
        for c in &self.constraints {
            if (c.g)(&linalg::axpy(x, t, u)) <= 0.0 {
                continue;
            }
            let (mut lo, mut hi) = (0.0, t);
            while hi - lo > BISECTION_REL_WIDTH * hi {
                let mid = 0.5 * (lo + hi);
                if (c.g)(&linalg::axpy(x, mid, u)) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            t = t.min(0.5 * (lo + hi));
        }
        t
    }

    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }
}

fn linear_exit(a: &[f64], b: f64, x: &[f64], u: &[f64]) -> f64 {
    let au = dot(a, u);
    if au > 0.0 {
        ((b - dot(a, x)) / au).max(0.0)
    } else {
        f64::INFINITY
    }
}

/// Largest root of `a t² + b t + c = 0` for `c < 0`, `a ≥ 0`; `∞` when none is positive.
fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    if a <= 1e-300 {
        return if b > 0.0 { (-c / b).max(0.0) } else { f64::INFINITY };
    }
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let sq = disc.sqrt();
    let t = if b >= 0.0 { 2.0 * c / (-b - sq) } else { (-b + sq) / (2.0 * a) };
    t.max(0.0)
}

impl ConvexBody {
    pub fn polytope(vertices: Vec<Point>) -> Result<Self> {
        Ok(ConvexBody::Polytope(Polytope::from_vertices(vertices)?))
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || center.is_empty() {
            return Err(Error::Domain("ball needs a positive finite radius and a center".into()));
        }
        Ok(ConvexBody::Ball(Ball { center, radius }))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::Polytope(p) => p.dim,
            ConvexBody::Ball(b) => b.center.len(),
            ConvexBody::Intersection(s) => s.dim,
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            ConvexBody::Polytope(p) => Some(p),
            _ => None,
        }
    }

    /// A certified interior point.
    pub fn interior_point(&self) -> &[f64] {
        match self {
            ConvexBody::Polytope(p) => &p.interior,
            ConvexBody::Ball(b) => &b.center,
            ConvexBody::Intersection(s) => &s.interior,
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            ConvexBody::Polytope(p) => {
                let lo = (0..p.dim)
                    .map(|j| p.vertices.iter().map(|v| v[j]).fold(f64::INFINITY, f64::min))
                    .collect();
                let hi = (0..p.dim)
                    .map(|j| p.vertices.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                (lo, hi)
            }
            ConvexBody::Ball(b) => (
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            ConvexBody::Intersection(s) => s.bbox.clone(),
        }
    }

    /// Smallest constraint slack at `x` and the constraint attaining it.
    pub fn min_slack(&self, x: &[f64]) -> (f64, ConstraintId) {
        match self {
            ConvexBody::Polytope(p) => {
                let mut best = (f64::INFINITY, ConstraintId::Facet(0));
                for (i, f) in p.facets.iter().enumerate() {
                    let s = f.offset - dot(&f.normal, x);
                    if s < best.0 || s.is_nan() {
                        best = (s, ConstraintId::Facet(i));
                    }
                }
                best
            }
            ConvexBody::Ball(b) => (b.radius - linalg::dist(x, &b.center), ConstraintId::Sphere),
            ConvexBody::Intersection(s) => s.min_slack(x),
        }
    }

    /// Membership in the open domain: every slack exceeds `EPS_GEO`.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(self.min_slack(x).0 > EPS_GEO)
    }

    /// Like [`contains`](Self::contains) but reports the violated constraint.
    pub fn check_interior(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        let (slack, id) = self.min_slack(x);
        if slack > EPS_GEO {
            Ok(())
        } else {
            Err(Error::NotInterior { constraint: id.to_string(), slack })
        }
    }

    /// Membership in the closed body up to `tol`.
    pub fn closure_contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim() && self.min_slack(x).0 >= -tol
    }

    /// `sup{t > 0 : x + t u ∈ body}` for an interior `x`.
    pub fn ray_exit(&self, x: &[f64], u: &[f64]) -> Result<f64> {
        check_dim(self.dim(), u.len())?;
        let un = norm(u);
        if !(un > DIRECTION_FLOOR) {
            return Err(Error::DirectionTooSmall(un));
        }
        self.check_interior(x)?;
        Ok(self.exit_param(x, u))
    }

    /// Exit parameter without the interiority precondition (for points within
    /// tolerance of the domain).
    pub(crate) fn exit_param(&self, x: &[f64], u: &[f64]) -> f64 {
        match self {
            ConvexBody::Polytope(p) => p
                .facets
                .iter()
                .map(|f| linear_exit(&f.normal, f.offset, x, u))
                .fold(f64::INFINITY, f64::min),
            ConvexBody::Ball(b) => {
                let p = linalg::sub(x, &b.center);
                positive_root(dot(u, u), 2.0 * dot(&p, u), dot(&p, &p) - b.radius * b.radius)
            }
            ConvexBody::Intersection(s) => s.exit_param(x, u),
        }
    }
}
