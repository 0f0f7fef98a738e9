//! Polar bodies, extreme sets of polytopes, Hausdorff distances and the
//! closedness test for the family of extreme sets of the polar.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::body::{ConvexBody, Polytope};
use crate::cone::{lift_point, lift_polytope_to_cone};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, Point};
use crate::EPS_GEO;

/// Polar `{z : z·v ≤ 1 for every vertex v}` of a polytope containing the origin in its interior.
pub fn polar_polytope(vertices: &[Point]) -> Result<Polytope> {
    let p = Polytope::from_vertices(vertices.to_vec())?;
    let mut polar_vertices = Vec::with_capacity(p.facets().len());
    for f in p.facets() {
        if f.offset <= EPS_GEO {
            return Err(Error::NotInterior { constraint: "origin".into(), slack: f.offset });
        }
        polar_vertices.push(f.normal.iter().map(|a| linalg::clean_zero(a / f.offset)).collect());
    }
    let polar = Polytope::from_vertices(polar_vertices)?;
    if polar.vertices().len() != p.facets().len()
        || polar.extreme_vertex_indices().len() != polar.vertices().len()
        || polar.facets().len() != p.extreme_vertex_indices().len()
    {
        return Err(Error::Property("facet/vertex duality failed for the polar".into()));
    }
    Ok(polar)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeFace {
    /// Indices into the owner's vertex list, ascending.
    pub vertices: Vec<usize>,
    pub dim: usize,
}

/// All nonempty faces of a polytope, the polytope itself included.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremeSetFamily {
    pub vertices: Vec<Point>,
    pub faces: Vec<ExtremeFace>,
}

impl ExtremeSetFamily {
    pub fn count_by_dim(&self) -> Vec<usize> {
        let top = self.faces.iter().map(|f| f.dim).max().unwrap_or(0);
        let mut out = vec![0; top + 1];
        for f in &self.faces {
            out[f.dim] += 1;
        }
        out
    }

    pub fn position(&self, vertices: &[usize]) -> Option<usize> {
        self.faces.iter().position(|f| f.vertices == vertices)
    }
}

/// Faces of `p` read off the face lattice of its lifted cone, the apex excluded.
pub fn extreme_sets(p: &Polytope) -> Result<ExtremeSetFamily> {
    let cone = lift_polytope_to_cone(p);
    let mut faces = Vec::new();
    for face in cone.faces() {
        if face.dim == 0 {
            continue;
        }
        let vertices: Vec<usize> = (0..p.vertices().len())
            .filter(|&k| {
                let v = lift_point(&p.vertices()[k]);
                face.active.iter().all(|&i| dot(&cone.normals()[i], &v).abs() <= 1e-9)
            })
            .collect();
        if vertices.is_empty() {
            return Err(Error::Degenerate("face without vertices".into()));
        }
        faces.push(ExtremeFace { vertices, dim: face.dim - 1 });
    }
    faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.vertices.cmp(&b.vertices)));
    faces.dedup();
    Ok(ExtremeSetFamily { vertices: p.vertices().to_vec(), faces })
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[Point], b: &[Point]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("empty set".into()));
    }
    let d = a[0].len();
    for p in a.iter().chain(b) {
        check_dim(d, p.len())?;
    }
    let directed = |from: &[Point], to: &[Point]| {
        from.iter()
            .map(|p| to.iter().map(|q| linalg::dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Closedness {
    Closed,
    NotClosed,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosednessReport {
    pub verdict: Closedness,
    pub justification: String,
    /// Extreme sets of the polar, when the body is a polytope.
    pub polar_faces: Option<ExtremeSetFamily>,
}

/// Whether the extreme sets of the polar of `body` form a closed family.
pub fn closedness_check(body: &ConvexBody) -> Result<ClosednessReport> {
    let origin = vec![0.0; body.dim()];
    body.check_interior(&origin)?;
    if let Some(p) = body.as_polytope() {
        let polar = polar_polytope(p.vertices())?;
        let family = extreme_sets(&polar)?;
        return Ok(ClosednessReport {
            verdict: Closedness::Closed,
            justification: format!("finite face family ({} faces of the polar)", family.faces.len()),
            polar_faces: Some(family),
        });
    }
    if body.dim() <= 2 {
        return Ok(ClosednessReport {
            verdict: Closedness::Closed,
            justification: "in dimension two the extreme sets of a convex set form a closed family".into(),
            polar_faces: None,
        });
    }
    Ok(ClosednessReport {
        verdict: Closedness::Undetermined,
        justification: "no decision procedure for non-polyhedral bodies above dimension two".into(),
        polar_faces: None,
    })
}

/// A circle `{c + r(cos t·u + sin t·v)}` with orthonormal `u`, `v`.
#[derive(Debug, Clone, Serialize)]
pub struct Circle {
    pub center: Point,
    pub u: Point,
    pub v: Point,
    pub radius: f64,
}

impl Circle {
    pub fn point(&self, t: f64) -> Point {
        let w = linalg::add(&linalg::scale(&self.u, t.cos()), &linalg::scale(&self.v, t.sin()));
        linalg::axpy(&self.center, self.radius, &w)
    }

    fn support(&self, l: &[f64]) -> f64 {
        dot(&self.center, l) + self.radius * dot(l, &self.u).hypot(dot(l, &self.v))
    }
}

/// Convex hull of finitely many points and circles.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorHull {
    pub points: Vec<Point>,
    pub circles: Vec<Circle>,
}

/// The part of a [`GeneratorHull`] attaining the support in a direction.
#[derive(Debug, Clone, Serialize)]
pub struct ExposedFace {
    pub support: f64,
    /// Generating points of the face; a circle contributes its unique maximiser.
    pub points: Vec<Point>,
    /// Circles lying entirely in the face.
    pub whole_circles: Vec<usize>,
    /// Support minus the best value among generators not in the face.
    pub gap: f64,
}

impl GeneratorHull {
    pub fn support(&self, l: &[f64]) -> f64 {
        let p = self.points.iter().map(|p| dot(p, l));
        let c = self.circles.iter().map(|c| c.support(l));
        p.chain(c).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn exposed_face(&self, l: &[f64], tol: f64) -> ExposedFace {
        let h = self.support(l);
        let mut face = ExposedFace { support: h, points: Vec::new(), whole_circles: Vec::new(), gap: f64::INFINITY };
        for p in &self.points {
            let v = dot(p, l);
            if h - v <= tol {
                face.points.push(p.clone());
            } else {
                face.gap = face.gap.min(h - v);
            }
        }
        for (k, c) in self.circles.iter().enumerate() {
            let v = c.support(l);
            if h - v > tol {
                face.gap = face.gap.min(h - v);
                continue;
            }
            let (a, b) = (dot(l, &c.u), dot(l, &c.v));
            if a.hypot(b) <= tol {
                face.whole_circles.push(k);
            } else {
                face.points.push(c.point(b.atan2(a)));
            }
        }
        face
    }
}

/// Looks for a direction `d` with `p ± t·d` both in the set; `None` means none of
/// the candidate or `seeds` random directions works.
pub fn find_midpoint_chord(
    member: impl Fn(&[f64]) -> bool,
    p: &[f64],
    candidates: &[Point],
    seeds: usize,
    half_length: f64,
    seed: u64,
) -> Option<(Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = (0..seeds).filter_map(|_| {
        let d: Point = (0..p.len()).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
        linalg::unit(&d)
    });
    let dirs: Vec<Point> = candidates.iter().filter_map(|d| linalg::unit(d)).chain(random).collect();
    for d in dirs {
        let u = linalg::axpy(p, half_length, &d);
        let w = linalg::axpy(p, -half_length, &d);
        if member(&u) && member(&w) {
            return Some((u, w));
        }
    }
    None
}

/// Support function of the Example 2 body `{|x| + |z| ≤ 1, x² + y² ≤ 1}`.
pub fn example2_support(q: &[f64]) -> f64 {
    let g = |a: f64, b: f64| if a >= 0.0 { a.hypot(b) } else { b.abs() };
    let z = q[2].abs();
    z + g(q[0] - z, q[1]).max(g(-(q[0] + z), q[1]))
}

/// The polar of the Example 2 body: the square `(±1, 0, ±1)` and the unit circle of the `xy` plane.
pub fn example2_polar() -> GeneratorHull {
    let mut points = Vec::new();
    for x in [-1.0, 1.0] {
        for z in [-1.0, 1.0] {
            points.push(vec![x, 0.0, z]);
        }
    }
    let circle = Circle { center: vec![0.0; 3], u: vec![1.0, 0.0, 0.0], v: vec![0.0, 1.0, 0.0], radius: 1.0 };
    GeneratorHull { points, circles: vec![circle] }
}

/// The polar of the Example 3 body: the four circles `S₁±`, `S₂±` in ℝ⁴.
pub fn example4d_polar() -> GeneratorHull {
    let e = |i: usize| linalg::basis_vector(4, i);
    let mut circles = Vec::new();
    for s in [1.0, -1.0] {
        circles.push(Circle { center: linalg::scale(&e(2), s), u: e(0), v: e(1), radius: 1.0 });
    }
    for s in [1.0, -1.0] {
        circles.push(Circle { center: linalg::scale(&e(0), s), u: e(2), v: e(3), radius: 1.0 });
    }
    GeneratorHull { points: vec![], circles }
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceEntry {
    pub n: usize,
    /// Vertices of the extreme set (one point, or segment endpoints).
    pub set: Vec<Point>,
    pub exposing_functional: Point,
    /// How far the generators outside the exposed face fall below the support.
    pub gap: f64,
    pub extreme: bool,
    pub hausdorff_to_limit: f64,
    pub hausdorff_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Chord {
    pub endpoints: [Point; 2],
    pub midpoint: Point,
    /// Support of the body at each endpoint (at most one for polar membership).
    pub endpoint_support: Option<[f64; 2]>,
    /// Distance of each endpoint from the limit set.
    pub endpoint_offsets: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub fixture: String,
    pub sequence: Vec<SequenceEntry>,
    pub limit: Vec<Point>,
    pub limit_extreme: bool,
    pub chord: Chord,
    pub random_search_found_chord: usize,
    pub note: String,
}

const FACE_TOL: f64 = 1e-12;
const CHORD_SEEDS: usize = 1000;
const CHORD_HALF_LENGTH: f64 = 1e-3;

fn distance_to_segment(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab = linalg::sub(b, a);
    let t = (dot(&linalg::sub(x, a), &ab) / dot(&ab, &ab)).clamp(0.0, 1.0);
    linalg::dist(x, &linalg::axpy(a, t, &ab))
}

/// Evidence that the extreme sets of the polar of a named fixture are not a closed family.
pub fn nonclosedness_witness(fixture: &str, n_max: usize, seed: u64) -> Result<WitnessReport> {
    match fixture {
        "example2" => Ok(example2_witness(n_max, seed)),
        "example4d" => Ok(example4d_witness(n_max)),
        other => Err(Error::Domain(format!("no non-closedness witness for fixture '{other}'"))),
    }
}

fn example2_witness(n_max: usize, seed: u64) -> WitnessReport {
    let hull = example2_polar();
    let limit = vec![1.0, 0.0, 0.0];
    let member = |q: &[f64]| example2_support(q) <= 1.0 + FACE_TOL;
    let mut sequence = Vec::with_capacity(n_max);
    let mut found = 0;
    for n in 1..=n_max {
        let t = 1.0 / n as f64;
        let p = vec![t.cos(), t.sin(), 0.0];
        let face = hull.exposed_face(&p, FACE_TOL);
        let singleton = face.whole_circles.is_empty()
            && face.points.len() == 1
            && linalg::dist(&face.points[0], &p) <= FACE_TOL;
        let chord = find_midpoint_chord(member, &p, &[vec![0.0, 0.0, 1.0]], CHORD_SEEDS, CHORD_HALF_LENGTH, seed + n as u64);
        if chord.is_some() {
            found += 1;
        }
        sequence.push(SequenceEntry {
            n,
            hausdorff_to_limit: linalg::dist(&p, &limit),
            hausdorff_bound: 2.0 * (0.5 * t).sin(),
            set: vec![p.clone()],
            exposing_functional: p,
            gap: face.gap,
            extreme: singleton && chord.is_none(),
        });
    }
    let (u, w) = (vec![1.0, 0.0, 1.0], vec![1.0, 0.0, -1.0]);
    let midpoint = linalg::lerp(&u, &w, 0.5);
    let chord = Chord {
        endpoint_support: Some([example2_support(&u), example2_support(&w)]),
        endpoint_offsets: [linalg::dist(&u, &limit), linalg::dist(&w, &limit)],
        endpoints: [u, w],
        midpoint: midpoint.clone(),
    };
    let limit_extreme = !(midpoint == limit && chord.endpoint_support.unwrap().iter().all(|&s| s <= 1.0));
    WitnessReport {
        fixture: "example2".into(),
        sequence,
        limit: vec![limit],
        limit_extreme,
        chord,
        random_search_found_chord: found,
        note: "each {p_n} is the exposed face of the functional p_n; {(1,0,0)} is the midpoint of a chord of the polar".into(),
    }
}

fn example4d_witness(n_max: usize) -> WitnessReport {
    let hull = example4d_polar();
    let limit = vec![vec![1.0, 0.0, 1.0, 0.0], vec![1.0, 0.0, -1.0, 0.0]];
    let mut sequence = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let t = 1.0 / n as f64;
        let l = vec![t.cos(), t.sin(), 0.0, 0.0];
        let face = hull.exposed_face(&l, FACE_TOL);
        let mut set = face.points.clone();
        set.sort_by(|a, b| linalg::lex_cmp(b, a));
        let expected = [vec![t.cos(), t.sin(), 1.0, 0.0], vec![t.cos(), t.sin(), -1.0, 0.0]];
        let segment = face.whole_circles.is_empty()
            && set.len() == 2
            && set.iter().zip(&expected).all(|(a, b)| linalg::approx_eq(a, b, 1e-12));
        sequence.push(SequenceEntry {
            n,
            hausdorff_to_limit: hausdorff_distance(&set, &limit).unwrap_or(f64::INFINITY),
            hausdorff_bound: 2.0 * (0.5 * t).sin(),
            set,
            exposing_functional: l,
            gap: face.gap,
            extreme: segment,
        });
    }
    let (u, w) = (vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, -1.0]);
    let midpoint = linalg::lerp(&u, &w, 0.5);
    let offsets = [
        distance_to_segment(&u, &limit[0], &limit[1]),
        distance_to_segment(&w, &limit[0], &limit[1]),
    ];
    let on_limit = distance_to_segment(&midpoint, &limit[0], &limit[1]) == 0.0;
    WitnessReport {
        fixture: "example4d".into(),
        sequence,
        limit_extreme: !(on_limit && offsets.iter().all(|&o| o > 0.0)),
        limit,
        chord: Chord { endpoints: [u, w], midpoint, endpoint_support: None, endpoint_offsets: offsets },
        random_search_found_chord: 0,
        note: "segments on S1± exposed by (cos t, sin t, 0, 0) tend to a diameter of the disk spanned by S2+; \
               the extreme points stay closed; sampling evidence only"
            .into(),
    }
}
