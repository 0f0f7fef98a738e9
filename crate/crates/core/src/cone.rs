//! Open polyhedral cones given by facet normals, their faces, duals and tangent cones.

use std::collections::{BTreeMap, VecDeque};

use nalgebra::DMatrix;

use crate::body::Polytope;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, norm, Point};
use crate::lp::{self, Row};
use crate::EPS_GEO;

/// Slack below which an LP optimum counts as zero.
const LP_ZERO: f64 = 1e-9;

/// The open cone `{v : a_i·v > 0 for all i}`; no normals means the whole space.
///
/// Normals are stored at unit length, deduplicated and sorted lexicographically,
/// so two cones built from positively rescaled normal lists compare equal.
#[derive(Debug, Clone)]
pub struct PolyCone {
    dim: usize,
    normals: Vec<Point>,
    interior: Point,
}

/// A face of the closed cone: the normals tight on it and a relative-interior point.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeFace {
    pub active: Vec<usize>,
    /// Unit relative-interior point, or the zero vector for the apex.
    pub point: Point,
    /// Dimension of the linear span of the face.
    pub dim: usize,
}

fn canonical_normals(dim: usize, normals: Vec<Point>) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = Vec::with_capacity(normals.len());
    for a in normals {
        check_dim(dim, a.len())?;
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite normal".into()));
        }
        let u = linalg::unit(&a).ok_or_else(|| Error::Degenerate("zero normal".into()))?;
        let u: Point = u.into_iter().map(linalg::clean_zero).collect();
        if !out.iter().any(|b| linalg::approx_eq(b, &u, 1e-12)) {
            out.push(u);
        }
    }
    out.sort_by(|a, b| linalg::lex_cmp(a, b));
    Ok(out)
}

/// Maximizer of `Σ log(a_i·v) − m|v|²/2`; it has unit norm and is orthogonal to the
/// lineality space.
fn analytic_center(normals: &[Point], start: Point) -> Point {
    let m = normals.len() as f64;
    let d = start.len();
    let objective = |v: &[f64]| -> f64 {
        normals.iter().map(|a| dot(a, v).ln()).sum::<f64>() - 0.5 * m * dot(v, v)
    };
    let mut v = start;
    for _ in 0..100 {
        let s: Vec<f64> = normals.iter().map(|a| dot(a, &v)).collect();
        let mut grad: Point = linalg::scale(&v, -m);
        let mut h = DMatrix::<f64>::identity(d, d) * m;
        for (a, si) in normals.iter().zip(&s) {
            for j in 0..d {
                grad[j] += a[j] / si;
                for k in 0..d {
                    h[(j, k)] += a[j] * a[k] / (si * si);
                }
            }
        }
        let Some(step) = linalg::solve_spd(&h, &grad) else { break };
        let decrement = dot(&grad, &step);
        if decrement < 1e-26 {
            break;
        }
        let f0 = objective(&v);
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand = linalg::axpy(&v, alpha, &step);
            if normals.iter().all(|a| dot(a, &cand) > 0.0) && objective(&cand) >= f0 - 1e-15 {
                v = cand;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }
    linalg::unit(&v).unwrap_or(v)
}

impl PolyCone {
    pub fn new(dim: usize, normals: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("cone dimension must be positive".into()));
        }
        let normals = canonical_normals(dim, normals)?;
        if normals.is_empty() {
            return Ok(PolyCone { dim, normals, interior: linalg::basis_vector(dim, 0) });
        }
        let rows: Vec<Row> = normals.iter().map(|a| Row::new(a, 0.0)).collect();
        let (v, t) = lp::max_margin(dim, &rows, &[], 1.0, 1.0).ok_or(Error::NotSolid)?;
        if t <= LP_ZERO {
            return Err(Error::NotSolid);
        }
        let interior = analytic_center(&normals, v);
        Ok(PolyCone { dim, normals, interior })
    }

    pub fn whole_space(dim: usize) -> Self {
        PolyCone::new(dim, Vec::new()).expect("whole space is solid")
    }

    /// The positive orthant `{v : v_i > 0}`.
    pub fn orthant(dim: usize) -> Self {
        PolyCone::new(dim, (0..dim).map(|i| linalg::basis_vector(dim, i)).collect())
            .expect("orthant is solid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    /// Analytic center of the normal slacks at unit norm.
    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Strict membership in the open cone.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && self.normals.iter().all(|a| dot(a, x) > 0.0)
    }

    pub fn check_interior(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim, x.len())?;
        for (i, a) in self.normals.iter().enumerate() {
            let s = dot(a, x);
            if !(s > 0.0) {
                return Err(Error::NotInterior { constraint: format!("cone normal {i}"), slack: s });
            }
        }
        Ok(())
    }

    /// Normals tight at the ray of `x`; every normal when `x` is zero.
    pub fn active_set(&self, x: &[f64]) -> Vec<usize> {
        match linalg::unit(x) {
            None => (0..self.normals.len()).collect(),
            Some(u) => (0..self.normals.len())
                .filter(|&i| dot(&self.normals[i], &u).abs() <= EPS_GEO)
                .collect(),
        }
    }

    /// Validates a boundary point of the closed cone and returns its unit ray
    /// (or zero for the apex).
    pub fn boundary_ray(&self, x: &[f64]) -> Result<Point> {
        check_dim(self.dim, x.len())?;
        let u = linalg::unit(x).unwrap_or_else(|| vec![0.0; self.dim]);
        for (i, a) in self.normals.iter().enumerate() {
            let s = dot(a, &u);
            if s < -EPS_GEO {
                return Err(Error::Domain(format!("point violates cone normal {i} (slack {s:.3e})")));
            }
        }
        if self.active_set(&u).is_empty() {
            return Err(Error::NotOnBoundary("interior point of the cone".into()));
        }
        Ok(u)
    }

    pub fn in_lineality(&self, x: &[f64]) -> bool {
        let scale = norm(x).max(f64::MIN_POSITIVE);
        self.normals.iter().all(|a| dot(a, x).abs() <= EPS_GEO * scale)
    }

    pub fn lineality(&self) -> Vec<Point> {
        linalg::nullspace(&self.normals, self.dim, 1e-10)
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality().is_empty()
    }

    /// The cone cut out by a subset of the normals.
    pub fn subcone(&self, indices: &[usize]) -> Result<PolyCone> {
        PolyCone::new(self.dim, indices.iter().map(|&i| self.normals[i].clone()).collect())
    }

    /// Indices of normals that are not implied by the others.
    pub fn irredundant_indices(&self) -> Vec<usize> {
        (0..self.normals.len())
            .filter(|&j| {
                let rows: Vec<Row> = self
                    .normals
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, a)| Row::new(a, 0.0))
                    .collect();
                let obj = linalg::scale(&self.normals[j], -1.0);
                match lp::maximize(self.dim, &obj, &rows, &[], 1.0) {
                    Some((_, value)) => value > LP_ZERO,
                    None => true,
                }
            })
            .collect()
    }

    /// Canonical normal set with redundant normals removed.
    pub fn signature(&self) -> Vec<Point> {
        self.irredundant_indices().into_iter().map(|i| self.normals[i].clone()).collect()
    }

    /// Whether both descriptions cut out the same cone.
    pub fn same_cone(&self, other: &PolyCone) -> bool {
        let (a, b) = (self.signature(), other.signature());
        self.dim == other.dim && a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| linalg::approx_eq(x, y, 1e-9))
    }

    /// Smallest face containing the face cut out by `set`: adds every normal that is
    /// forced to vanish there and returns a relative-interior point.
    pub fn face_closure(&self, set: &[usize]) -> ConeFace {
        let mut active: Vec<usize> = set.to_vec();
        let eq: Vec<Row> = set.iter().map(|&i| Row::new(&self.normals[i], 0.0)).collect();
        let ge: Vec<Row> = self.normals.iter().map(|a| Row::new(a, 0.0)).collect();
        let mut point = vec![0.0; self.dim];
        for j in 0..self.normals.len() {
            if set.contains(&j) {
                continue;
            }
            match lp::maximize(self.dim, &self.normals[j], &ge, &eq, 1.0) {
                Some((v, value)) if value > LP_ZERO => {
                    for (p, x) in point.iter_mut().zip(&v) {
                        *p += x;
                    }
                }
                _ => active.push(j),
            }
        }
        active.sort_unstable();
        let tight: Vec<Point> = active.iter().map(|&i| self.normals[i].clone()).collect();
        let dim = self.dim - linalg::rank(&tight, self.dim, 1e-10);
        let point = if dim == 0 { vec![0.0; self.dim] } else { linalg::unit(&point).unwrap_or(point) };
        ConeFace { active, point, dim }
    }

    /// Every face of the closed cone, from the cone itself down to its minimal face.
    pub fn faces(&self) -> Vec<ConeFace> {
        let mut seen: BTreeMap<Vec<usize>, ConeFace> = BTreeMap::new();
        let top = self.face_closure(&[]);
        let mut queue = VecDeque::from([top.clone()]);
        seen.insert(top.active.clone(), top);
        while let Some(face) = queue.pop_front() {
            for j in 0..self.normals.len() {
                if face.active.contains(&j) {
                    continue;
                }
                let mut set = face.active.clone();
                set.push(j);
                set.sort_unstable();
                if seen.contains_key(&set) {
                    continue;
                }
                let next = self.face_closure(&set);
                if !seen.contains_key(&next.active) {
                    seen.insert(next.active.clone(), next.clone());
                    queue.push_back(next);
                }
            }
        }
        let mut faces: Vec<ConeFace> = seen.into_values().collect();
        faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.active.cmp(&b.active)));
        faces
    }

    /// Unit generators of the extreme rays; requires a pointed cone.
    pub fn extreme_rays(&self) -> Result<Vec<Point>> {
        if !self.is_pointed() {
            return Err(Error::Unsupported("extreme rays of a cone containing lines".into()));
        }
        Ok(self.faces().into_iter().filter(|f| f.dim == 1).map(|f| f.point).collect())
    }
}

/// Closed cone generated by finitely many vectors.
#[derive(Debug, Clone)]
pub struct GeneratedCone {
    pub dim: usize,
    pub generators: Vec<Point>,
}

impl GeneratedCone {
    pub fn contains(&self, v: &[f64]) -> bool {
        lp::in_generated_cone(v, &self.generators, 1e-9)
    }

    /// The dual `{v : g·v ≥ 0}` as an open cone; needs a pointed generated cone.
    pub fn dual(&self) -> Result<PolyCone> {
        PolyCone::new(self.dim, self.generators.clone())
    }

    /// Facet normals of the generated cone (brute force over `(d−1)`-subsets).
    pub fn facet_normals(&self) -> Result<Vec<Point>> {
        let d = self.dim;
        if linalg::rank(&self.generators, d, 1e-10) < d {
            return Err(Error::NotSolid);
        }
        let mut normals: Vec<Point> = Vec::new();
        let subsets = itertools::Itertools::combinations(0..self.generators.len(), d - 1);
        for subset in subsets {
            let refs: Vec<&[f64]> = subset.iter().map(|&k| self.generators[k].as_slice()).collect();
            let Some(mut n) = linalg::orthogonal_complement_vector(&refs, d) else { continue };
            let (mut pos, mut neg) = (false, false);
            for g in &self.generators {
                let s = dot(g, &n) / norm(g);
                pos |= s > 1e-9;
                neg |= s < -1e-9;
            }
            if pos && neg {
                continue;
            }
            if neg {
                n = linalg::scale(&n, -1.0);
            }
            if !normals.iter().any(|m| linalg::approx_eq(m, &n, 1e-9)) {
                normals.push(n);
            }
        }
        canonical_normals(d, normals)
    }
}

/// The dual cone: generated by the normals of `c`.
pub fn dual_cone(c: &PolyCone) -> GeneratedCone {
    GeneratedCone { dim: c.dim, generators: c.normals.clone() }
}

/// Open tangent cone at a boundary point: the cone of the active normals.
pub fn open_tangent_cone(c: &PolyCone, x: &[f64]) -> Result<PolyCone> {
    let u = c.boundary_ray(x)?;
    c.subcone(&c.active_set(&u))
}

/// Basis of the lineality space `[0]_c`.
pub fn lineality(c: &PolyCone) -> Vec<Point> {
    c.lineality()
}

/// A base cone and the boundary points at which tangent cones are taken in turn.
#[derive(Debug, Clone)]
pub struct ConeChain {
    pub base: PolyCone,
    pub steps: Vec<Point>,
}

impl ConeChain {
    pub fn resolve(&self) -> Result<PolyCone> {
        let mut cone = self.base.clone();
        for x in &self.steps {
            cone = open_tangent_cone(&cone, x)?;
        }
        Ok(cone)
    }
}

#[derive(Debug, Clone)]
pub struct TangentMember {
    pub cone: PolyCone,
    pub chain: ConeChain,
    /// Indices (into the base cone's normals) tight on the face that produced it.
    pub normal_indices: Vec<usize>,
}

/// The family obtained from `{c}` by repeatedly taking open tangent cones.
///
/// Each member is the cone of the normals tight on some nonempty face, so the
/// family is read off the face lattice; `c` itself comes first.
pub fn tangent_cone_family(c: &PolyCone) -> Vec<TangentMember> {
    let mut members = vec![TangentMember {
        cone: c.clone(),
        chain: ConeChain { base: c.clone(), steps: Vec::new() },
        normal_indices: (0..c.normals.len()).collect(),
    }];
    let mut signatures = vec![c.signature()];
    for face in c.faces() {
        if face.active.is_empty() {
            continue;
        }
        let cone = c.subcone(&face.active).expect("subcone of a solid cone is solid");
        let sig = cone.signature();
        let known = signatures
            .iter()
            .any(|s| s.len() == sig.len() && s.iter().zip(&sig).all(|(x, y)| linalg::approx_eq(x, y, 1e-9)));
        if known {
            continue;
        }
        signatures.push(sig);
        members.push(TangentMember {
            cone,
            chain: ConeChain { base: c.clone(), steps: vec![face.point] },
            normal_indices: face.active,
        });
    }
    members
}

/// Index sets of the normals of `c` lying on each nonzero face of the dual cone,
/// computed from the face lattice of the dual (needs `c` pointed).
pub fn dual_face_index_sets(c: &PolyCone) -> Result<Vec<Vec<usize>>> {
    let rays = c.extreme_rays()?;
    let dual = PolyCone::new(c.dim, rays.clone())?;
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for face in dual.faces() {
        if face.dim == 0 {
            continue;
        }
        let set: Vec<usize> = (0..c.normals.len())
            .filter(|&i| face.active.iter().all(|&k| dot(&dual.normals[k], &c.normals[i]).abs() <= 1e-9))
            .collect();
        if !sets.contains(&set) {
            sets.push(set);
        }
    }
    sets.sort();
    Ok(sets)
}

/// The cone over `{(v, 1) : v ∈ P}`: each facet `a·x ≤ b` becomes `(−a, b)·(x, t) ≥ 0`.
pub fn lift_polytope_to_cone(p: &Polytope) -> PolyCone {
    let normals = p
        .facets()
        .iter()
        .map(|f| {
            let mut n = linalg::scale(&f.normal, -1.0);
            n.push(f.offset);
            n
        })
        .collect();
    PolyCone::new(p.dim() + 1, normals).expect("cone over a full-dimensional polytope is solid")
}

/// `(x, 1)`
pub fn lift_point(x: &[f64]) -> Point {
    let mut v = x.to_vec();
    v.push(1.0);
    v
}
