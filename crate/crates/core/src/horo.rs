//! Horofunctions of the Funk, reverse-Funk and Hilbert geometries on polyhedral
//! cones: evaluators, Busemann descriptors and their catalog, homogeneous
//! extension, the conjugate slice `Z` and the collineation `Λ`.

use itertools::Itertools;

use crate::cone::{open_tangent_cone, tangent_cone_family, PolyCone};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, Point};
use crate::metrics::m_ratio;
use crate::sampled::SampledFunction;

/// Residual allowed in the homogeneity precondition of [`extend_homogeneous`].
pub const EXTENSION_HOMOGENEITY_TOL: f64 = 1e-8;
/// Agreement required between two admissible scalings in an extension.
pub const EXTENSION_CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum Horofunction {
    /// `x ↦ log M(z/x) − log M(z/b)` on `cone`.
    ReverseFunk { cone: PolyCone, z: Point, offset: f64 },
    /// `x ↦ log M(x/p) − log M(b/p)` with the gauge of `cone`.
    Funk { cone: PolyCone, p: Point, offset: f64 },
    /// Sum of a reverse-Funk and a Funk part.
    Hilbert { reverse: Box<Horofunction>, funk: Box<Horofunction> },
    /// `y ↦ −log λ + h((1−λ)x + λy)` on the tangent cone at `x`.
    Extended { inner: Box<Horofunction>, cone: PolyCone, x: Point, tangent: PolyCone },
    Sampled(SampledFunction),
}

impl Horofunction {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Horofunction::ReverseFunk { cone, z, offset } => Ok(m_ratio(cone, z, x)?.ln() - offset),
            Horofunction::Funk { cone, p, offset } => Ok(m_ratio(cone, x, p)?.ln() - offset),
            Horofunction::Hilbert { reverse, funk } => Ok(reverse.eval(x)? + funk.eval(x)?),
            Horofunction::Extended { inner, cone, x: base, tangent } => {
                tangent.check_interior(x)?;
                let mut lambda = 1.0f64;
                let mut arg = x.to_vec();
                for _ in 0..1100 {
                    arg = linalg::lerp(base, x, lambda);
                    if cone.contains(&arg) {
                        break;
                    }
                    lambda *= 0.5;
                }
                if !cone.contains(&arg) {
                    return Err(Error::Budget("no admissible scaling for the extension".into()));
                }
                let v1 = -lambda.ln() + inner.eval(&arg)?;
                let half = 0.5 * lambda;
                let v2 = -half.ln() + inner.eval(&linalg::lerp(base, x, half))?;
                if (v1 - v2).abs() > EXTENSION_CONSISTENCY_TOL * (1.0 + v1.abs()) {
                    return Err(Error::Property(format!(
                        "extension depends on the scaling: {v1} vs {v2}"
                    )));
                }
                Ok(v1)
            }
            Horofunction::Sampled(f) => f.value_at(x),
        }
    }
}

/// `r_{C,z}`: the reverse-Funk horofunction of the boundary ray `z`, vanishing at `b`.
pub fn reverse_horofunction(c: &PolyCone, z: &[f64], b: &[f64]) -> Result<Horofunction> {
    c.boundary_ray(z)?;
    if c.in_lineality(z) {
        return Err(Error::InLineality);
    }
    let offset = m_ratio(c, z, b)?.ln();
    Ok(Horofunction::ReverseFunk { cone: c.clone(), z: z.to_vec(), offset })
}

/// `h_{T,p}`: the Funk horofunction of the interior point `p` of `t`, vanishing at `b`.
pub fn funk_horofunction(t: &PolyCone, p: &[f64], b: &[f64]) -> Result<Horofunction> {
    t.check_interior(p)?;
    t.check_interior(b)?;
    let offset = m_ratio(t, b, p)?.ln();
    Ok(Horofunction::Funk { cone: t.clone(), p: p.to_vec(), offset })
}

/// Names one Busemann point of the Hilbert geometry on `cone`: a boundary ray `z`,
/// tangent-cone steps starting from the tangent cone at `z`, and a point `p` of the
/// resulting cone.
#[derive(Debug, Clone)]
pub struct BusemannDescriptor {
    pub cone: PolyCone,
    pub z: Point,
    /// Boundary points at which further tangent cones are taken, starting from `τ(cone, z)`.
    pub chain: Vec<Point>,
    pub p: Point,
    pub basepoint: Point,
    target: PolyCone,
}

impl BusemannDescriptor {
    pub fn new(cone: PolyCone, z: Point, chain: Vec<Point>, p: Point, basepoint: Point) -> Result<Self> {
        cone.boundary_ray(&z)?;
        if cone.in_lineality(&z) {
            return Err(Error::InLineality);
        }
        cone.check_interior(&basepoint)?;
        let mut target = open_tangent_cone(&cone, &z)?;
        for x in &chain {
            target = open_tangent_cone(&target, x)?;
        }
        target.check_interior(&p)?;
        Ok(BusemannDescriptor { cone, z, chain, p, basepoint, target })
    }

    /// The cone `T` at the end of the chain.
    pub fn target(&self) -> &PolyCone {
        &self.target
    }

    pub fn reverse_part(&self) -> Horofunction {
        reverse_horofunction(&self.cone, &self.z, &self.basepoint).expect("validated at construction")
    }

    pub fn funk_part(&self) -> Horofunction {
        funk_horofunction(&self.target, &self.p, &self.basepoint).expect("validated at construction")
    }

    pub fn evaluator(&self) -> Horofunction {
        Horofunction::Hilbert { reverse: Box::new(self.reverse_part()), funk: Box::new(self.funk_part()) }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.cone.check_interior(x)?;
        self.evaluator().eval(x)
    }
}

/// `r_{C,z}(x) + h_{T,p}(x)` for the descriptor's data.
pub fn busemann_eval(d: &BusemannDescriptor, x: &[f64]) -> Result<f64> {
    d.eval(x)
}

#[derive(Debug, Clone, Default)]
pub struct CatalogOptions {
    /// Basepoint; defaults to the analytic center of the cone.
    pub basepoint: Option<Point>,
    /// Number of extra points `p` emitted per member.
    pub p_grid: usize,
}

#[derive(Debug, Clone)]
pub struct CatalogMember {
    pub cone: PolyCone,
    pub descriptor: BusemannDescriptor,
    pub p_grid: Vec<Point>,
}

/// Busemann points attached to one boundary face.
#[derive(Debug, Clone)]
pub struct CatalogFamily {
    /// Normals tight on the face.
    pub face: Vec<usize>,
    pub face_dim: usize,
    /// Indices into the cone's extreme rays spanning the face.
    pub rays: Vec<usize>,
    pub z: Point,
    pub members: Vec<CatalogMember>,
}

fn p_grid(cone: &PolyCone, count: usize) -> Vec<Point> {
    let p = cone.interior_point();
    let d = cone.dim();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut dir = linalg::basis_vector(d, k % d);
        if (k / d) % 2 == 1 {
            dir = linalg::scale(&dir, -1.0);
        }
        let mut s = 0.5;
        let mut q = linalg::axpy(p, s, &dir);
        while !cone.contains(&q) && s > 1e-6 {
            s *= 0.5;
            q = linalg::axpy(p, s, &dir);
        }
        if cone.contains(&q) {
            out.push(linalg::unit(&q).unwrap_or(q));
        }
    }
    out
}

/// One family per proper nonzero face of `c`, each listing the members of the
/// tangent family of `τ(c, z)` for the face barycenter `z`.
pub fn busemann_catalog(c: &PolyCone, options: &CatalogOptions) -> Result<Vec<CatalogFamily>> {
    if !c.is_pointed() {
        return Err(Error::Unsupported("catalog needs a cone without lines".into()));
    }
    let basepoint = options.basepoint.clone().unwrap_or_else(|| c.interior_point().to_vec());
    c.check_interior(&basepoint)?;
    let rays = c.extreme_rays()?;
    let mut families = Vec::new();
    for face in c.faces() {
        if face.active.is_empty() || face.dim == 0 {
            continue;
        }
        let in_face: Vec<usize> = (0..rays.len())
            .filter(|&k| face.active.iter().all(|&i| dot(&c.normals()[i], &rays[k]).abs() <= 1e-9))
            .collect();
        let mut sum = vec![0.0; c.dim()];
        for &k in &in_face {
            sum = linalg::add(&sum, &rays[k]);
        }
        let z = linalg::unit(&sum).ok_or_else(|| Error::Degenerate("face without rays".into()))?;
        let tangent = open_tangent_cone(c, &z)?;
        let mut members = Vec::new();
        for member in tangent_cone_family(&tangent) {
            let p = member.cone.interior_point().to_vec();
            let descriptor =
                BusemannDescriptor::new(c.clone(), z.clone(), member.chain.steps.clone(), p, basepoint.clone())?;
            members.push(CatalogMember {
                p_grid: p_grid(&member.cone, options.p_grid),
                cone: member.cone,
                descriptor,
            });
        }
        families.push(CatalogFamily { face: face.active, face_dim: face.dim, rays: in_face, z, members });
    }
    Ok(families)
}

/// Extends `h`, defined on `t` and homogeneous along `x`, to the tangent cone `τ(t, x)`.
pub fn extend_homogeneous(h: &Horofunction, t: &PolyCone, x: &[f64]) -> Result<Horofunction> {
    t.boundary_ray(x)?;
    let tangent = open_tangent_cone(t, x)?;
    let p = t.interior_point().to_vec();
    let mut samples = vec![p.clone()];
    for j in 0..t.dim() {
        let q = linalg::axpy(&p, 0.3, &linalg::basis_vector(t.dim(), j));
        if t.contains(&q) {
            samples.push(q);
        }
    }
    for y in &samples {
        let hy = h.eval(y)?;
        for lambda in [0.25, 0.5, 0.75] {
            let lhs = h.eval(&linalg::lerp(x, y, lambda))?;
            let residual = (lhs - lambda.ln() - hy).abs();
            if residual > EXTENSION_HOMOGENEITY_TOL {
                return Err(Error::Property(format!(
                    "function is not homogeneous along the boundary point (residual {residual:.3e})"
                )));
            }
        }
    }
    Ok(Horofunction::Extended { inner: Box::new(h.clone()), cone: t.clone(), x: x.to_vec(), tangent })
}

/// `Z_{T,x} = T* ∩ {z : M(b/x)⟨z,x⟩ ≤ 1}`.
#[derive(Debug, Clone)]
pub struct ZSet {
    /// Generators of `T*` (the normals of `T`).
    pub generators: Vec<Point>,
    /// The slice is `{z : ⟨z, slice⟩ ≤ 1}` with `slice = M(b/x)·x`.
    pub slice: Point,
    pub m_bx: f64,
    pub vertices: Vec<Point>,
}

impl ZSet {
    /// `max_v ⟨v, y⟩` over the vertices.
    pub fn support(&self, y: &[f64]) -> f64 {
        self.vertices.iter().map(|v| dot(v, y)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Builds `Z_{t,x}` and enumerates the vertices of its bounded slice from an
/// inequality description of `T*` (the extreme rays of `T`).
pub fn z_set(t: &PolyCone, x: &[f64], b: &[f64]) -> Result<ZSet> {
    t.check_interior(x)?;
    check_dim(t.dim(), b.len())?;
    let m_bx = m_ratio(t, b, x)?;
    let slice = linalg::scale(x, m_bx);
    if t.normals().iter().any(|a| !(dot(a, &slice) > 0.0)) {
        return Err(Error::Unsupported("unbounded slice".into()));
    }
    let d = t.dim();
    let lineality = t.lineality();
    let l = lineality.len();
    // Rays of the pointed part of closure(T): faces one dimension above the lineality.
    let mut rays: Vec<Point> = Vec::new();
    for face in t.faces() {
        if face.dim == l + 1 {
            if let Some(r) = linalg::unit(&linalg::project_out(&face.point, &lineality)) {
                rays.push(r);
            }
        }
    }
    // Rows: g·z ≥ 0 for each ray, then slice·z ≤ 1 (last).
    let mut rows: Vec<(Point, f64)> = rays.iter().map(|r| (r.clone(), 0.0)).collect();
    rows.push((slice.clone(), 1.0));
    let feasible = |z: &[f64]| -> bool {
        let scale = 1.0 + linalg::norm(z);
        rays.iter().all(|r| dot(r, z) >= -1e-9 * scale) && dot(&slice, z) <= 1.0 + 1e-9 * scale
    };
    let mut vertices: Vec<Point> = Vec::new();
    if d > l {
        for subset in (0..rows.len()).combinations(d - l) {
            let mut a: Vec<Point> = lineality.clone();
            let mut rhs = vec![0.0; l];
            for &k in &subset {
                a.push(rows[k].0.clone());
                rhs.push(rows[k].1);
            }
            let Some(z) = linalg::solve(&a, &rhs) else { continue };
            if linalg::rank(&a, d, 1e-10) < d || !feasible(&z) {
                continue;
            }
            let z: Point = z.into_iter().map(|v| linalg::clean_zero(if v.abs() < 1e-15 { 0.0 } else { v })).collect();
            if !vertices.iter().any(|v| linalg::approx_eq(v, &z, 1e-9)) {
                vertices.push(z);
            }
        }
    }
    vertices.sort_by(|a, b| linalg::lex_cmp(a, b));
    Ok(ZSet { generators: t.normals().to_vec(), slice, m_bx, vertices })
}

/// Largest gap between `exp h_{t,x}(y) = M(y/x)/M(b/x)` and `max_{v∈Z} ⟨v,y⟩` over the probes.
pub fn conjugate_check(t: &PolyCone, x: &[f64], b: &[f64], probes: &[Point]) -> Result<f64> {
    let z = z_set(t, x, b)?;
    let mut worst = 0.0f64;
    for y in probes {
        check_dim(t.dim(), y.len())?;
        let lhs = m_ratio(t, y, x)? / z.m_bx;
        let rhs = z.support(y);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// `(x, y) ↦ (x/y, 1/y − 1)` for last coordinate `y ∈ (0, 1]`.
pub fn lambda_map(q: &[f64]) -> Result<Point> {
    let (&y, x) = q.split_last().ok_or_else(|| Error::Domain("empty point".into()))?;
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain(format!("last coordinate {y} is outside (0, 1]")));
    }
    let mut out: Point = x.iter().map(|v| v / y).collect();
    out.push(1.0 / y - 1.0);
    Ok(out)
}

/// `(x, y) ↦ (x/(1+y), 1/(1+y))` for last coordinate `y ≥ 0`.
pub fn lambda_inv(q: &[f64]) -> Result<Point> {
    let (&y, x) = q.split_last().ok_or_else(|| Error::Domain("empty point".into()))?;
    if !(y >= 0.0 && y.is_finite()) {
        return Err(Error::Domain(format!("last coordinate {y} is negative")));
    }
    let mut out: Point = x.iter().map(|v| v / (1.0 + y)).collect();
    out.push(1.0 / (1.0 + y));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::ConvexBody;
    use crate::cone::lift_polytope_to_cone;

    fn half_plane() -> PolyCone {
        PolyCone::new(2, vec![vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn reverse_horofunction_on_orthant() {
        let o = PolyCone::orthant(2);
        let b = [1.0, 1.0];
        let r = reverse_horofunction(&o, &[1.0, 0.0], &b).unwrap();
        for x in [[2.0, 0.5], [0.3, 4.0]] {
            assert!((r.eval(&x).unwrap() + x[0].ln()).abs() < 1e-15);
        }
        assert_eq!(r.eval(&b).unwrap(), 0.0);
        let r2 = reverse_horofunction(&o, &[2.0, 0.0], &b).unwrap();
        assert!((r2.eval(&[0.7, 0.2]).unwrap() - r.eval(&[0.7, 0.2]).unwrap()).abs() < 1e-15);
        assert!(matches!(reverse_horofunction(&o, &[1.0, 1.0], &b), Err(Error::NotOnBoundary(_))));
    }

    #[test]
    fn funk_horofunction_on_half_plane() {
        let f = funk_horofunction(&half_plane(), &[0.0, 1.0], &[0.0, 1.0]).unwrap();
        assert!((f.eval(&[3.0, 2.5]).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        assert_eq!(f.eval(&[0.0, 1.0]).unwrap(), 0.0);
        assert!(funk_horofunction(&half_plane(), &[1.0, 0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn descriptor_on_orthant() {
        let d = BusemannDescriptor::new(PolyCone::orthant(2), vec![1.0, 0.0], vec![], vec![0.0, 1.0], vec![1.0, 1.0])
            .unwrap();
        for x in [[2.0, 0.5], [0.3, 4.0]] {
            assert!((busemann_eval(&d, &x).unwrap() - (-x[0].ln() + x[1].ln())).abs() < 1e-15);
        }
        assert_eq!(busemann_eval(&d, &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn catalog_family_counts() {
        let o = busemann_catalog(&PolyCone::orthant(2), &CatalogOptions::default()).unwrap();
        assert_eq!(o.len(), 2);
        assert!(o.iter().all(|f| f.members.len() == 1));
        let sq = ConvexBody::polytope(vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]])
            .unwrap();
        let c = lift_polytope_to_cone(sq.as_polytope().unwrap());
        let cat = busemann_catalog(&c, &CatalogOptions::default()).unwrap();
        assert_eq!(cat.len(), 8);
        let facet_families: Vec<_> = cat.iter().filter(|f| f.face_dim == 2).collect();
        let edge_families: Vec<_> = cat.iter().filter(|f| f.face_dim == 1).collect();
        assert_eq!((facet_families.len(), edge_families.len()), (4, 4));
        assert!(facet_families.iter().all(|f| f.members.len() == 1));
        assert!(edge_families.iter().all(|f| f.members.len() == 3));
        let seg = ConvexBody::polytope(vec![vec![-1.0], vec![1.0]]).unwrap();
        let c = lift_polytope_to_cone(seg.as_polytope().unwrap());
        assert_eq!(busemann_catalog(&c, &CatalogOptions::default()).unwrap().len(), 2);
        assert!(busemann_catalog(&half_plane(), &CatalogOptions::default()).is_err());
    }

    #[test]
    fn extension_of_funk_part_to_tangent_cone() {
        let o = PolyCone::orthant(2);
        let p = [0.0, 1.0];
        let b = [1.0, 1.0];
        let big = funk_horofunction(&half_plane(), &p, &b).unwrap();
        let ext = extend_homogeneous(&big, &o, &[1.0, 0.0]).unwrap();
        for y in [[-3.0, 0.5], [2.0, 2.0], [0.5, 0.1]] {
            assert!((ext.eval(&y).unwrap() - big.eval(&y).unwrap()).abs() < 1e-12);
        }
        // Inside the original cone the scaling λ = 1 is admissible.
        assert_eq!(ext.eval(&[2.0, 3.0]).unwrap(), big.eval(&[2.0, 3.0]).unwrap());
        let not_homogeneous = reverse_horofunction(&o, &[0.0, 1.0], &b).unwrap();
        assert!(extend_homogeneous(&not_homogeneous, &o, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn z_set_examples() {
        let o = PolyCone::orthant(2);
        let z = z_set(&o, &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(z.vertices, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(z.slice, vec![1.0, 1.0]);
        let z = z_set(&o, &[2.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!(z.m_bx, 1.0);
        assert_eq!(z.slice, vec![2.0, 1.0]);
        assert_eq!(z.vertices, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.0]]);
    }

    #[test]
    fn conjugate_examples() {
        let o = PolyCone::orthant(2);
        let b = [1.0, 1.0];
        let z = z_set(&o, &b, &b).unwrap();
        assert_eq!(z.support(&[3.0, 2.0]), 3.0);
        assert_eq!(z.support(&b), 1.0);
        assert_eq!(z.support(&[0.0, 0.0]), 0.0);
        let dev = conjugate_check(&o, &b, &b, &[vec![3.0, 2.0], b.to_vec(), vec![0.0, 0.0]]).unwrap();
        assert!(dev < 1e-15);
    }

    #[test]
    fn z_set_with_lineality() {
        let h = half_plane();
        let z = z_set(&h, &[0.5, 2.0], &[0.0, 1.0]).unwrap();
        assert_eq!(z.vertices.len(), 2);
        let dev = conjugate_check(&h, &[0.5, 2.0], &[0.0, 1.0], &[vec![4.0, 0.5], vec![-1.0, 3.0]]).unwrap();
        assert!(dev < 1e-14);
    }

    #[test]
    fn lambda_map_examples() {
        assert_eq!(lambda_map(&[0.3, -0.2, 1.0]).unwrap(), vec![0.3, -0.2, 0.0]);
        assert_eq!(lambda_map(&[1.0, 0.0, 0.5]).unwrap(), vec![2.0, 0.0, 1.0]);
        assert!(lambda_map(&[1.0, 0.0]).is_err());
        assert!(lambda_inv(&[1.0, -0.5]).is_err());
        let q = [0.4, -0.7, 0.25];
        let back = lambda_inv(&lambda_map(&q).unwrap()).unwrap();
        assert!(linalg::approx_eq(&back, &q, 1e-15));
    }
}
