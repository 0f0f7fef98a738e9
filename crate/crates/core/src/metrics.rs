//! Funk, reverse-Funk and Hilbert distances, computed either from ray exits
//! (cross ratios on a body) or from the gauge `M(y/x)` on a cone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Polytope};
use crate::cone::{lift_point, lift_polytope_to_cone, PolyCone};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, dot, Point};
use crate::EPS_GEO;

/// Values of the gauge and of Funk distances on the ambient space; IEEE infinities
/// carry the order conventions (`ln 0 = −∞`).
pub type ExtendedReal = f64;

/// Floor applied to `t − |xy|` before taking logarithms near the boundary.
pub const NEAR_BOUNDARY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Funk,
    Reverse,
    Hilbert,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Funk => "funk",
            Metric::Reverse => "reverse",
            Metric::Hilbert => "hilbert",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "funk" => Ok(Metric::Funk),
            "reverse" => Ok(Metric::Reverse),
            "hilbert" => Ok(Metric::Hilbert),
            other => Err(Error::Domain(format!("unknown metric '{other}'"))),
        }
    }
}

/// `M(y/x) = inf{λ > 0 : λx − y ∈ closure(c)}` via the dual generators.
///
/// Returns 0 when every ratio `a·y / a·x` is nonpositive.
pub fn m_ratio(c: &PolyCone, y: &[f64], x: &[f64]) -> Result<ExtendedReal> {
    c.check_interior(x)?;
    check_dim(c.dim(), y.len())?;
    let sup = c
        .normals()
        .iter()
        .map(|a| dot(a, y) / dot(a, x))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(if sup > 0.0 { sup } else { 0.0 })
}

/// `log M(x/y)`; `y` must be interior, `x` is any ambient point.
pub fn funk_cone(c: &PolyCone, x: &[f64], y: &[f64]) -> Result<ExtendedReal> {
    let m = m_ratio(c, x, y)?;
    if x == y {
        return Ok(0.0);
    }
    Ok(m.ln())
}

/// `funk(y, x) = log M(y/x)`; `x` interior, `y` may lie on the boundary.
pub fn reverse_funk_cone(c: &PolyCone, x: &[f64], y: &[f64]) -> Result<ExtendedReal> {
    let m = m_ratio(c, y, x)?;
    if x == y {
        return Ok(0.0);
    }
    Ok(m.ln())
}

pub fn hilbert_cone(c: &PolyCone, x: &[f64], y: &[f64]) -> Result<f64> {
    c.check_interior(y)?;
    Ok(funk_cone(c, x, y)? + funk_cone(c, y, x)?)
}

/// Cross-ratio Funk distance `log(|zx| / |zy|)`, `z` the boundary point hit by the
/// ray from `x` through `y`.
pub fn funk_body(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    body.check_interior(x)?;
    body.check_interior(y)?;
    let d = linalg::dist(x, y);
    if d <= EPS_GEO {
        return Ok(0.0);
    }
    let u = linalg::scale(&linalg::sub(y, x), 1.0 / d);
    let t = body.exit_param(x, &u);
    Ok((t / (t - d).max(NEAR_BOUNDARY_FLOOR)).ln())
}

/// `funk(y, x)`, extended to boundary points `y`: `log(|wy| / |wx|)` with `w` the
/// boundary point beyond `x` on the ray from `y`.
pub fn reverse_funk_body(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    body.check_interior(x)?;
    check_dim(body.dim(), y.len())?;
    if !body.closure_contains(y, EPS_GEO) {
        let (slack, id) = body.min_slack(y);
        return Err(Error::NotInterior { constraint: id.to_string(), slack });
    }
    let d = linalg::dist(x, y);
    if d <= EPS_GEO {
        return Ok(0.0);
    }
    let u = linalg::scale(&linalg::sub(x, y), 1.0 / d);
    let t = body.exit_param(x, &u);
    Ok(((t + d) / t).ln())
}

pub fn hilbert_body(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(funk_body(body, x, y)? + funk_body(body, y, x)?)
}

/// Funk distance through the gauge definition instead of the ray exit:
/// the dual formula on the lifted cone for polytopes, the support-function closed
/// form for balls, and bisection on `inf{λ : λŷ − x̂ ∈ closure}` otherwise.
pub fn funk_body_gauge(body: &ConvexBody, x: &[f64], y: &[f64]) -> Result<f64> {
    body.check_interior(x)?;
    body.check_interior(y)?;
    if linalg::dist(x, y) <= EPS_GEO {
        return Ok(0.0);
    }
    match body {
        ConvexBody::Polytope(p) => LiftedPolytope::new(p).funk(x, y),
        ConvexBody::Ball(b) => {
            let p = linalg::sub(x, &b.center);
            let q = linalg::sub(y, &b.center);
            let r2 = b.radius * b.radius;
            let a = dot(&q, &q) - r2;
            let bb = 2.0 * r2 - 2.0 * dot(&p, &q);
            let c = dot(&p, &p) - r2;
            let disc = (bb * bb - 4.0 * a * c).max(0.0);
            Ok(((-bb - disc.sqrt()) / (2.0 * a)).ln())
        }
        ConvexBody::Intersection(_) => {
            // y + s(y − x) stays in the closure exactly for s ≤ s*, and M = 1 + 1/s*.
            let step = linalg::sub(y, x);
            let inside = |s: f64| body.closure_contains(&linalg::axpy(y, s, &step), 0.0);
            let mut hi = 1.0;
            while inside(hi) {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-16 * hi {
                    break;
                }
            }
            Ok((1.0 + 2.0 / (lo + hi)).ln())
        }
    }
}

/// Outcome of the homogeneity identity check for a lineality direction `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneityShift {
    /// `funk((1−α)z + αx, y)`
    pub shifted_source: f64,
    /// `funk(x, (1−α)z + αy)`
    pub shifted_target: f64,
    /// `log α + funk(x, y)` and `−log α + funk(x, y)`
    pub predicted: (f64, f64),
    pub residual: f64,
}

pub const HOMOGENEITY_TOL: f64 = 1e-10;

/// Checks `funk((1−α)z+αx, y) = log α + funk(x,y)` and
/// `funk(x, (1−α)z+αy) = −log α + funk(x,y)` for `z` in the lineality space.
pub fn homogeneity_shift(c: &PolyCone, z: &[f64], x: &[f64], y: &[f64], alpha: f64) -> Result<HomogeneityShift> {
    check_dim(c.dim(), z.len())?;
    if !c.in_lineality(z) {
        return Err(Error::NotInLineality);
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain("alpha must be positive and finite".into()));
    }
    c.check_interior(x)?;
    c.check_interior(y)?;
    let base = funk_cone(c, x, y)?;
    let xs = linalg::lerp(z, x, alpha);
    let ys = linalg::lerp(z, y, alpha);
    let shifted_source = funk_cone(c, &xs, y)?;
    let shifted_target = funk_cone(c, x, &ys)?;
    let predicted = (alpha.ln() + base, -alpha.ln() + base);
    let residual = (shifted_source - predicted.0).abs().max((shifted_target - predicted.1).abs());
    if residual > HOMOGENEITY_TOL {
        return Err(Error::Property(format!("homogeneity residual {residual:.3e}")));
    }
    Ok(HomogeneityShift { shifted_source, shifted_target, predicted, residual })
}

/// A space carrying a Funk distance.
pub trait FunkGeometry {
    fn dim(&self) -> usize;
    fn is_interior(&self, x: &[f64]) -> bool;
    fn funk(&self, x: &[f64], y: &[f64]) -> Result<f64>;
    /// `funk(y, x)`, with `y` allowed on the boundary where the geometry supports it.
    fn reverse(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.funk(y, x)
    }
    fn hilbert(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.funk(x, y)? + self.funk(y, x)?)
    }
    fn distance(&self, metric: Metric, x: &[f64], y: &[f64]) -> Result<f64> {
        match metric {
            Metric::Funk => self.funk(x, y),
            Metric::Reverse => self.reverse(x, y),
            Metric::Hilbert => self.hilbert(x, y),
        }
    }
}

impl FunkGeometry for PolyCone {
    fn dim(&self) -> usize {
        PolyCone::dim(self)
    }
    fn is_interior(&self, x: &[f64]) -> bool {
        self.contains(x)
    }
    fn funk(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        funk_cone(self, x, y)
    }
    fn reverse(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        reverse_funk_cone(self, x, y)
    }
    fn hilbert(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        hilbert_cone(self, x, y)
    }
}

impl FunkGeometry for ConvexBody {
    fn dim(&self) -> usize {
        ConvexBody::dim(self)
    }
    fn is_interior(&self, x: &[f64]) -> bool {
        self.contains(x).unwrap_or(false)
    }
    fn funk(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        funk_body(self, x, y)
    }
    fn reverse(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        reverse_funk_body(self, x, y)
    }
}

/// A polytope viewed through its lifted cone: body coordinates in, dual-formula
/// distances out. Numerically steadier than ray exits close to the boundary.
#[derive(Debug, Clone)]
pub struct LiftedPolytope {
    pub cone: PolyCone,
    body: ConvexBody,
}

impl LiftedPolytope {
    pub fn new(p: &Polytope) -> Self {
        LiftedPolytope { cone: lift_polytope_to_cone(p), body: ConvexBody::Polytope(p.clone()) }
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn lift(&self, x: &[f64]) -> Point {
        lift_point(x)
    }
}

impl FunkGeometry for LiftedPolytope {
    fn dim(&self) -> usize {
        self.body.dim()
    }
    fn is_interior(&self, x: &[f64]) -> bool {
        self.body.contains(x).unwrap_or(false)
    }
    fn funk(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.body.check_interior(y)?;
        check_dim(self.body.dim(), x.len())?;
        funk_cone(&self.cone, &lift_point(x), &lift_point(y))
    }
    fn reverse(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.body.check_interior(x)?;
        check_dim(self.body.dim(), y.len())?;
        reverse_funk_cone(&self.cone, &lift_point(x), &lift_point(y))
    }
}
