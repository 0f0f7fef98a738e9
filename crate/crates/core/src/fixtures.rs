//! Named bodies and cones used by the harnesses, the CLI and the tests.

use std::f64::consts::PI;

use crate::body::{ConvexBody, ConvexConstraint, Halfspace, Intersection, Quadratic};
use crate::cone::PolyCone;
use crate::error::{Error, Result};
use crate::linalg::Point;

pub const FIXTURE_NAMES: [&str; 6] = ["disk", "square", "triangle", "cube", "example2", "example4d"];

pub fn fixture(name: &str) -> Result<ConvexBody> {
    match name {
        "disk" => disk(),
        "square" => square(),
        "triangle" => triangle(),
        "cube" => cube(),
        "example2" => example2(),
        "example4d" => example4d(),
        other => Err(Error::Domain(format!("unknown fixture '{other}'"))),
    }
}

/// Unit disk centered at the origin.
pub fn disk() -> Result<ConvexBody> {
    ConvexBody::ball(vec![0.0, 0.0], 1.0)
}

/// `[-1, 1]²`.
pub fn square() -> Result<ConvexBody> {
    ConvexBody::polytope(vec![vec![-1.0, -1.0], vec![1.0, -1.0], vec![1.0, 1.0], vec![-1.0, 1.0]])
}

/// Regular triangle inscribed in the unit circle, centroid at the origin.
pub fn triangle() -> Result<ConvexBody> {
    ConvexBody::polytope(
        (0..3)
            .map(|k| {
                let t = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
    )
}

/// `[-1, 1]³`.
pub fn cube() -> Result<ConvexBody> {
    let mut vertices = Vec::new();
    for k in 0..8 {
        vertices.push((0..3).map(|j| if k >> j & 1 == 1 { 1.0 } else { -1.0 }).collect());
    }
    ConvexBody::polytope(vertices)
}

/// `{|x| + |z| ≤ 1} ∩ {x² + y² ≤ 1}` in ℝ³.
pub fn example2() -> Result<ConvexBody> {
    let mut halfspaces = Vec::new();
    for sx in [-1.0, 1.0] {
        for sz in [-1.0, 1.0] {
            halfspaces.push(Halfspace { a: vec![sx, 0.0, sz], b: 1.0 });
        }
    }
    let cylinder = Quadratic {
        q: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]],
        c: vec![0.0; 3],
        r: 1.0,
    };
    let bbox = (vec![-1.25; 3], vec![1.25; 3]);
    Ok(ConvexBody::Intersection(Intersection::new(
        3,
        halfspaces,
        vec![cylinder],
        vec![],
        bbox,
        Some(vec![0.0; 3]),
    )?))
}

/// `{hypot(x1, x2) + |x3| ≤ 1} ∩ {|x1| + hypot(x3, x4) ≤ 1}` in ℝ⁴.
pub fn example4d() -> Result<ConvexBody> {
    let first = ConvexConstraint::new("hypot(x1,x2)+|x3|", |x: &[f64]| x[0].hypot(x[1]) + x[2].abs() - 1.0);
    let second = ConvexConstraint::new("|x1|+hypot(x3,x4)", |x: &[f64]| x[0].abs() + x[2].hypot(x[3]) - 1.0);
    let bbox = (vec![-1.25; 4], vec![1.25; 4]);
    Ok(ConvexBody::Intersection(Intersection::new(
        4,
        vec![],
        vec![],
        vec![first, second],
        bbox,
        Some(vec![0.0; 4]),
    )?))
}

/// `{x : x₂ > 0}` in ℝ².
pub fn half_plane() -> PolyCone {
    PolyCone::new(2, vec![vec![0.0, 1.0]]).expect("valid cone")
}

/// A wedge in ℝ³ whose closure has a single edge, the `x₁` axis: `{x₂ > 0, x₃ > 0}`.
pub fn edge_cone() -> PolyCone {
    PolyCone::new(3, vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).expect("valid cone")
}

/// Cone over `[-1, 1]²` placed at height one.
pub fn square_cone() -> PolyCone {
    let normals: Vec<Point> = vec![
        vec![1.0, 0.0, 1.0],
        vec![-1.0, 0.0, 1.0],
        vec![0.0, 1.0, 1.0],
        vec![0.0, -1.0, 1.0],
    ];
    PolyCone::new(3, normals).expect("valid cone")
}
