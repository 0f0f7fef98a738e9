//! JSON descriptions of bodies and Busemann descriptors.

use serde::{Deserialize, Serialize};

use crate::body::{ConvexBody, Halfspace, Intersection, Quadratic};
use crate::error::{Error, Result};
use crate::linalg::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSpec {
    pub a: Point,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticSpec {
    pub q: Vec<Point>,
    pub c: Point,
    pub r: f64,
}

/// A body as read from a file. Black-box constraints are only available through fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BodySpec {
    Polytope {
        vertices: Vec<Point>,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    Intersection {
        #[serde(default)]
        halfspaces: Vec<HalfspaceSpec>,
        #[serde(default)]
        quadratics: Vec<QuadraticSpec>,
        bbox: (Point, Point),
        #[serde(default)]
        interior: Option<Point>,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<ConvexBody> {
        match self {
            BodySpec::Polytope { vertices } => ConvexBody::polytope(vertices.clone()),
            BodySpec::Ball { center, radius } => ConvexBody::ball(center.clone(), *radius),
            BodySpec::Intersection { halfspaces, quadratics, bbox, interior } => {
                let dim = bbox.0.len();
                let halfspaces = halfspaces.iter().map(|h| Halfspace { a: h.a.clone(), b: h.b }).collect();
                let quadratics =
                    quadratics.iter().map(|q| Quadratic { q: q.q.clone(), c: q.c.clone(), r: q.r }).collect();
                Ok(ConvexBody::Intersection(Intersection::new(
                    dim,
                    halfspaces,
                    quadratics,
                    vec![],
                    bbox.clone(),
                    interior.clone(),
                )?))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("body file: {e}")))
    }
}

/// A Busemann point of a polytope in body coordinates: boundary point `z`, further
/// tangent-cone steps in lifted coordinates, and a point `p` of the final cone
/// (lifted coordinates; defaults to the basepoint).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSpec {
    pub z: Point,
    #[serde(default)]
    pub chain: Vec<Point>,
    #[serde(default)]
    pub p: Option<Point>,
}

impl DescriptorSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("descriptor file: {e}")))
    }
}
