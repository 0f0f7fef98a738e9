//! Funk, reverse-Funk and Hilbert geometries on bounded convex domains and
//! polyhedral cones, with tools for their horofunction boundaries.

pub mod body;
pub mod cli;
pub mod cone;
pub mod error;
pub mod fixtures;
pub mod horo;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod lp;
pub mod metrics;
pub mod polar;
pub mod sampled;
pub mod verify;

pub use body::{ConvexBody, ConvexConstraint, Facet, Halfspace, Intersection, Polytope, Quadratic};
pub use cone::{ConeChain, PolyCone};
pub use error::{Error, Result};
pub use linalg::Point;
pub use metrics::{FunkGeometry, Metric};

/// Geometric tolerance for active constraints, interiority and boundary placement.
pub const EPS_GEO: f64 = 1e-10;
/// Relative bracket width at which black-box ray exits stop bisecting.
pub const BISECTION_REL_WIDTH: f64 = 1e-12;
/// Directions shorter than this are rejected.
pub const DIRECTION_FLOOR: f64 = 1e-14;
/// Facet enumeration limits (brute force over `d`-subsets).
pub const MAX_FACET_DIM: usize = 4;
pub const MAX_FACET_VERTICES: usize = 64;
