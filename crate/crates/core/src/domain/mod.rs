//! Plane domains, conformal metrics and triangulations.

pub mod curve;
pub mod geometry;
pub mod mesh;
pub mod surface;

pub use curve::{BoundaryCurve, Point};
pub use geometry::{boundary_geodesic_curvature, isoperimetric_check, measure, small_volume_isoperimetric_check};
pub use mesh::{triangulate, TriMesh};
pub use surface::{ConformalFactor, ConformalSurface, CurvatureTag, FnFactor, PoincareDisk};
