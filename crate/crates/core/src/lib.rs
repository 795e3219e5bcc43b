//! Dual curvature flows between hyperbolic space `H^{n+1}` and de Sitter
//! space `N`, both realized as quadrics in Minkowski space `R^{n+1,1}`.
//!
//! The crate simulates axially symmetric, strictly convex hypersurfaces under
//! the inverse curvature flow `ẋ = −F⁻¹ν` in de Sitter space and its Gauss-map
//! dual, the direct flow in hyperbolic space, and checks the flows' a priori
//! estimates (height bounds, gradient bounds, curvature bounds and pinching)
//! as runtime monitors.

pub mod curvature;
pub mod duality;
pub mod flow;
pub mod geometry;
pub mod minkowski;
pub mod snapshot;
pub mod spline;
pub mod stencil;
pub mod verify;

pub use curvature::{Classification, CurvatureError, CurvatureFunction};
pub use geometry::{compute_geometry, DiagnosticsRow, GeometryError, MeridianSurface, PointGeometry};
pub use minkowski::{LorentzTransform, LorentzVector, SpaceTag};
