//! Geodesic flow on a glued affine quadrilateral, the interval maps it
//! induces, their renormalization, and the homogeneous vector field in `C²`
//! whose trajectories project to the same geodesics.

pub mod exec;
pub mod field;
pub mod geodesics;
pub mod interval;
pub mod renorm;
pub mod scalar;
pub mod surface;
pub mod verify;

pub use exec::Execution;
pub use scalar::{parse_rational, Rational, Scalar};
