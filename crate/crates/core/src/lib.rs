//! Biharmonic heat flow with dynamic boundary conditions on a planar annulus.

pub mod error;
pub mod geometry;
pub mod oracle;

pub use error::CoreError;
pub use geometry::{build_radial_mesh, laplace_beltrami_symbol, DomainConfig, ModeIndex, RadialMesh};
