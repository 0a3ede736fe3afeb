//! Anisotropic surface energies on closed curves and surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`] holds sphere grids, quadrature, differentiation, small
//!   eigen-solvers and half-space intersection.
//! * [`integrand`] represents energy densities on the unit sphere together with
//!   their homogeneous extensions and the built-in gallery.
//! * [`wulff`] builds Cahn-Hoffman maps and Wulff shapes.
//! * [`hypersurface`] discretizes piecewise parametric hypersurfaces and computes
//!   the anisotropic shape operator and curvatures.
//! * [`variational`] checks the Steiner-type and Minkowski-type formulas, the
//!   first and second variations, and reports a stability verdict.
//! * [`cli`] implements the `wulffkit` command line tool.

pub mod cli;
pub mod error;
pub mod hypersurface;
pub mod integrand;
pub mod numerics;
pub mod variational;
pub mod wulff;

pub use error::{Error, Result};

/// Ambient vectors. Curves (n = 1) live in the `z = 0` plane.
pub type Vec3 = nalgebra::Vector3<f64>;
