//! Shared numerical kernels: sphere grids, quadrature rules, differentiation,
//! closed-form eigen-solvers and convex half-space intersection.

pub mod diff;
pub mod eigen;
pub mod grid;
pub mod halfspace;
pub mod quadrature;

pub use diff::{spectral_derivative, AxisKind, Stencil};
pub use eigen::{eig_general, eig_symmetric, SymmetricEigen};
pub use grid::{build_sphere_grid, default_sphere_grid, GridScheme, SphereGrid};
pub use halfspace::{halfspace_intersection, ConvexBody, Polytope};
