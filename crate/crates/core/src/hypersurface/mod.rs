//! Discretized hypersurfaces and their anisotropic curvatures.

mod curvature;
mod families;
mod io;
mod patch;
mod surface;

pub use curvature::{
    anisotropic_gauss, camc_check, curvature_field, curvature_field_unchecked, edge_condition, fundamental_forms,
    graph_amc, normal, shape_operator, CamcReport, CurvatureField, EdgePoint, EdgeReport, Exclusion,
    FundamentalForms, GraphGrid, NodeCurvature, MAX_EXCLUDED_FRACTION,
};
pub(crate) use curvature::xi_tilde;
pub use families::{
    circle, cube, ellipse, ellipsoid, graph, hemispheres, sphere, star_shaped, torus, two_arcs, wulff_boundary, Mode,
};
pub use io::{curvature_csv, load_tabulated, parse_tabulated, tabulated_csv};
pub use patch::{Axis, Differ, ParametricPatch, PatchGeometry, IMMERSION_TOL};
pub use surface::{Edge, End, PiecewiseHypersurface, Side, EDGE_TOL};
