//! Fundamental forms, the anisotropic shape operator and derived curvatures.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::integrand::Integrand;
use crate::numerics::eig_general;
use crate::{Error, Result, Vec3};

use super::patch::{fill_flagged, Axis, ParametricPatch, PatchGeometry};
use super::surface::PiecewiseHypersurface;

/// Largest excluded fraction tolerated by curvature integrals.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.1;

/// Curvature data at one included node.
#[derive(Clone, Debug)]
pub struct NodeCurvature {
    pub patch: usize,
    pub node: usize,
    pub position: Vec3,
    pub nu: Vec3,
    /// `ξ̃ = ξ ∘ ν`.
    pub xi: Vec3,
    pub gamma: f64,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `h_ij = −⟨ν_i, X_j⟩`.
    pub h: DMatrix<f64>,
    /// `h̃_ij = −⟨ξ̃_i, X_j⟩`.
    pub h_tilde: DMatrix<f64>,
    /// `S^γ = (h̃_ij)(g^ij)`.
    pub shape: DMatrix<f64>,
    /// `σ_0 … σ_n` of the eigenvalues of `S^γ`.
    pub sigma: Vec<f64>,
    /// `H_r = σ_r / C(n, r)`, `r = 0 … n`.
    pub mean: Vec<f64>,
    /// `Λ = H_1`.
    pub lambda: f64,
    /// `Λ` from `−(1/n) trace (D²γ + γ·1) ∘ dν`, where the Hessian exists.
    pub lambda_trace: Option<f64>,
    /// Anisotropic principal curvatures; complex in general.
    pub principal: Vec<Complex64>,
    /// `(n−1)σ₁² − 2nσ₂`.
    pub umbilic_deviation: f64,
    pub area_element: f64,
    /// Quadrature weight including the area element.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exclusion {
    pub patch: usize,
    pub node: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct CurvatureField {
    pub dimension: usize,
    pub nodes: Vec<NodeCurvature>,
    pub excluded: Vec<Exclusion>,
    pub total: usize,
    /// Largest angle between computed and prescribed normals, for patches that prescribe them.
    pub normal_override_deviation: Option<f64>,
}

impl CurvatureField {
    pub fn excluded_fraction(&self) -> f64 {
        self.excluded.len() as f64 / self.total.max(1) as f64
    }

    /// Weighted mean and `max − min` of `Λ` over included nodes.
    pub fn lambda_stats(&self) -> (f64, f64) {
        let (mut s, mut w) = (0.0, 0.0);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in &self.nodes {
            s += c.lambda * c.weight;
            w += c.weight;
            lo = lo.min(c.lambda);
            hi = hi.max(c.lambda);
        }
        (s / w, hi - lo)
    }

    /// Largest `|k_i|` over included nodes.
    pub fn max_principal(&self) -> f64 {
        self.nodes
            .iter()
            .flat_map(|c| c.principal.iter())
            .map(|k| k.norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|Im k_i|` over included nodes.
    pub fn max_imaginary(&self) -> f64 {
        self.nodes
            .iter()
            .flat_map(|c| c.principal.iter())
            .map(|k| k.im.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Λ − Λ_trace|` where both are available.
    pub fn max_trace_discrepancy(&self) -> f64 {
        self.nodes
            .iter()
            .filter_map(|c| c.lambda_trace.map(|t| (t - c.lambda).abs()))
            .fold(0.0, f64::max)
    }

    /// `∫ f dA` over included nodes.
    pub fn integrate(&self, f: impl Fn(&NodeCurvature) -> f64) -> f64 {
        self.nodes.iter().map(|c| f(c) * c.weight).sum()
    }
}

fn binomial(n: usize, r: usize) -> f64 {
    match (n, r) {
        (_, 0) => 1.0,
        (1, 1) => 1.0,
        (2, 1) => 2.0,
        (2, 2) => 1.0,
        _ => unreachable!(),
    }
}

fn gram(t: &[Vec3], u: &[Vec3]) -> DMatrix<f64> {
    DMatrix::from_fn(t.len(), u.len(), |i, j| t[i].dot(&u[j]))
}

struct PatchFields {
    geo: PatchGeometry,
    xi: Vec<Vec3>,
    xi_failed: Vec<bool>,
    nu_d: Vec<Vec<Vec3>>,
    xi_d: Vec<Vec<Vec3>>,
}

fn patch_fields(g: &Integrand, patch: &ParametricPatch) -> PatchFields {
    let geo = patch.geometry();
    let mut xi_failed = vec![false; patch.len()];
    let mut xi: Vec<Vec3> = geo
        .normals
        .iter()
        .enumerate()
        .map(|(i, nu)| match g.ambient_gradient(nu) {
            Ok(x) => x,
            Err(_) => {
                xi_failed[i] = true;
                Vec3::zeros()
            }
        })
        .collect();
    fill_flagged(patch, &mut xi, &xi_failed);
    let d = patch.differ();
    let nu_d = (0..patch.dimension()).map(|a| d.vector(&geo.normals, a)).collect();
    let xi_d = (0..patch.dimension()).map(|a| d.vector(&xi, a)).collect();
    PatchFields { geo, xi, xi_failed, nu_d, xi_d }
}

fn node_curvature(
    g: &Integrand,
    patch: &ParametricPatch,
    f: &PatchFields,
    weights: &[f64],
    pi: usize,
    i: usize,
) -> std::result::Result<NodeCurvature, String> {
    let n = patch.dimension();
    if f.geo.singular[i] {
        return Err("parametrization is not an immersion".into());
    }
    let nu = f.geo.normals[i];
    if f.xi_failed[i] || g.is_non_smooth(&nu) {
        return Err("integrand is not smooth at the normal".into());
    }
    let t: Vec<Vec3> = (0..n).map(|a| f.geo.tangents[a][i]).collect();
    let nu_i: Vec<Vec3> = (0..n).map(|a| f.nu_d[a][i]).collect();
    let xi_i: Vec<Vec3> = (0..n).map(|a| f.xi_d[a][i]).collect();
    let gm = gram(&t, &t);
    let g_inv = gm.clone().try_inverse().ok_or("singular metric")?;
    let h = -gram(&nu_i, &t);
    let h_tilde = -gram(&xi_i, &t);
    let shape = &h_tilde * &g_inv;
    let mut sigma = vec![1.0, shape.trace()];
    if n == 2 {
        sigma.push(shape.determinant());
    }
    let mean: Vec<f64> = sigma.iter().enumerate().map(|(r, s)| s / binomial(n, r)).collect();
    let umbilic_deviation = if n == 2 { sigma[1] * sigma[1] - 4.0 * sigma[2] } else { 0.0 };
    let lambda_trace = g.ambient_hessian(&nu).ok().map(|hess| {
        let w: Vec<Vec3> = nu_i.iter().map(|v| hess * v).collect();
        let c = gram(&w, &t) * &g_inv;
        -c.trace() / n as f64
    });
    let gamma = g.extend(&nu);
    if !shape.iter().all(|v| v.is_finite()) {
        return Err("non-finite shape operator".into());
    }
    Ok(NodeCurvature {
        patch: pi,
        node: i,
        position: patch.points[i],
        nu,
        xi: f.xi[i],
        gamma,
        g: gm,
        g_inv,
        h,
        h_tilde,
        principal: eig_general(&shape),
        lambda: mean[1],
        shape,
        sigma,
        mean,
        lambda_trace,
        umbilic_deviation,
        area_element: f.geo.area_element[i],
        weight: weights[i] * f.geo.area_element[i],
    })
}

/// Curvature data at every node, without the exclusion limit.
pub fn curvature_field_unchecked(g: &Integrand, surface: &PiecewiseHypersurface) -> Result<CurvatureField> {
    if g.dimension != surface.dimension {
        return Err(Error::DimensionMismatch { expected: g.dimension, got: surface.dimension });
    }
    let mut nodes = Vec::new();
    let mut excluded = Vec::new();
    let mut deviation: Option<f64> = None;
    for (pi, patch) in surface.patches.iter().enumerate() {
        let f = patch_fields(g, patch);
        if let Some(d) = f.geo.override_deviation {
            deviation = Some(deviation.unwrap_or(0.0).max(d));
        }
        let weights = patch.parameter_weights();
        let results: Vec<_> = (0..patch.len())
            .into_par_iter()
            .map(|i| node_curvature(g, patch, &f, &weights, pi, i))
            .collect();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(c) => nodes.push(c),
                Err(reason) => excluded.push(Exclusion { patch: pi, node: i, reason }),
            }
        }
    }
    Ok(CurvatureField {
        dimension: surface.dimension,
        nodes,
        excluded,
        total: surface.node_count(),
        normal_override_deviation: deviation,
    })
}

/// Curvature data at every node. Fails when more than 10% of nodes are excluded.
pub fn curvature_field(g: &Integrand, surface: &PiecewiseHypersurface) -> Result<CurvatureField> {
    let field = curvature_field_unchecked(g, surface)?;
    if field.excluded_fraction() > MAX_EXCLUDED_FRACTION {
        return Err(Error::TooManyExcludedNodes { excluded: field.excluded.len(), total: field.total });
    }
    Ok(field)
}

fn check_node(patch: &ParametricPatch, node: usize) -> Result<()> {
    if node >= patch.len() {
        return Err(Error::InvalidPatch(format!("node {node} out of range ({} nodes)", patch.len())));
    }
    Ok(())
}

/// Unit normal at a node, oriented so that `(ν, ∂₁X, …, ∂_nX)` is positive.
pub fn normal(patch: &ParametricPatch, node: usize) -> Result<Vec3> {
    check_node(patch, node)?;
    let geo = patch.geometry();
    if geo.singular[node] {
        return Err(Error::SingularNode(node));
    }
    Ok(geo.normals[node])
}

#[derive(Clone, Debug)]
pub struct FundamentalForms {
    pub g: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub nu: Vec3,
}

/// `g_ij = ⟨X_i, X_j⟩`, `h_ij = −⟨ν_i, X_j⟩` and `ν` at a node.
pub fn fundamental_forms(patch: &ParametricPatch, node: usize) -> Result<FundamentalForms> {
    check_node(patch, node)?;
    let geo = patch.geometry();
    if geo.singular[node] {
        return Err(Error::SingularNode(node));
    }
    let d = patch.differ();
    let n = patch.dimension();
    let t: Vec<Vec3> = (0..n).map(|a| geo.tangents[a][node]).collect();
    let nu_i: Vec<Vec3> = (0..n).map(|a| d.vector(&geo.normals, a)[node]).collect();
    Ok(FundamentalForms { g: gram(&t, &t), h: -gram(&nu_i, &t), nu: geo.normals[node] })
}

/// `ξ̃ = ξ(ν)` at a node.
pub fn anisotropic_gauss(g: &Integrand, patch: &ParametricPatch, node: usize) -> Result<Vec3> {
    let nu = normal(patch, node)?;
    crate::wulff::xi(g, &nu)
}

/// `S^γ` at a node, assembled from differentiated `ξ̃`.
pub fn shape_operator(g: &Integrand, patch: &ParametricPatch, node: usize) -> Result<DMatrix<f64>> {
    check_node(patch, node)?;
    let f = patch_fields(g, patch);
    if f.geo.singular[node] {
        return Err(Error::SingularNode(node));
    }
    if f.xi_failed[node] {
        let nu = f.geo.normals[node];
        return Err(Error::NotDifferentiable((0..=patch.dimension()).map(|i| nu[i]).collect()));
    }
    let weights = patch.parameter_weights();
    node_curvature(g, patch, &f, &weights, 0, node)
        .map(|c| c.shape)
        .map_err(|_| Error::SingularNode(node))
}

/// Heights `f(u₁, u₂)` on an open rectangular grid.
#[derive(Clone, Debug)]
pub struct GraphGrid {
    pub axes: [Axis; 2],
    pub values: Vec<f64>,
}

impl GraphGrid {
    pub fn sample(f: impl Fn(f64, f64) -> f64, x: (f64, f64), y: (f64, f64), count: usize) -> Result<Self> {
        if count < 5 {
            return Err(Error::InvalidPatch("graph grids need at least 5 samples per axis".into()));
        }
        let axes = [Axis::open(count, x.0, x.1), Axis::open(count, y.0, y.1)];
        let (cx, cy) = (axes[0].coords(), axes[1].coords());
        let values = cx.iter().flat_map(|u| cy.iter().map(|v| f(*u, *v)).collect::<Vec<_>>()).collect();
        Ok(GraphGrid { axes, values })
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.axes[1].count + j
    }

    /// `(f₁, f₂, f₁₁, f₁₂, f₂₂)` at every node.
    pub fn derivatives(&self) -> [Vec<f64>; 5] {
        let d = super::patch::Differ::new(&self.axes);
        let f1 = d.scalar(&self.values, 0);
        let f2 = d.scalar(&self.values, 1);
        let f11 = d.scalar(&f1, 0);
        let f12 = d.scalar(&f1, 1);
        let f22 = d.scalar(&f2, 1);
        [f1, f2, f11, f12, f22]
    }
}

/// `Λ = ½ Σ γ̄_{x_i x_j}(−Df, 1) f_ij` for the graph of `f` at a node.
pub fn graph_amc(g: &Integrand, f: &GraphGrid, node: usize) -> Result<f64> {
    if g.dimension != 2 {
        return Err(Error::UnsupportedDimension(g.dimension));
    }
    if node >= f.values.len() {
        return Err(Error::InvalidPatch(format!("node {node} out of range")));
    }
    let [f1, f2, f11, f12, f22] = f.derivatives();
    let y = Vec3::new(-f1[node], -f2[node], 1.0);
    let r = y.norm();
    let hess = g.ambient_hessian(&(y / r)).map_err(|e| match e {
        Error::NotTwiceDifferentiable(v) => Error::NotDifferentiable(v),
        other => other,
    })? / r;
    Ok(0.5 * (hess[(0, 0)] * f11[node] + 2.0 * hess[(0, 1)] * f12[node] + hess[(1, 1)] * f22[node]))
}

/// The anisotropic normal jump at one pair of identified edge nodes.
#[derive(Clone, Debug)]
pub struct EdgePoint {
    pub position: Vec3,
    /// `ξ̃_a − ξ̃_b`.
    pub jump: Vec3,
    /// Projection of the jump onto `T_aM ∩ T_bM`.
    pub tangential: Vec3,
    /// Length of the jump component orthogonal to `T_aM ∩ T_bM`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct EdgeReport {
    pub edge: usize,
    pub points: Vec<EdgePoint>,
    /// Edge nodes where `ξ̃` could not be evaluated, with the reason.
    pub failures: Vec<(Vec3, String)>,
    pub max_residual: f64,
    pub holds: bool,
}

/// Tangent spaces closer than this (in `|ν_a × ν_b|`) are treated as equal.
const PARALLEL_TOL: f64 = 1e-8;

fn edge_point(n: usize, position: Vec3, nu_a: &Vec3, nu_b: &Vec3, jump: Vec3) -> EdgePoint {
    let cross = nu_a.cross(nu_b);
    let tangential = if cross.norm() < PARALLEL_TOL {
        // Same tangent space: drop the normal component.
        jump - nu_a * jump.dot(nu_a)
    } else if n == 2 {
        let line = cross.normalize();
        line * jump.dot(&line)
    } else {
        // Two distinct lines in the plane meet only at the origin.
        Vec3::zeros()
    };
    EdgePoint { position, jump, tangential, residual: (jump - tangential).norm() }
}

/// Checks `ξ̃_a − ξ̃_b ∈ T_aM ∩ T_bM` along every glued edge.
pub fn edge_condition(g: &Integrand, surface: &PiecewiseHypersurface, tol: f64) -> Result<Vec<EdgeReport>> {
    if g.dimension != surface.dimension {
        return Err(Error::DimensionMismatch { expected: g.dimension, got: surface.dimension });
    }
    let geos: Vec<PatchGeometry> = surface.patches.iter().map(|p| p.geometry()).collect();
    let scale = surface.scale();
    let mut reports = Vec::new();
    for (k, e) in surface.edges.iter().enumerate() {
        let a = surface.side_nodes(&e.a)?;
        let mut b = surface.side_nodes(&e.b)?;
        if e.reversed {
            b.reverse();
        }
        let mut points = Vec::new();
        let mut failures = Vec::new();
        for (&i, &j) in a.iter().zip(&b) {
            let position = surface.patches[e.a.patch].points[i];
            let (ga, gb) = (&geos[e.a.patch], &geos[e.b.patch]);
            if ga.singular[i] || gb.singular[j] {
                failures.push((position, "parametrization is not an immersion".to_string()));
                continue;
            }
            let (nu_a, nu_b) = (ga.normals[i], gb.normals[j]);
            match (g.ambient_gradient(&nu_a), g.ambient_gradient(&nu_b)) {
                (Ok(xa), Ok(xb)) => points.push(edge_point(surface.dimension, position, &nu_a, &nu_b, xa - xb)),
                (Err(err), _) | (_, Err(err)) => failures.push((position, err.to_string())),
            }
        }
        let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
        reports.push(EdgeReport {
            edge: k,
            holds: failures.is_empty() && max_residual <= tol * scale,
            points,
            failures,
            max_residual,
        });
    }
    Ok(reports)
}

#[derive(Clone, Debug)]
pub struct CamcReport {
    pub is_camc: bool,
    pub lambda_mean: f64,
    /// `max Λ − min Λ` over included nodes.
    pub lambda_spread: f64,
    pub edges: Vec<EdgeReport>,
    pub excluded: usize,
    pub total: usize,
}

/// Constant anisotropic mean curvature: `Λ` constant within `tol·|Λ_mean|` and
/// every edge condition satisfied.
pub fn camc_check(g: &Integrand, surface: &PiecewiseHypersurface, tol: f64) -> Result<CamcReport> {
    let field = curvature_field(g, surface)?;
    let edges = edge_condition(g, surface, tol)?;
    let (lambda_mean, lambda_spread) = field.lambda_stats();
    Ok(CamcReport {
        is_camc: lambda_spread <= tol * lambda_mean.abs() && edges.iter().all(|e| e.holds),
        lambda_mean,
        lambda_spread,
        edges,
        excluded: field.excluded.len(),
        total: field.total,
    })
}

/// Geometry and `ξ̃` at every node of a patch; nodes where `ξ` fails are
/// flagged and filled from their neighbours.
pub(crate) fn xi_tilde(g: &Integrand, patch: &ParametricPatch) -> (PatchGeometry, Vec<Vec3>, Vec<bool>) {
    let f = patch_fields(g, patch);
    (f.geo, f.xi, f.xi_failed)
}
