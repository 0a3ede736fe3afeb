//! Cahn-Hoffman maps and Wulff shapes.
//!
//! Curvatures of the Cahn-Hoffman map `ξ = ∇γ̄` are reported with respect to
//! `ν` as unit normal: `μ_i = −1/ρ_i` where `ρ_i` are the eigenvalues of
//! `D²γ + γ·1`. The unit circle therefore has curvature −1.

pub(crate) mod export;

use rayon::prelude::*;

use crate::integrand::Integrand;
use crate::numerics::{eig_symmetric, halfspace_intersection, ConvexBody, SphereGrid};
use crate::{Error, Result, Vec3};

pub use export::{svg_plot, wulff_csv, wulff_obj, xi_csv};

/// Default relative threshold below which an eigenvalue of `A` counts as zero.
pub const SINGULAR_TOL: f64 = 1e-6;

/// `ξ(ν) = ∇γ̄(ν)`.
pub fn xi(g: &Integrand, nu: &Vec3) -> Result<Vec3> {
    if g.has_zero_set() {
        return Err(Error::NonPositiveIntegrand);
    }
    g.ambient_gradient(nu)
}

/// Eigenvalues of `D²γ + γ·1` at `ν`, ascending.
pub fn a_eigenvalues(g: &Integrand, nu: &Vec3) -> Result<Vec<f64>> {
    let a = g.sphere_hessian_operator(nu)?;
    Ok(eig_symmetric(&a.matrix)?.values)
}

fn curvature_from_rho(rho: f64, zero: f64) -> f64 {
    if rho == 0.0 {
        f64::NEG_INFINITY
    } else if rho.abs() <= zero {
        -rho.signum() * f64::INFINITY
    } else {
        -1.0 / rho
    }
}

/// Principal curvatures `μ_i = −1/ρ_i` of the Cahn-Hoffman map at `ν`.
///
/// Exactly vanishing `ρ_i` give `−∞`.
pub fn principal_curvatures_of_xi(g: &Integrand, nu: &Vec3) -> Result<Vec<f64>> {
    if g.has_zero_set() {
        return Err(Error::NonPositiveIntegrand);
    }
    Ok(a_eigenvalues(g, nu)?.into_iter().map(|r| curvature_from_rho(r, 0.0)).collect())
}

#[derive(Clone, Debug)]
pub struct CahnHoffmanSample {
    /// Grid index of the sample.
    pub index: usize,
    pub nu: Vec3,
    pub xi: Vec3,
    /// `ρ_1 … ρ_n`; empty where `γ` is not twice differentiable.
    pub a_eigenvalues: Vec<f64>,
    pub singular: bool,
    /// Indices into `a_eigenvalues` of the vanishing eigenvalues.
    pub vanished: Vec<usize>,
    /// `μ_i = −1/ρ_i`, signed infinity where `ρ_i` is below tolerance.
    pub principal_curvatures: Vec<f64>,
}

impl CahnHoffmanSample {
    pub fn twice_differentiable(&self) -> bool {
        !self.a_eigenvalues.is_empty()
    }
}

/// Samples of `ξ` over a grid, with singular flags.
#[derive(Clone, Debug)]
pub struct CahnHoffmanCloud {
    pub samples: Vec<CahnHoffmanSample>,
    /// Largest `|ρ|` over the grid.
    pub rho_scale: f64,
    pub tolerance: f64,
    /// Grid nodes where `ξ` is undefined.
    pub skipped: Vec<usize>,
}

/// Evaluates `ξ` and `A` at every grid node.
///
/// A node is singular when some `|ρ_i| ≤ tol · max|ρ|`, or when `det A`
/// changes sign towards a grid neighbour and this node has the smaller `|det A|`
/// of the two. The second rule catches transversal zeros that fall between
/// grid nodes.
pub fn cahn_hoffman_samples(g: &Integrand, grid: &SphereGrid, tol: Option<f64>) -> Result<CahnHoffmanCloud> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.dimension != g.dimension {
        return Err(Error::DimensionMismatch { expected: g.dimension, got: grid.dimension });
    }
    if g.has_zero_set() {
        return Err(Error::NonPositiveIntegrand);
    }
    let tol = tol.unwrap_or(SINGULAR_TOL);
    let raw: Vec<Option<(Vec3, Vec<f64>)>> = grid
        .nodes
        .par_iter()
        .map(|nu| {
            let x = g.ambient_gradient(nu).ok()?;
            let rho = if g.is_non_smooth(nu) { Vec::new() } else { a_eigenvalues(g, nu).unwrap_or_default() };
            Some((x, rho))
        })
        .collect();
    let rho_scale = raw
        .iter()
        .flatten()
        .flat_map(|(_, r)| r.iter())
        .fold(0.0f64, |m, r| m.max(r.abs()));
    let zero = tol * rho_scale;
    let det: Vec<Option<f64>> = raw
        .iter()
        .map(|s| s.as_ref().filter(|(_, r)| !r.is_empty()).map(|(_, r)| r.iter().product()))
        .collect();

    let mut samples = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for (i, entry) in raw.into_iter().enumerate() {
        let Some((x, rho)) = entry else {
            skipped.push(i);
            continue;
        };
        let mut vanished: Vec<usize> = (0..rho.len()).filter(|&k| rho[k].abs() <= zero).collect();
        if vanished.is_empty() {
            if let Some(d) = det[i] {
                let flips = grid.neighbors[i]
                    .iter()
                    .any(|&j| det[j].is_some_and(|e| e * d < 0.0 && (d.abs(), i) < (e.abs(), j)));
                if flips {
                    let k = (0..rho.len()).min_by(|a, b| rho[*a].abs().total_cmp(&rho[*b].abs())).unwrap();
                    vanished.push(k);
                }
            }
        }
        let principal_curvatures = rho
            .iter()
            .enumerate()
            .map(|(k, r)| if vanished.contains(&k) { curvature_from_rho(*r, f64::INFINITY) } else { curvature_from_rho(*r, zero) })
            .collect();
        samples.push(CahnHoffmanSample {
            index: i,
            nu: grid.nodes[i],
            xi: x,
            singular: !vanished.is_empty(),
            vanished,
            a_eigenvalues: rho,
            principal_curvatures,
        });
    }
    Ok(CahnHoffmanCloud { samples, rho_scale, tolerance: tol, skipped })
}

/// Singular samples of `ξ` grouped into connected clusters of grid nodes.
#[derive(Clone, Debug)]
pub struct SingularSet {
    pub samples: Vec<CahnHoffmanSample>,
    /// Clusters as lists of grid indices.
    pub clusters: Vec<Vec<usize>>,
}

pub fn singular_set(g: &Integrand, grid: &SphereGrid, tol: Option<f64>) -> Result<SingularSet> {
    let cloud = cahn_hoffman_samples(g, grid, tol)?;
    let mut flagged = vec![false; grid.len()];
    let samples: Vec<CahnHoffmanSample> = cloud.samples.into_iter().filter(|s| s.singular).collect();
    for s in &samples {
        flagged[s.index] = true;
    }
    Ok(SingularSet { clusters: grid.clusters(&flagged), samples })
}

/// `∫ nH dA` over the Cahn-Hoffman image, in the `ρ`-form
/// `(μ_1 + ⋯ + μ_n)/|μ_1 ⋯ μ_n| dSⁿ = −(ρ_1 + ⋯ + ρ_n)·sign(ρ_1 ⋯ ρ_n)` (n ≤ 2).
///
/// Singular and non-smooth nodes are excluded and their quadrature weight is
/// spread evenly over the remaining nodes. For n = 1 this is `∫κ ds`.
pub fn mean_curvature_integral(g: &Integrand, grid: &SphereGrid) -> Result<f64> {
    let cloud = cahn_hoffman_samples(g, grid, None)?;
    let mut sum = 0.0;
    let mut used = 0.0;
    for s in cloud.samples.iter().filter(|s| s.twice_differentiable() && !s.singular) {
        let rho = &s.a_eigenvalues;
        let value = if g.dimension == 1 {
            -rho[0].signum()
        } else {
            -(rho[0] + rho[1]) * (rho[0] * rho[1]).signum()
        };
        sum += grid.weights[s.index] * value;
        used += grid.weights[s.index];
    }
    if used == 0.0 {
        return Ok(0.0);
    }
    let total: f64 = grid.weights.iter().sum();
    Ok(sum * total / used)
}

/// The Wulff shape `∩ {⟨X, ν⟩ ≤ γ(ν)}` over the grid normals.
#[derive(Clone, Debug)]
pub struct WulffShape {
    pub dimension: usize,
    pub halfspace_normals: Vec<Vec3>,
    pub offsets: Vec<f64>,
    pub boundary: ConvexBody,
}

impl WulffShape {
    pub fn vertices(&self) -> &[Vec3] {
        self.boundary.vertices()
    }

    pub fn scale(&self) -> f64 {
        self.boundary.scale()
    }

    /// Area (n = 1) or volume (n = 2).
    pub fn measure(&self) -> f64 {
        self.boundary.measure()
    }

    /// Unsigned distance from `p` to the boundary.
    ///
    /// Exact for polygons. For polytopes this is the smallest facet slack inside
    /// and the largest facet violation outside, which is exact whenever the
    /// nearest boundary point lies in the interior of a facet.
    pub fn distance_to_boundary(&self, p: &Vec3) -> f64 {
        match &self.boundary {
            ConvexBody::Polygon(v) => {
                let m = v.len();
                (0..m)
                    .map(|i| {
                        let (a, b) = (v[i], v[(i + 1) % m]);
                        let e = b - a;
                        let t = ((p - a).dot(&e) / e.norm_squared()).clamp(0.0, 1.0);
                        (p - (a + e * t)).norm()
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            ConvexBody::Polytope(poly) => {
                let slack: Vec<f64> = poly.facets.iter().map(|f| f.offset - f.normal.dot(p)).collect();
                let worst = slack.iter().cloned().fold(f64::INFINITY, f64::min);
                if worst >= 0.0 {
                    worst
                } else {
                    -worst
                }
            }
        }
    }
}

pub fn wulff_construct(g: &Integrand, grid: &SphereGrid) -> Result<WulffShape> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.dimension != g.dimension {
        return Err(Error::DimensionMismatch { expected: g.dimension, got: grid.dimension });
    }
    if g.has_zero_set() {
        return Err(Error::NonPositiveIntegrand);
    }
    let offsets: Vec<f64> = grid.nodes.iter().map(|nu| g.evaluate(nu)).collect::<Result<_>>()?;
    if offsets.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::NonPositiveIntegrand);
    }
    let boundary = halfspace_intersection(&grid.nodes, &offsets, g.dimension).map_err(|e| match e {
        Error::UnboundedOrEmpty => Error::DegenerateIntersection(format!(
            "the {} sampled half-spaces do not bound a region; the grid does not cover the sphere",
            grid.len()
        )),
        other => other,
    })?;
    Ok(WulffShape { dimension: g.dimension, halfspace_normals: grid.nodes.clone(), offsets, boundary })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualNorm {
    pub value: f64,
    /// `γ(−ν) = γ(ν)` held at every grid node. When false the value is the
    /// support-function gauge rather than a norm.
    pub even: bool,
}

/// `γ*(Y) = max_ν ⟨Y, ν⟩/γ(ν)` over the grid.
pub fn dual_norm(g: &Integrand, grid: &SphereGrid, y: &Vec3) -> Result<DualNorm> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut value = f64::NEG_INFINITY;
    let mut even = true;
    for nu in &grid.nodes {
        let gv = g.evaluate(nu)?;
        let gm = g.evaluate(&(-nu))?;
        if (gv - gm).abs() > 1e-9 * gv.abs().max(1.0) {
            even = false;
        }
        if gv > 0.0 {
            value = value.max(y.dot(nu) / gv);
        }
    }
    Ok(DualNorm { value, even })
}

/// The support function of [`wulff_construct`], the largest convex integrand
/// below `γ` with the same Wulff shape.
pub fn convexify(g: &Integrand, grid: &SphereGrid) -> Result<Integrand> {
    let w = wulff_construct(g, grid)?;
    let mut out = Integrand::support(g.dimension, w.vertices().to_vec())?;
    out.name = format!("convexified {}", g.name);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XiComparison {
    pub equal: bool,
    /// Largest distance from a `ξ` sample to the Wulff boundary.
    pub max_deviation: f64,
    /// Largest distance from a Wulff vertex to the nearest `ξ` sample.
    pub reverse_deviation: f64,
    pub scale: f64,
}

/// Compares the `ξ` sample cloud with the Wulff boundary built on the same grid.
///
/// `equal` needs `max_deviation ≤ tol·scale` and, in the other direction, every
/// Wulff vertex within `tol·scale + spacing·max|ρ|` of some `ξ` sample. The
/// second threshold is the distance a vertex can sit from its two adjacent
/// tangency points on a grid of that spacing.
pub fn compare_xi_image_to_wulff(g: &Integrand, grid: &SphereGrid, tol: f64) -> Result<XiComparison> {
    let w = wulff_construct(g, grid)?;
    let cloud = cahn_hoffman_samples(g, grid, None)?;
    let scale = w.scale();
    let max_deviation = cloud
        .samples
        .par_iter()
        .map(|s| w.distance_to_boundary(&s.xi))
        .reduce(|| 0.0, f64::max);
    let reverse_deviation = w
        .vertices()
        .par_iter()
        .map(|v| cloud.samples.iter().map(|s| (s.xi - v).norm()).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    let reverse_tol = tol * scale + grid.spacing * cloud.rho_scale.max(scale);
    Ok(XiComparison {
        equal: max_deviation <= tol * scale && reverse_deviation <= reverse_tol,
        max_deviation,
        reverse_deviation,
        scale,
    })
}
