//! Energy, volume, parallel hypersurfaces and the integral identities they satisfy.

use std::fmt;

use crate::hypersurface::{
    camc_check, curvature_field, xi_tilde, CurvatureField, PiecewiseHypersurface, MAX_EXCLUDED_FRACTION,
};
use crate::integrand::Integrand;
use crate::{Error, Result, Vec3};

/// Default Steiner sample times before rescaling.
pub const STEINER_T: [f64; 5] = [-0.2, -0.1, 0.05, 0.1, 0.2];

fn check_dimension(g: &Integrand, x: &PiecewiseHypersurface) -> Result<()> {
    if g.dimension != x.dimension {
        return Err(Error::DimensionMismatch { expected: g.dimension, got: x.dimension });
    }
    Ok(())
}

/// `Σ f(node)·w·√det g` over non-singular nodes, with the count of singular ones.
fn quadrature(x: &PiecewiseHypersurface, f: impl Fn(usize, usize, &Vec3) -> f64) -> (f64, usize) {
    let mut total = 0.0;
    let mut singular = 0;
    for (pi, p) in x.patches.iter().enumerate() {
        let geo = p.geometry();
        let w = p.parameter_weights();
        for i in 0..p.len() {
            if geo.singular[i] {
                singular += 1;
                continue;
            }
            total += f(pi, i, &geo.normals[i]) * w[i] * geo.area_element[i];
        }
    }
    (total, singular)
}

/// `𝓕_γ(X) = ∫ γ(ν) dA`.
pub fn energy(g: &Integrand, x: &PiecewiseHypersurface) -> Result<f64> {
    check_dimension(g, x)?;
    let (total, singular) = quadrature(x, |_, _, nu| g.extend(nu));
    let nodes = x.node_count();
    if singular as f64 > MAX_EXCLUDED_FRACTION * nodes as f64 {
        return Err(Error::TooManyExcludedNodes { excluded: singular, total: nodes });
    }
    Ok(total)
}

/// Enclosed volume `(1/(n+1)) ∫ ⟨X, ν⟩ dA`.
pub fn volume(x: &PiecewiseHypersurface) -> Result<f64> {
    x.check_closed()?;
    let (total, _) = quadrature(x, |pi, i, nu| x.patches[pi].points[i].dot(nu));
    Ok(total / (x.dimension + 1) as f64)
}

/// `X_t = X + t·ξ̃`, keeping the normal field of `X`.
pub fn parallel(g: &Integrand, x: &PiecewiseHypersurface, t: f64) -> Result<PiecewiseHypersurface> {
    check_dimension(g, x)?;
    let mut out = x.clone();
    let mut failed = 0;
    for p in &mut out.patches {
        let (geo, xi, flags) = xi_tilde(g, p);
        failed += flags.iter().zip(&geo.singular).filter(|(f, s)| **f && !**s).count();
        for (pt, v) in p.points.iter_mut().zip(&xi) {
            *pt += v * t;
        }
        p.normal_override = Some(geo.normals);
    }
    if failed as f64 > MAX_EXCLUDED_FRACTION * x.node_count() as f64 {
        return Err(Error::TooManyExcludedNodes { excluded: failed, total: x.node_count() });
    }
    Ok(out)
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, k| acc * (n - k) as f64 / (k + 1) as f64)
}

#[derive(Clone, Debug)]
pub struct SteinerReport {
    /// `c_r = (−1)^r C(n,r) ∫ γ H_r dA`, `r = 0 … n`.
    pub coefficients: Vec<f64>,
    /// `(t, 𝓕_γ(X_t))` by direct quadrature.
    pub direct_samples: Vec<(f64, f64)>,
    pub max_polynomial_residual: f64,
    pub energy: f64,
}

impl SteinerReport {
    pub fn polynomial(&self, t: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

/// Largest `|k_i|` over a field, or 1 when the field is flat.
fn curvature_scale(field: &CurvatureField) -> f64 {
    let k = field.max_principal();
    if k > 0.0 {
        k
    } else {
        1.0
    }
}

/// The default sample times, shrunk so that `|t| ≤ 0.5 / max|k|`.
pub fn steiner_samples(max_curvature: f64) -> Vec<f64> {
    let s = (0.5 / (0.2 * max_curvature)).min(1.0);
    STEINER_T.iter().map(|t| t * s).collect()
}

/// Compares `𝓕_γ(X_t)` against its Steiner polynomial. Uses [`steiner_samples`]
/// when `t_samples` is empty.
pub fn steiner(g: &Integrand, x: &PiecewiseHypersurface, t_samples: &[f64]) -> Result<SteinerReport> {
    x.check_closed()?;
    let field = curvature_field(g, x)?;
    let n = x.dimension;
    let coefficients: Vec<f64> = (0..=n)
        .map(|r| {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n, r) * field.integrate(|c| c.gamma * c.mean[r])
        })
        .collect();
    let ts = if t_samples.is_empty() { steiner_samples(curvature_scale(&field)) } else { t_samples.to_vec() };
    let mut direct_samples = Vec::with_capacity(ts.len());
    for t in ts {
        direct_samples.push((t, energy(g, &parallel(g, x, t)?)?));
    }
    let mut report = SteinerReport { coefficients, direct_samples, max_polynomial_residual: 0.0, energy: energy(g, x)? };
    report.max_polynomial_residual =
        report.direct_samples.iter().map(|(t, e)| (report.polynomial(*t) - e).abs()).fold(0.0, f64::max);
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiResidual {
    pub r: usize,
    /// `∫ (γ H_r + ⟨X, ν⟩ H_{r+1}) dA`.
    pub value: f64,
    /// `∫ γ |H_r| dA`.
    pub scale: f64,
    pub relative: f64,
}

#[derive(Clone, Debug)]
pub struct MinkowskiReport {
    pub residuals: Vec<MinkowskiResidual>,
}

impl MinkowskiReport {
    pub fn max_relative(&self) -> f64 {
        self.residuals.iter().map(|r| r.relative).fold(0.0, f64::max)
    }
}

pub fn minkowski(g: &Integrand, x: &PiecewiseHypersurface) -> Result<MinkowskiReport> {
    x.check_closed()?;
    let field = curvature_field(g, x)?;
    let residuals = (0..x.dimension)
        .map(|r| {
            let value = field.integrate(|c| c.gamma * c.mean[r] + c.position.dot(&c.nu) * c.mean[r + 1]);
            let scale = field.integrate(|c| c.gamma * c.mean[r].abs());
            MinkowskiResidual { r, value, scale, relative: value.abs() / scale }
        })
        .collect();
    Ok(MinkowskiReport { residuals })
}

/// A numerical identity: `lhs` should equal `rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl IdentityCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        IdentityCheck { lhs, rhs, residual: (lhs - rhs).abs() }
    }
}

/// `dV(X_t)/dt` by central difference against `𝓕_γ(X_t)`.
pub fn dvol_dt_check(g: &Integrand, x: &PiecewiseHypersurface, t: f64, h: f64) -> Result<IdentityCheck> {
    let plus = volume(&parallel(g, x, t + h)?)?;
    let minus = volume(&parallel(g, x, t - h)?)?;
    Ok(IdentityCheck::new((plus - minus) / (2.0 * h), energy(g, &parallel(g, x, t)?)?))
}

/// `⟨e, ν⟩` at every node: the normal speed of a translation.
pub fn translation_field(x: &PiecewiseHypersurface, e: &Vec3) -> Vec<Vec<f64>> {
    x.patches.iter().map(|p| p.geometry().normals.iter().map(|nu| nu.dot(e)).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FirstVariation {
    /// Central difference of `𝓕_γ` against `−∫ nΛψ dA`.
    pub energy: IdentityCheck,
    /// Central difference of `V` against `∫ ψ dA`.
    pub volume: IdentityCheck,
}

fn normal_displacement(x: &PiecewiseHypersurface, psi: &[Vec<f64>], eps: f64) -> PiecewiseHypersurface {
    let field: Vec<Vec<Vec3>> = x
        .patches
        .iter()
        .zip(psi)
        .map(|(p, s)| p.geometry().normals.iter().zip(s).map(|(nu, s)| nu * *s).collect())
        .collect();
    let mut out = x.displaced(&field, eps);
    for p in &mut out.patches {
        p.normal_override = None;
    }
    out
}

/// Compares finite differences of energy and volume under `X + εψν` with
/// their first-variation formulas. `psi` holds one value per node per patch.
pub fn first_variation_check(
    g: &Integrand,
    x: &PiecewiseHypersurface,
    psi: &[Vec<f64>],
    h: f64,
) -> Result<FirstVariation> {
    if psi.len() != x.patches.len() || psi.iter().zip(&x.patches).any(|(s, p)| s.len() != p.len()) {
        return Err(Error::InvalidParams("psi must hold one value per node of every patch".into()));
    }
    let field = curvature_field(g, x)?;
    let n = x.dimension as f64;
    let formula = -n * field.integrate(|c| c.lambda * psi[c.patch][c.node]);
    let plus = normal_displacement(x, psi, h);
    let minus = normal_displacement(x, psi, -h);
    let fd = (energy(g, &plus)? - energy(g, &minus)?) / (2.0 * h);
    let vol_fd = (volume(&plus)? - volume(&minus)?) / (2.0 * h);
    let vol_formula = field.integrate(|c| psi[c.patch][c.node]);
    Ok(FirstVariation { energy: IdentityCheck::new(fd, formula), volume: IdentityCheck::new(vol_fd, vol_formula) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityVerdict {
    StableWulffLike,
    Unstable,
    NotCAMC,
}

impl fmt::Display for StabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StabilityVerdict::StableWulffLike => "StableWulffLike",
            StabilityVerdict::Unstable => "Unstable",
            StabilityVerdict::NotCAMC => "NotCAMC",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub f0: f64,
    pub v0: f64,
    /// `−F₀/((n+1)V₀)`.
    pub lambda_from_minkowski: f64,
    /// Weighted mean of `Λ`.
    pub lambda_from_field: f64,
    /// The two values of `Λ` differ by more than 1%.
    pub lambda_disagreement: bool,
    /// `−(1/n) ∫ γ((n−1)σ₁² − 2nσ₂) dA`.
    pub f_second: f64,
    pub umbilic_deviation_integral: f64,
    pub max_umbilic_deviation: f64,
    pub max_curvature: f64,
    /// `μ′(0)` by central difference of the volume-restoring rescaling factor.
    pub mu_prime_fd: f64,
    pub verdict: StabilityVerdict,
}

/// Second variation along the volume-corrected parallel deformation.
///
/// `tol` is relative: `f″(0)` is compared with `tol·F₀·max|k|²`, the umbilic
/// deviation with `tol·max|k|²`, and `Λ` spread with `tol·|Λ|`.
pub fn second_variation_volume_preserving(
    g: &Integrand,
    x: &PiecewiseHypersurface,
    tol: f64,
) -> Result<StabilityReport> {
    let v0 = volume(x)?;
    let f0 = energy(g, x)?;
    let field = curvature_field(g, x)?;
    let n = x.dimension as f64;
    let umbilic_deviation_integral = field.integrate(|c| c.gamma * c.umbilic_deviation);
    let max_umbilic_deviation = field.nodes.iter().map(|c| c.umbilic_deviation.abs()).fold(0.0, f64::max);
    let f_second = -umbilic_deviation_integral / n;
    let lambda_from_minkowski = -f0 / ((n + 1.0) * v0);
    let (lambda_from_field, _) = field.lambda_stats();
    let lambda_disagreement = (lambda_from_field - lambda_from_minkowski).abs() > 0.01 * lambda_from_minkowski.abs();
    let max_curvature = curvature_scale(&field);

    let h = 1e-4 / max_curvature;
    let mu = |t: f64| -> Result<f64> { Ok((v0 / volume(&parallel(g, x, t)?)?).powf(1.0 / (n + 1.0))) };
    let mu_prime_fd = (mu(h)? - mu(-h)?) / (2.0 * h);

    let camc = camc_check(g, x, tol)?;
    let k2 = max_curvature * max_curvature;
    let verdict = if !camc.is_camc {
        StabilityVerdict::NotCAMC
    } else if f_second >= -tol * f0 * k2 && max_umbilic_deviation <= tol * k2 {
        StabilityVerdict::StableWulffLike
    } else {
        StabilityVerdict::Unstable
    };
    Ok(StabilityReport {
        f0,
        v0,
        lambda_from_minkowski,
        lambda_from_field,
        lambda_disagreement,
        f_second,
        umbilic_deviation_integral,
        max_umbilic_deviation,
        max_curvature,
        mu_prime_fd,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homothety {
    /// `n·𝓕_γ(X)`.
    pub value: f64,
    pub positivity: bool,
    /// Central difference of `𝓕_γ((1+ε)X)` at `ε = 0`.
    pub fd_value: f64,
    pub relative_residual: f64,
}

pub fn homothety_derivative(g: &Integrand, x: &PiecewiseHypersurface) -> Result<Homothety> {
    x.check_closed()?;
    let value = x.dimension as f64 * energy(g, x)?;
    let eps = 1e-4;
    let fd_value = (energy(g, &x.scaled(1.0 + eps))? - energy(g, &x.scaled(1.0 - eps))?) / (2.0 * eps);
    Ok(Homothety { value, positivity: value > 0.0, fd_value, relative_residual: (fd_value - value).abs() / value.abs() })
}
