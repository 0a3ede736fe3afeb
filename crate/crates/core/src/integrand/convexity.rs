//! Classification by the sign of `D²γ + γ·1`.

use rayon::prelude::*;

use super::{tangent_basis, Integrand};
use crate::numerics::{eig_symmetric, SphereGrid};
use crate::{Error, Result, Vec3};

const MAX_WITNESSES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvexityVerdict {
    UniformlyConvex,
    ConvexNotUniform,
    NonConvex,
    UndeterminedAtTolerance,
}

impl std::fmt::Display for ConvexityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct ConvexityClass {
    pub verdict: ConvexityVerdict,
    /// `(ν, smallest eigenvalue)` at refined local minima, most negative first.
    pub witnesses: Vec<(Vec3, f64)>,
    pub tolerance: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue_magnitude: f64,
    /// Grid nodes skipped because they lie on the declared non-smooth set.
    pub skipped: Vec<usize>,
}

fn min_eig(g: &Integrand, nu: &Vec3) -> Option<(f64, f64)> {
    let a = g.sphere_hessian_operator(nu).ok()?;
    let e = eig_symmetric(&a.matrix).ok()?;
    let lo = e.values[0];
    let hi = e.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Some((lo, hi))
}

fn refine_circle(g: &Integrand, nu: &Vec3, half_width: f64) -> (Vec3, f64) {
    let f = |t: f64| {
        let p = Vec3::new(t.cos(), t.sin(), 0.0);
        min_eig(g, &p).map_or(f64::INFINITY, |v| v.0)
    };
    let t0 = nu.y.atan2(nu.x);
    let (mut a, mut b) = (t0 - half_width, t0 + half_width);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    let ft = f(t);
    let f0 = f(t0);
    if f0 <= ft {
        (*nu, f0)
    } else {
        (Vec3::new(t.cos(), t.sin(), 0.0), ft)
    }
}

fn refine_sphere(g: &Integrand, nu: &Vec3, start: f64) -> (Vec3, f64) {
    let f = |p: &Vec3| min_eig(g, p).map_or(f64::INFINITY, |v| v.0);
    let mut best = *nu;
    let mut fbest = f(nu);
    let mut step = start;
    while step > 1e-9 {
        let basis = tangent_basis(&best, 2);
        let mut improved = false;
        for u in &basis {
            for s in [-1.0, 1.0] {
                let p = (best + u * (s * step)).normalize();
                let fp = f(&p);
                if fp < fbest {
                    best = p;
                    fbest = fp;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, fbest)
}

/// Classifies `γ` by the smallest eigenvalue of `D²γ + γ·1` over `grid`.
///
/// Grid local minima are refined by a one-dimensional golden-section search
/// (n = 1) or a tangent-plane pattern search (n = 2) before the verdict. The
/// default tolerance is `1e-7` times the largest sampled eigenvalue magnitude.
pub fn classify_convexity(g: &Integrand, grid: &SphereGrid, tolerance: Option<f64>) -> Result<ConvexityClass> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.dimension != g.dimension {
        return Err(Error::DimensionMismatch { expected: g.dimension, got: grid.dimension });
    }
    let samples: Vec<Option<(f64, f64)>> = grid
        .nodes
        .par_iter()
        .map(|nu| if g.is_non_smooth(nu) { None } else { min_eig(g, nu) })
        .collect();
    let skipped: Vec<usize> = (0..grid.len()).filter(|i| samples[*i].is_none()).collect();
    let max_mag = samples.iter().flatten().fold(0.0f64, |m, s| m.max(s.1));
    let tol = tolerance.unwrap_or(1e-7 * max_mag);
    if skipped.len() == grid.len() {
        return Ok(ConvexityClass {
            verdict: ConvexityVerdict::UndeterminedAtTolerance,
            witnesses: Vec::new(),
            tolerance: tol,
            min_eigenvalue: f64::NAN,
            max_eigenvalue_magnitude: 0.0,
            skipped,
        });
    }

    let mut minima: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let Some((v, _)) = samples[i] else { return false };
            grid.neighbors[i].iter().all(|&j| samples[j].is_none_or(|(w, _)| v <= w))
        })
        .collect();
    minima.sort_by(|a, b| samples[*a].unwrap().0.total_cmp(&samples[*b].unwrap().0).then(a.cmp(b)));
    minima.truncate(4 * MAX_WITNESSES);

    let mut witnesses: Vec<(Vec3, f64)> = minima
        .par_iter()
        .map(|&i| {
            let nu = grid.nodes[i];
            if g.dimension == 1 {
                refine_circle(g, &nu, grid.spacing)
            } else {
                refine_sphere(g, &nu, 0.5 * grid.spacing)
            }
        })
        .collect();
    witnesses.sort_by(|a, b| a.1.total_cmp(&b.1));
    let min_eigenvalue = witnesses.first().map_or(f64::INFINITY, |w| w.1);

    let verdict = if min_eigenvalue < -tol {
        witnesses.retain(|w| w.1 < -tol);
        ConvexityVerdict::NonConvex
    } else if min_eigenvalue <= tol {
        witnesses.retain(|w| w.1 <= tol);
        ConvexityVerdict::ConvexNotUniform
    } else {
        witnesses.truncate(1);
        ConvexityVerdict::UniformlyConvex
    };
    witnesses.truncate(MAX_WITNESSES);
    Ok(ConvexityClass {
        verdict,
        witnesses,
        tolerance: tol,
        min_eigenvalue,
        max_eigenvalue_magnitude: max_mag,
        skipped,
    })
}
