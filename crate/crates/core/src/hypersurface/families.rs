//! Built-in parametric families.

use std::f64::consts::PI;

use crate::integrand::Integrand;
use crate::numerics::grid::{circle_point, sphere_point};
use crate::{Error, Result, Vec3};

use super::patch::{Axis, ParametricPatch};
use super::surface::PiecewiseHypersurface;

/// Curve `(a cos θ, b sin θ)`.
pub fn ellipse(a: f64, b: f64, count: usize) -> Result<PiecewiseHypersurface> {
    let p = ParametricPatch::sample("ellipse", vec![Axis::periodic(count, 0.0, 2.0 * PI)], |u| {
        Vec3::new(a * u[0].cos(), b * u[0].sin(), 0.0)
    })?;
    Ok(PiecewiseHypersurface::single(p))
}

pub fn circle(radius: f64, count: usize) -> Result<PiecewiseHypersurface> {
    ellipse(radius, radius, count)
}

fn lat_long_axes(nlat: usize) -> Vec<Axis> {
    vec![Axis::polar(nlat), Axis::periodic(2 * nlat, 0.0, 2.0 * PI)]
}

/// `(a₁ sin φ cos λ, a₂ sin φ sin λ, a₃ cos φ)` on an `nlat × 2nlat` grid.
pub fn ellipsoid(a: [f64; 3], nlat: usize) -> Result<PiecewiseHypersurface> {
    let p = ParametricPatch::sample("ellipsoid", lat_long_axes(nlat), |u| {
        let s = sphere_point(u[0], u[1]);
        Vec3::new(a[0] * s.x, a[1] * s.y, a[2] * s.z)
    })?;
    Ok(PiecewiseHypersurface::single(p))
}

pub fn sphere(radius: f64, nlat: usize) -> Result<PiecewiseHypersurface> {
    let mut s = ellipsoid([radius; 3], nlat)?;
    s.patches[0].name = "sphere".into();
    Ok(s)
}

/// Ring torus `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)`.
pub fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> Result<PiecewiseHypersurface> {
    if !(major > minor && minor > 0.0) {
        return Err(Error::InvalidParams(format!("torus needs R > r > 0, got R = {major}, r = {minor}")));
    }
    let axes = vec![Axis::periodic(nu, 0.0, 2.0 * PI), Axis::periodic(nv, 0.0, 2.0 * PI)];
    let p = ParametricPatch::sample("torus", axes, |u| {
        let w = major + minor * u[1].cos();
        Vec3::new(w * u[0].cos(), w * u[0].sin(), minor * u[1].sin())
    })?;
    Ok(PiecewiseHypersurface::single(p))
}

/// One term `amplitude · sin(⟨ω, ν⟩ + phase)` of a radial perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub frequency: Vec3,
    pub amplitude: f64,
    pub phase: f64,
}

fn radial(modes: &[Mode], nu: &Vec3) -> f64 {
    1.0 + modes.iter().map(|m| m.amplitude * (m.frequency.dot(nu) + m.phase).sin()).sum::<f64>()
}

/// Star-shaped closed curve (n = 1) or surface (n = 2) `r(ν)·ν`.
pub fn star_shaped(n: usize, modes: &[Mode], resolution: usize) -> Result<PiecewiseHypersurface> {
    let p = match n {
        1 => ParametricPatch::sample("star", vec![Axis::periodic(resolution, 0.0, 2.0 * PI)], |u| {
            let nu = circle_point(u[0]);
            nu * radial(modes, &nu)
        })?,
        2 => ParametricPatch::sample("star", lat_long_axes(resolution), |u| {
            let nu = sphere_point(u[0], u[1]);
            nu * radial(modes, &nu)
        })?,
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    Ok(PiecewiseHypersurface::single(p))
}

/// Graph `(u₁, u₂, f(u₁, u₂))` over a rectangle, with both ends of each axis sampled.
pub fn graph(
    f: impl Fn(f64, f64) -> f64,
    x: (f64, f64),
    y: (f64, f64),
    count: usize,
) -> Result<PiecewiseHypersurface> {
    let axes = vec![Axis::open(count, x.0, x.1), Axis::open(count, y.0, y.1)];
    let p = ParametricPatch::sample("graph", axes, |u| Vec3::new(u[0], u[1], f(u[0], u[1])))?;
    Ok(PiecewiseHypersurface::single(p))
}

/// The Wulff boundary parametrized by the Cahn-Hoffman map, `ν ↦ ξ(ν)`.
///
/// The grid is offset by half a step so no node lands on the coordinate
/// directions, and the normal at `ξ(ν)` is taken to be `ν` itself.
pub fn wulff_boundary(g: &Integrand, resolution: usize) -> Result<PiecewiseHypersurface> {
    let (axes, normal): (Vec<Axis>, Box<dyn Fn(&[f64]) -> Vec3>) = match g.dimension {
        1 => (
            vec![Axis::periodic(resolution, 0.0, 2.0 * PI).with_shift(0.5)],
            Box::new(|u: &[f64]| circle_point(u[0])),
        ),
        _ => (
            vec![Axis::polar(resolution), Axis::periodic(2 * resolution, 0.0, 2.0 * PI).with_shift(0.5)],
            Box::new(|u: &[f64]| sphere_point(u[0], u[1])),
        ),
    };
    let mut normals = Vec::new();
    let mut failure = None;
    let mut p = ParametricPatch::sample("wulff", axes, |u| {
        let nu = normal(u);
        normals.push(nu);
        match crate::wulff::xi(g, &nu) {
            Ok(x) => x,
            Err(e) => {
                failure.get_or_insert(e);
                Vec3::zeros()
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    p.normal_override = Some(normals);
    Ok(PiecewiseHypersurface::single(p))
}

/// Northern and southern halves of `ν ↦ map(ν)`, glued along the equator.
///
/// Each half uses an open polar axis that includes its pole, where the chart
/// collapses to a point.
pub fn hemispheres(
    map: impl Fn(&Vec3) -> Result<Vec3>,
    override_normals: bool,
    nlat: usize,
    nlon: usize,
) -> Result<PiecewiseHypersurface> {
    let mut patches = Vec::new();
    for (name, lo, hi) in [("north", 0.0, PI / 2.0), ("south", PI / 2.0, PI)] {
        let axes = vec![Axis::open(nlat, lo, hi), Axis::periodic(nlon, 0.0, 2.0 * PI)];
        let mut normals = Vec::new();
        let mut failure = None;
        let mut p = ParametricPatch::sample(name, axes, |u| {
            let nu = sphere_point(u[0], u[1]);
            normals.push(nu);
            map(&nu).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                Vec3::zeros()
            })
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        if override_normals {
            p.normal_override = Some(normals);
        }
        patches.push(p);
    }
    PiecewiseHypersurface::with_matched_sides(patches)
}

/// Two arcs `θ ∈ [0, π]` and `[π, 2π]` of `θ ↦ map(θ)`, glued at both ends.
pub fn two_arcs(map: impl Fn(&Vec3) -> Result<Vec3>, override_normals: bool, count: usize) -> Result<PiecewiseHypersurface> {
    let mut patches = Vec::new();
    for (name, lo, hi) in [("upper", 0.0, PI), ("lower", PI, 2.0 * PI)] {
        let mut normals = Vec::new();
        let mut failure = None;
        let mut p = ParametricPatch::sample(name, vec![Axis::open(count, lo, hi)], |u| {
            let nu = circle_point(u[0]);
            normals.push(nu);
            map(&nu).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                Vec3::zeros()
            })
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        if override_normals {
            p.normal_override = Some(normals);
        }
        patches.push(p);
    }
    PiecewiseHypersurface::with_matched_sides(patches)
}

/// The boundary of `[−h, h]³`, one patch per face.
pub fn cube(half: f64, count: usize) -> Result<PiecewiseHypersurface> {
    let mut patches = Vec::new();
    for k in 0..3 {
        let (a, b) = ((k + 1) % 3, (k + 2) % 3);
        for sign in [1.0, -1.0] {
            let axes = vec![Axis::open(count, -half, half), Axis::open(count, -half, half)];
            let p = ParametricPatch::sample(&format!("face{}{}", if sign > 0.0 { '+' } else { '-' }, k), axes, |u| {
                let mut x = Vec3::zeros();
                x[k] = sign * half;
                x[a] = u[0];
                x[b] = u[1];
                x
            })?
            .with_orientation(sign > 0.0);
            patches.push(p);
        }
    }
    PiecewiseHypersurface::with_matched_sides(patches)
}
