//! Quadrature grids on the unit circle and the unit sphere.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::quadrature::fejer_weights;
use crate::{Error, Result, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridScheme {
    /// `resolution` equally spaced angles on S^1, starting at angle 0.
    UniformAngle,
    /// `resolution` polar rows at `(j + 1/2) pi / resolution` by `2 resolution`
    /// longitudes, with Fejér weights in the polar direction.
    LatLong,
    /// Geodesic subdivision of the icosahedron with frequency `resolution`.
    Icosphere,
}

/// Unit normals on S^n with quadrature weights summing to |S^n|.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    pub dimension: usize,
    pub scheme: GridScheme,
    pub nodes: Vec<Vec3>,
    pub weights: Vec<f64>,
    /// Grid adjacency, used for clustering and local refinement.
    pub neighbors: Vec<Vec<usize>>,
    /// Nominal angular spacing between neighbouring nodes.
    pub spacing: f64,
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Quadrature of `f` over the sphere.
    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(v, w)| f(v) * w).sum()
    }

    /// Connected components (under grid adjacency) of the flagged nodes.
    pub fn clusters(&self, flagged: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if !flagged[start] || seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                comp.push(i);
                for &j in &self.neighbors[i] {
                    if flagged[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Unit vector on S^1 at angle `theta` (embedded in the z = 0 plane).
pub fn circle_point(theta: f64) -> Vec3 {
    Vec3::new(theta.cos(), theta.sin(), 0.0)
}

/// Unit vector on S^2 from polar angle `phi` (from +z) and longitude `lambda`.
pub fn sphere_point(phi: f64, lambda: f64) -> Vec3 {
    Vec3::new(phi.sin() * lambda.cos(), phi.sin() * lambda.sin(), phi.cos())
}

pub fn build_sphere_grid(n: usize, resolution: usize, scheme: GridScheme) -> Result<SphereGrid> {
    if n != 1 && n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if resolution < 8 {
        return Err(Error::ResolutionTooSmall(resolution));
    }
    match (n, scheme) {
        (1, GridScheme::UniformAngle) => Ok(uniform_angle(resolution)),
        (2, GridScheme::LatLong) => Ok(lat_long(resolution)),
        (2, GridScheme::Icosphere) => Ok(icosphere(resolution)),
        (1, _) => Err(Error::InvalidParams(format!("{scheme:?} is a grid on S^2"))),
        _ => Err(Error::InvalidParams(format!("{scheme:?} is a grid on S^1"))),
    }
}

/// `UniformAngle` on S^1 and `LatLong` on S^2.
pub fn default_sphere_grid(n: usize, resolution: usize) -> Result<SphereGrid> {
    let scheme = if n == 1 { GridScheme::UniformAngle } else { GridScheme::LatLong };
    build_sphere_grid(n, resolution, scheme)
}

fn uniform_angle(count: usize) -> SphereGrid {
    let step = 2.0 * PI / count as f64;
    SphereGrid {
        dimension: 1,
        scheme: GridScheme::UniformAngle,
        nodes: (0..count).map(|k| circle_point(k as f64 * step)).collect(),
        weights: vec![step; count],
        neighbors: (0..count)
            .map(|k| vec![(k + count - 1) % count, (k + 1) % count])
            .collect(),
        spacing: step,
    }
}

fn lat_long(nlat: usize) -> SphereGrid {
    let nlon = 2 * nlat;
    let fejer = fejer_weights(nlat);
    let dl = 2.0 * PI / nlon as f64;
    let mut nodes = Vec::with_capacity(nlat * nlon);
    let mut weights = Vec::with_capacity(nlat * nlon);
    let mut neighbors = Vec::with_capacity(nlat * nlon);
    let idx = |j: usize, k: usize| j * nlon + (k % nlon);
    for j in 0..nlat {
        let phi = (j as f64 + 0.5) * PI / nlat as f64;
        for k in 0..nlon {
            nodes.push(sphere_point(phi, k as f64 * dl));
            weights.push(fejer[j] * dl);
            let mut nb = vec![idx(j, k + nlon - 1), idx(j, k + 1)];
            nb.push(if j == 0 { idx(0, k + nlon / 2) } else { idx(j - 1, k) });
            nb.push(if j + 1 == nlat { idx(j, k + nlon / 2) } else { idx(j + 1, k) });
            neighbors.push(nb);
        }
    }
    SphereGrid {
        dimension: 2,
        scheme: GridScheme::LatLong,
        nodes,
        weights,
        neighbors,
        spacing: PI / nlat as f64,
    }
}

fn icosahedron() -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let verts: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (verts, faces)
}

/// Area of the spherical triangle with unit vertices `a`, `b`, `c`.
pub fn spherical_triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Icosphere nodes and triangles for a given frequency.
pub fn icosphere_mesh(freq: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let (base, faces) = icosahedron();
    let mut index: HashMap<(i64, i64, i64), usize> = HashMap::new();
    let mut nodes: Vec<Vec3> = Vec::new();
    let mut tris = Vec::new();
    let mut node_id = |p: Vec3, nodes: &mut Vec<Vec3>| {
        let p = p.normalize();
        let key = (
            (p.x * 1e9).round() as i64,
            (p.y * 1e9).round() as i64,
            (p.z * 1e9).round() as i64,
        );
        *index.entry(key).or_insert_with(|| {
            nodes.push(p);
            nodes.len() - 1
        })
    };
    let f = freq as f64;
    for face in &faces {
        let (a, b, c) = (base[face[0]], base[face[1]], base[face[2]]);
        let lattice = |i: usize, j: usize| a + (b - a) * (i as f64 / f) + (c - a) * (j as f64 / f);
        let mut ids = vec![vec![0usize; freq + 1]; freq + 1];
        for i in 0..=freq {
            for j in 0..=freq - i {
                ids[i][j] = node_id(lattice(i, j), &mut nodes);
            }
        }
        for i in 0..freq {
            for j in 0..freq - i {
                tris.push([ids[i][j], ids[i + 1][j], ids[i][j + 1]]);
                if i + j + 2 <= freq {
                    tris.push([ids[i + 1][j], ids[i + 1][j + 1], ids[i][j + 1]]);
                }
            }
        }
    }
    (nodes, tris)
}

fn icosphere(freq: usize) -> SphereGrid {
    let (nodes, tris) = icosphere_mesh(freq);
    let mut weights = vec![0.0; nodes.len()];
    let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for t in &tris {
        let area = spherical_triangle_area(&nodes[t[0]], &nodes[t[1]], &nodes[t[2]]);
        for k in 0..3 {
            weights[t[k]] += area / 3.0;
            for l in 0..3 {
                if k != l && !neighbors[t[k]].contains(&t[l]) {
                    neighbors[t[k]].push(t[l]);
                }
            }
        }
    }
    for nb in &mut neighbors {
        nb.sort_unstable();
    }
    // Edge length of the subdivided icosahedron.
    let spacing = 1.1071487177940904 / freq as f64;
    SphereGrid {
        dimension: 2,
        scheme: GridScheme::Icosphere,
        nodes,
        weights,
        neighbors,
        spacing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_angle_360() {
        let g = build_sphere_grid(1, 360, GridScheme::UniformAngle).unwrap();
        assert_eq!(g.len(), 360);
        assert!(g.weights.iter().all(|w| (w - 2.0 * PI / 360.0).abs() < 1e-15));
        assert!((g.weights.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn lat_long_weights_sum_to_4pi() {
        let g = build_sphere_grid(2, 64, GridScheme::LatLong).unwrap();
        assert_eq!(g.len(), 64 * 128);
        assert!((g.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-9);
        assert!(g.nodes.iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn unit_ball_volume_from_grid() {
        // (1/(n+1)) * integral of gamma = 1 over S^2 is the volume of the unit ball.
        for scheme in [GridScheme::LatLong, GridScheme::Icosphere] {
            let g = build_sphere_grid(2, 16, scheme).unwrap();
            let v0 = g.integrate(|_| 1.0) / 3.0;
            assert!((v0 - 4.0 * PI / 3.0).abs() < 1e-6, "{scheme:?}: {v0}");
        }
    }

    #[test]
    fn icosphere_counts_and_weights() {
        let g = build_sphere_grid(2, 8, GridScheme::Icosphere).unwrap();
        assert_eq!(g.len(), 10 * 64 + 2);
        assert!((g.weights.iter().sum::<f64>() - 4.0 * PI).abs() < 1e-6);
        assert!(g.neighbors.iter().all(|nb| nb.len() == 5 || nb.len() == 6));
    }

    #[test]
    fn rejects_bad_requests() {
        assert_eq!(
            build_sphere_grid(3, 16, GridScheme::LatLong).unwrap_err(),
            Error::UnsupportedDimension(3)
        );
        assert_eq!(
            build_sphere_grid(1, 4, GridScheme::UniformAngle).unwrap_err(),
            Error::ResolutionTooSmall(4)
        );
    }

    #[test]
    fn clusters_wrap_around_the_circle() {
        let g = build_sphere_grid(1, 12, GridScheme::UniformAngle).unwrap();
        let mut flags = vec![false; 12];
        for i in [0, 1, 11, 5, 6] {
            flags[i] = true;
        }
        assert_eq!(g.clusters(&flags).len(), 2);
    }
}
