//! Piecewise hypersurfaces: patches glued along node-aligned boundary sides.

use crate::numerics::AxisKind;
use crate::{Error, Result, Vec3};

use super::patch::ParametricPatch;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Lo,
    Hi,
}

/// The boundary side of a patch where `axis` is at its `end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Side {
    pub patch: usize,
    pub axis: usize,
    pub end: End,
}

/// Identification of two sides. Nodes correspond in order, or in reverse
/// order when `reversed` is set (an affine map between the side parameters).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: Side,
    pub b: Side,
    pub reversed: bool,
}

/// Relative tolerance for identified edge points to coincide.
pub const EDGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PiecewiseHypersurface {
    pub dimension: usize,
    pub patches: Vec<ParametricPatch>,
    pub edges: Vec<Edge>,
}

impl PiecewiseHypersurface {
    pub fn new(patches: Vec<ParametricPatch>, edges: Vec<Edge>) -> Result<Self> {
        let dimension = patches.first().map(|p| p.dimension()).ok_or_else(|| Error::InvalidPatch("no patches".into()))?;
        if patches.iter().any(|p| p.dimension() != dimension) {
            return Err(Error::InvalidPatch("patches of different dimensions".into()));
        }
        let s = PiecewiseHypersurface { dimension, patches, edges };
        let scale = s.scale().max(1e-300);
        for (k, e) in s.edges.iter().enumerate() {
            let a = s.side_nodes(&e.a)?;
            let mut b = s.side_nodes(&e.b)?;
            if a.len() != b.len() {
                return Err(Error::EdgeMismatch(format!("edge {k}: sides have {} and {} nodes", a.len(), b.len())));
            }
            if e.reversed {
                b.reverse();
            }
            for (i, j) in a.iter().zip(&b) {
                let d = (s.patches[e.a.patch].points[*i] - s.patches[e.b.patch].points[*j]).norm();
                if d > EDGE_TOL * scale {
                    return Err(Error::EdgeMismatch(format!("edge {k}: identified points are {d:.3e} apart")));
                }
            }
        }
        Ok(s)
    }

    pub fn single(patch: ParametricPatch) -> Self {
        PiecewiseHypersurface { dimension: patch.dimension(), patches: vec![patch], edges: Vec::new() }
    }

    /// Glues every pair of open sides whose nodes coincide, in either order.
    pub fn with_matched_sides(patches: Vec<ParametricPatch>) -> Result<Self> {
        let tmp = PiecewiseHypersurface { dimension: patches[0].dimension(), patches, edges: Vec::new() };
        let scale = tmp.scale();
        let sides = tmp.open_sides();
        let mut used = vec![false; sides.len()];
        let mut edges = Vec::new();
        for i in 0..sides.len() {
            if used[i] || tmp.side_is_collapsed(&sides[i]) {
                continue;
            }
            let a = tmp.side_points(&sides[i]);
            for j in (i + 1)..sides.len() {
                if used[j] || sides[j].patch == sides[i].patch && sides[j].axis == sides[i].axis {
                    continue;
                }
                let b = tmp.side_points(&sides[j]);
                if a.len() != b.len() {
                    continue;
                }
                let close = |rev: bool| {
                    a.iter().enumerate().all(|(k, p)| {
                        let q = if rev { b[b.len() - 1 - k] } else { b[k] };
                        (p - q).norm() <= EDGE_TOL * scale
                    })
                };
                let reversed = if close(false) {
                    false
                } else if close(true) {
                    true
                } else {
                    continue;
                };
                used[i] = true;
                used[j] = true;
                edges.push(Edge { a: sides[i], b: sides[j], reversed });
                break;
            }
        }
        PiecewiseHypersurface::new(tmp.patches, edges)
    }

    pub fn scale(&self) -> f64 {
        self.patches.iter().map(|p| p.scale()).fold(0.0, f64::max)
    }

    pub fn node_count(&self) -> usize {
        self.patches.iter().map(|p| p.len()).sum()
    }

    /// Node indices along a side, in increasing order of the running parameter.
    pub fn side_nodes(&self, side: &Side) -> Result<Vec<usize>> {
        let p = self
            .patches
            .get(side.patch)
            .ok_or_else(|| Error::EdgeMismatch(format!("no patch {}", side.patch)))?;
        let axis = p
            .axes
            .get(side.axis)
            .ok_or_else(|| Error::EdgeMismatch(format!("patch {} has no axis {}", side.patch, side.axis)))?;
        if axis.kind != AxisKind::Open {
            return Err(Error::EdgeMismatch(format!(
                "axis {} of patch {} is not an open axis",
                side.axis, side.patch
            )));
        }
        let fixed = match side.end {
            End::Lo => 0,
            End::Hi => axis.count - 1,
        };
        if p.dimension() == 1 {
            return Ok(vec![fixed]);
        }
        let other = 1 - side.axis;
        Ok((0..p.axes[other].count)
            .map(|k| {
                let mut idx = vec![0; 2];
                idx[side.axis] = fixed;
                idx[other] = k;
                p.flat_index(&idx)
            })
            .collect())
    }

    fn side_points(&self, side: &Side) -> Vec<Vec3> {
        self.side_nodes(side)
            .unwrap_or_default()
            .iter()
            .map(|&i| self.patches[side.patch].points[i])
            .collect()
    }

    /// All sides of open axes.
    pub fn open_sides(&self) -> Vec<Side> {
        let mut out = Vec::new();
        for (pi, p) in self.patches.iter().enumerate() {
            for (ai, a) in p.axes.iter().enumerate() {
                if a.kind == AxisKind::Open {
                    out.push(Side { patch: pi, axis: ai, end: End::Lo });
                    out.push(Side { patch: pi, axis: ai, end: End::Hi });
                }
            }
        }
        out
    }

    /// A side whose nodes all coincide (a pole of a hemisphere chart).
    pub fn side_is_collapsed(&self, side: &Side) -> bool {
        let pts = self.side_points(side);
        if pts.len() < 2 {
            return false;
        }
        let tol = EDGE_TOL * self.scale();
        pts.iter().all(|p| (p - pts[0]).norm() <= tol)
    }

    /// Every open side is glued to another side or collapses to a point.
    pub fn check_closed(&self) -> Result<()> {
        for side in self.open_sides() {
            let glued = self.edges.iter().any(|e| e.a == side || e.b == side);
            if !glued && !self.side_is_collapsed(&side) {
                return Err(Error::NotClosed(format!(
                    "side {:?} of axis {} of patch {} is not identified with another side",
                    side.end, side.axis, side.patch
                )));
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.check_closed().is_ok()
    }

    /// `c·X`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.patches {
            for x in &mut p.points {
                *x *= c;
            }
        }
        out
    }

    /// Displaces every node by `t·field` (a per-patch node field).
    pub fn displaced(&self, field: &[Vec<Vec3>], t: f64) -> Self {
        let mut out = self.clone();
        for (p, f) in out.patches.iter_mut().zip(field) {
            for (x, v) in p.points.iter_mut().zip(f) {
                *x += v * t;
            }
        }
        out
    }
}
