//! Parametric patches sampled on tensor grids.

use std::f64::consts::PI;

use crate::numerics::quadrature::{fejer_weights, gregory_weights, periodic_weights};
use crate::numerics::diff::SpectralDiff;
use crate::numerics::{AxisKind, Stencil};
use crate::{Error, Result, Vec3};

/// One parameter axis of a patch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
    /// Offset of the first sample as a fraction of the step (periodic axes only).
    pub shift: f64,
}

impl Axis {
    /// `count` samples of `[lo, hi)`.
    pub fn periodic(count: usize, lo: f64, hi: f64) -> Self {
        Axis { kind: AxisKind::Periodic, count, lo, hi, shift: 0.0 }
    }

    /// `count` samples of `[lo, hi]`, both ends included.
    pub fn open(count: usize, lo: f64, hi: f64) -> Self {
        Axis { kind: AxisKind::Open, count, lo, hi, shift: 0.0 }
    }

    /// Polar angle `(j + 1/2) π / count` of a sphere-like chart.
    pub fn polar(count: usize) -> Self {
        Axis { kind: AxisKind::Polar, count, lo: 0.0, hi: PI, shift: 0.5 }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn step(&self) -> f64 {
        match self.kind {
            AxisKind::Open => (self.hi - self.lo) / (self.count - 1) as f64,
            _ => (self.hi - self.lo) / self.count as f64,
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        let h = self.step();
        match self.kind {
            AxisKind::Open => (0..self.count).map(|k| self.lo + k as f64 * h).collect(),
            _ => (0..self.count).map(|k| self.lo + (k as f64 + self.shift) * h).collect(),
        }
    }

    /// Quadrature weights in the parameter. Polar weights already divide out
    /// the `sin φ` that the area element supplies.
    pub fn weights(&self) -> Vec<f64> {
        match self.kind {
            AxisKind::Periodic => periodic_weights(self.count, self.hi - self.lo),
            AxisKind::Open => gregory_weights(self.count, self.lo, self.hi),
            AxisKind::Polar => fejer_weights(self.count)
                .into_iter()
                .zip(self.coords())
                .map(|(w, phi)| w / phi.sin())
                .collect(),
        }
    }
}

/// A patch `X : [a₁,b₁]×…×[a_n,b_n] → ℝⁿ⁺¹` sampled on a tensor grid.
///
/// Samples are stored row-major with axis 0 varying slowest.
#[derive(Clone, Debug)]
pub struct ParametricPatch {
    pub name: String,
    pub axes: Vec<Axis>,
    pub points: Vec<Vec3>,
    /// When false the normal from the parametrization is flipped.
    pub orientation: bool,
    /// Normal field to use instead of the one computed from derivatives.
    pub normal_override: Option<Vec<Vec3>>,
}

impl ParametricPatch {
    pub fn from_points(name: &str, axes: Vec<Axis>, points: Vec<Vec3>) -> Result<Self> {
        let p = ParametricPatch { name: name.to_string(), axes, points, orientation: true, normal_override: None };
        p.validate()?;
        Ok(p)
    }

    /// Samples a closed-form map at the grid nodes.
    pub fn sample(name: &str, axes: Vec<Axis>, mut map: impl FnMut(&[f64]) -> Vec3) -> Result<Self> {
        let coords: Vec<Vec<f64>> = axes.iter().map(|a| a.coords()).collect();
        let mut points = Vec::new();
        match axes.len() {
            1 => points.extend(coords[0].iter().map(|u| map(&[*u]))),
            2 => {
                for u in &coords[0] {
                    for v in &coords[1] {
                        points.push(map(&[*u, *v]));
                    }
                }
            }
            k => return Err(Error::UnsupportedDimension(k)),
        }
        Self::from_points(name, axes, points)
    }

    pub fn with_orientation(mut self, orientation: bool) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    fn validate(&self) -> Result<()> {
        let n = self.axes.len();
        if !(1..=2).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        let total: usize = self.axes.iter().map(|a| a.count).product();
        if total != self.points.len() {
            return Err(Error::InvalidPatch(format!("{} points for a grid of {total}", self.points.len())));
        }
        for (k, a) in self.axes.iter().enumerate() {
            if a.count < 5 {
                return Err(Error::InvalidPatch(format!("axis {k} has {} samples; at least 5 are needed", a.count)));
            }
            if !(a.hi > a.lo) {
                return Err(Error::InvalidPatch(format!("axis {k} has an empty range")));
            }
            if a.kind == AxisKind::Polar {
                let ok = k == 0 && n == 2 && self.axes[1].kind == AxisKind::Periodic && self.axes[1].count % 2 == 0
                    && ((self.axes[1].hi - self.axes[1].lo) - 2.0 * PI).abs() < 1e-12;
                if !ok {
                    return Err(Error::InvalidPatch(
                        "a polar axis must be axis 0, paired with a 2π-periodic axis of even length".into(),
                    ));
                }
            }
        }
        if let Some(nu) = &self.normal_override {
            if nu.len() != self.points.len() {
                return Err(Error::InvalidPatch("normal override has the wrong length".into()));
            }
        }
        if n == 1 && self.points.iter().any(|p| p.z != 0.0) {
            return Err(Error::InvalidPatch("curves must lie in the z = 0 plane".into()));
        }
        Ok(())
    }

    /// Grid multi-index of a flat node index.
    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        if self.axes.len() == 1 {
            vec![node]
        } else {
            vec![node / self.axes[1].count, node % self.axes[1].count]
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        if self.axes.len() == 1 {
            idx[0]
        } else {
            idx[0] * self.axes[1].count + idx[1]
        }
    }

    /// Parameter values at a node.
    pub fn parameters(&self, node: usize) -> Vec<f64> {
        self.multi_index(node)
            .iter()
            .zip(&self.axes)
            .map(|(i, a)| a.coords()[*i])
            .collect()
    }

    /// Parameter quadrature weight of every node.
    pub fn parameter_weights(&self) -> Vec<f64> {
        let w: Vec<Vec<f64>> = self.axes.iter().map(|a| a.weights()).collect();
        if w.len() == 1 {
            w[0].clone()
        } else {
            w[0].iter().flat_map(|a| w[1].iter().map(move |b| a * b)).collect()
        }
    }

    pub fn scale(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn differ(&self) -> Differ {
        Differ::new(&self.axes)
    }
}

/// Differentiates node fields of a patch along its axes.
pub struct Differ {
    axes: Vec<Axis>,
    spectral: Vec<Option<SpectralDiff>>,
    stencil: Vec<Option<Stencil>>,
}

impl Differ {
    pub fn new(axes: &[Axis]) -> Self {
        let mut spectral = Vec::new();
        let mut stencil = Vec::new();
        for (k, a) in axes.iter().enumerate() {
            match a.kind {
                AxisKind::Periodic => {
                    spectral.push(Some(SpectralDiff::new(a.count, a.hi - a.lo)));
                    stencil.push(None);
                }
                AxisKind::Polar => {
                    spectral.push(Some(SpectralDiff::new(2 * a.count, 2.0 * PI)));
                    stencil.push(None);
                }
                AxisKind::Open => {
                    spectral.push(None);
                    stencil.push(Some(Stencil::new(k, false, a.step())));
                }
            }
        }
        Differ { axes: axes.to_vec(), spectral, stencil }
    }

    /// Node indices of every grid line along `axis`. Polar lines are extended
    /// across both poles to length `2N`.
    fn lines(&self, axis: usize) -> Vec<Vec<usize>> {
        let c: Vec<usize> = self.axes.iter().map(|a| a.count).collect();
        if c.len() == 1 {
            return vec![(0..c[0]).collect()];
        }
        let idx = |i: usize, j: usize| i * c[1] + j;
        if axis == 1 {
            return (0..c[0]).map(|i| (0..c[1]).map(|j| idx(i, j)).collect()).collect();
        }
        (0..c[1])
            .map(|j| {
                let mut line: Vec<usize> = (0..c[0]).map(|i| idx(i, j)).collect();
                if self.axes[0].kind == AxisKind::Polar {
                    let opposite = (j + c[1] / 2) % c[1];
                    line.extend((0..c[0]).rev().map(|i| idx(i, opposite)));
                }
                line
            })
            .collect()
    }

    fn diff_line(&self, axis: usize, values: &[f64]) -> Vec<f64> {
        match (&self.spectral[axis], &self.stencil[axis]) {
            (Some(s), _) => s.apply(values),
            (None, Some(st)) => st.apply(values),
            _ => unreachable!(),
        }
    }

    pub fn scalar(&self, f: &[f64], axis: usize) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for line in self.lines(axis) {
            let vals: Vec<f64> = line.iter().map(|&i| f[i]).collect();
            let d = self.diff_line(axis, &vals);
            let keep = self.axes[axis].count;
            for (k, &i) in line.iter().take(keep).enumerate() {
                out[i] = d[k];
            }
        }
        out
    }

    pub fn vector(&self, f: &[Vec3], axis: usize) -> Vec<Vec3> {
        let mut out = vec![Vec3::zeros(); f.len()];
        let keep = self.axes[axis].count;
        for line in self.lines(axis) {
            let x: Vec<f64> = line.iter().map(|&i| f[i].x).collect();
            let y: Vec<f64> = line.iter().map(|&i| f[i].y).collect();
            let z: Vec<f64> = line.iter().map(|&i| f[i].z).collect();
            let (dx, dy, dz) = match &self.spectral[axis] {
                Some(s) => {
                    let (dx, dy) = s.apply_pair(&x, &y);
                    (dx, dy, s.apply(&z))
                }
                None => {
                    let st = self.stencil[axis].as_ref().unwrap();
                    (st.apply(&x), st.apply(&y), st.apply(&z))
                }
            };
            for (k, &i) in line.iter().take(keep).enumerate() {
                out[i] = Vec3::new(dx[k], dy[k], dz[k]);
            }
        }
        out
    }
}

/// First-order geometry of a patch at every node.
#[derive(Clone, Debug)]
pub struct PatchGeometry {
    /// `∂_i X` for each axis.
    pub tangents: Vec<Vec<Vec3>>,
    pub normals: Vec<Vec3>,
    /// `√det g`.
    pub area_element: Vec<f64>,
    /// Nodes where the parametrization fails to immerse.
    pub singular: Vec<bool>,
    /// Largest angle between the computed normal and the override, if any.
    pub override_deviation: Option<f64>,
}

/// Relative threshold on `|∂₁X ∧ ⋯ ∧ ∂_nX|` below which a node is singular.
pub const IMMERSION_TOL: f64 = 1e-9;

/// Replaces values at flagged nodes by averages of unflagged grid neighbours,
/// sweeping until every reachable node is filled.
pub(crate) fn fill_flagged<T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>>(
    patch: &ParametricPatch,
    values: &mut [T],
    flagged: &[bool],
) {
    let mut bad: Vec<bool> = flagged.to_vec();
    let shape = patch.shape();
    for _ in 0..values.len() {
        if !bad.iter().any(|b| *b) {
            return;
        }
        let snapshot = bad.clone();
        let mut progressed = false;
        for node in 0..values.len() {
            if !snapshot[node] {
                continue;
            }
            let idx = patch.multi_index(node);
            let mut acc: Option<T> = None;
            let mut count = 0.0;
            for (a, axis) in patch.axes.iter().enumerate() {
                for step in [-1isize, 1] {
                    let mut j = idx.clone();
                    let k = idx[a] as isize + step;
                    let k = if axis.kind == AxisKind::Periodic {
                        k.rem_euclid(shape[a] as isize)
                    } else if k < 0 || k >= shape[a] as isize {
                        continue;
                    } else {
                        k
                    };
                    j[a] = k as usize;
                    let nb = patch.flat_index(&j);
                    if !snapshot[nb] {
                        acc = Some(match acc {
                            Some(s) => s + values[nb],
                            None => values[nb],
                        });
                        count += 1.0;
                    }
                }
            }
            if let Some(s) = acc {
                values[node] = s * (1.0 / count);
                bad[node] = false;
                progressed = true;
            }
        }
        if !progressed {
            return;
        }
    }
}

impl ParametricPatch {
    /// Tangents, unit normals and area elements at every node.
    ///
    /// The normal is `(X'₂, −X'₁)/|X'|` for curves and `∂₁X × ∂₂X` normalized for
    /// surfaces, flipped when `orientation` is false. Singular nodes get normals
    /// averaged from their neighbours so that later differentiation stays local.
    pub fn geometry(&self) -> PatchGeometry {
        let d = self.differ();
        let tangents: Vec<Vec<Vec3>> = (0..self.dimension()).map(|a| d.vector(&self.points, a)).collect();
        let raw: Vec<Vec3> = (0..self.len())
            .map(|i| {
                if self.dimension() == 1 {
                    let t = tangents[0][i];
                    Vec3::new(t.y, -t.x, 0.0)
                } else {
                    tangents[0][i].cross(&tangents[1][i])
                }
            })
            .collect();
        let area_element: Vec<f64> = raw.iter().map(|v| v.norm()).collect();
        let max_area = area_element.iter().cloned().fold(0.0, f64::max);
        let singular: Vec<bool> = area_element.iter().map(|a| !(*a > IMMERSION_TOL * max_area)).collect();
        let sign = if self.orientation { 1.0 } else { -1.0 };
        let mut computed: Vec<Vec3> = raw
            .iter()
            .zip(&singular)
            .map(|(v, s)| if *s { Vec3::zeros() } else { v * (sign / v.norm()) })
            .collect();
        fill_flagged(self, &mut computed, &singular);
        let (normals, override_deviation) = match &self.normal_override {
            Some(nu) => {
                let dev = computed
                    .iter()
                    .zip(nu)
                    .zip(&singular)
                    .filter(|(_, s)| !**s)
                    .map(|((a, b), _)| a.cross(b).norm().asin().max(if a.dot(b) < 0.0 { PI / 2.0 } else { 0.0 }))
                    .fold(0.0, f64::max);
                (nu.clone(), Some(dev))
            }
            None => (
                computed.into_iter().map(|v| if v.norm() > 0.0 { v.normalize() } else { v }).collect(),
                None,
            ),
        };
        PatchGeometry { tangents, normals, area_element, singular, override_deviation }
    }
}
