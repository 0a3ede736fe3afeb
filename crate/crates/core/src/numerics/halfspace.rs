//! Intersections of finitely many half-spaces `<x, u> <= d` containing the origin.
//!
//! In the plane the lines are sorted by angle and the boundary is walked with a
//! deque. In space a large cube is cut by one half-space at a time.

use std::collections::HashMap;

use crate::{Error, Result, Vec3};

/// A convex polytope given by its boundary facets.
#[derive(Clone, Debug, Default)]
pub struct Polytope {
    pub vertices: Vec<Vec3>,
    pub facets: Vec<Facet>,
}

/// A planar convex polygon face, counter-clockwise seen from outside.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: Vec3,
    pub offset: f64,
    pub vertices: Vec<usize>,
    bounding: bool,
}

/// Result of a half-space intersection.
#[derive(Clone, Debug)]
pub enum ConvexBody {
    /// Counter-clockwise vertex loop in the `z = 0` plane.
    Polygon(Vec<Vec3>),
    Polytope(Polytope),
}

impl ConvexBody {
    pub fn vertices(&self) -> &[Vec3] {
        match self {
            ConvexBody::Polygon(v) => v,
            ConvexBody::Polytope(p) => &p.vertices,
        }
    }

    /// Largest vertex distance from the origin.
    pub fn scale(&self) -> f64 {
        self.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Half-spaces supporting the edges (polygon) or facets (polytope).
    pub fn supporting_halfspaces(&self) -> (Vec<Vec3>, Vec<f64>) {
        match self {
            ConvexBody::Polygon(v) => {
                let m = v.len();
                (0..m)
                    .map(|i| {
                        let (a, b) = (v[i], v[(i + 1) % m]);
                        let e = b - a;
                        let u = Vec3::new(e.y, -e.x, 0.0).normalize();
                        (u, u.dot(&a))
                    })
                    .unzip()
            }
            ConvexBody::Polytope(p) => p.facets.iter().map(|f| (f.normal, f.offset)).unzip(),
        }
    }

    /// Enclosed area (polygon) or volume (polytope).
    pub fn measure(&self) -> f64 {
        match self {
            ConvexBody::Polygon(v) => {
                let m = v.len();
                0.5 * (0..m)
                    .map(|i| v[i].x * v[(i + 1) % m].y - v[(i + 1) % m].x * v[i].y)
                    .sum::<f64>()
            }
            ConvexBody::Polytope(p) => {
                let mut vol = 0.0;
                for f in &p.facets {
                    let a = p.vertices[f.vertices[0]];
                    for w in f.vertices[1..].windows(2) {
                        vol += a.dot(&p.vertices[w[0]].cross(&p.vertices[w[1]])) / 6.0;
                    }
                }
                vol
            }
        }
    }
}

/// Intersects `{x : <x, normals[i]> <= offsets[i]}` over all `i`.
///
/// `n` is the sphere dimension: 1 gives a polygon in the plane, 2 a polytope.
/// Offsets must be positive so the origin is interior.
pub fn halfspace_intersection(normals: &[Vec3], offsets: &[f64], n: usize) -> Result<ConvexBody> {
    if normals.len() != offsets.len() {
        return Err(Error::DimensionMismatch {
            expected: normals.len(),
            got: offsets.len(),
        });
    }
    if offsets.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidParams("half-space offsets must be positive and finite".into()));
    }
    match n {
        1 => intersect_halfplanes(normals, offsets).map(ConvexBody::Polygon),
        2 => intersect_halfspaces(normals, offsets).map(ConvexBody::Polytope),
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

#[derive(Clone, Copy)]
struct Line {
    u: Vec3,
    d: f64,
    angle: f64,
}

fn meet(a: &Line, b: &Line) -> Vec3 {
    let det = a.u.x * b.u.y - a.u.y * b.u.x;
    Vec3::new(
        (a.d * b.u.y - b.d * a.u.y) / det,
        (a.u.x * b.d - b.u.x * a.d) / det,
        0.0,
    )
}

fn intersect_halfplanes(normals: &[Vec3], offsets: &[f64]) -> Result<Vec<Vec3>> {
    let mut lines: Vec<Line> = normals
        .iter()
        .zip(offsets)
        .map(|(u, &d)| {
            let norm = u.xy().norm();
            let u = Vec3::new(u.x / norm, u.y / norm, 0.0);
            Line {
                u,
                d: d / norm,
                angle: u.y.atan2(u.x),
            }
        })
        .collect();
    if lines.len() < 3 {
        return Err(Error::UnboundedOrEmpty);
    }
    lines.sort_by(|a, b| a.angle.total_cmp(&b.angle).then(a.d.total_cmp(&b.d)));
    lines.dedup_by(|later, earlier| (later.angle - earlier.angle).abs() < 1e-15);

    // Every open half-circle of directions must contain a normal.
    let m = lines.len();
    let max_gap = (0..m)
        .map(|i| {
            let next = if i + 1 == m {
                lines[0].angle + 2.0 * std::f64::consts::PI
            } else {
                lines[i + 1].angle
            };
            next - lines[i].angle
        })
        .fold(0.0, f64::max);
    if m < 3 || max_gap >= std::f64::consts::PI - 1e-12 {
        return Err(Error::UnboundedOrEmpty);
    }

    let scale = lines.iter().map(|l| l.d).fold(0.0, f64::max);
    let eps = 1e-12 * scale;
    let outside = |l: &Line, p: &Vec3| l.u.dot(p) > l.d + eps;
    let mut dq: std::collections::VecDeque<Line> = std::collections::VecDeque::new();
    for l in &lines {
        while dq.len() >= 2 && outside(l, &meet(&dq[dq.len() - 1], &dq[dq.len() - 2])) {
            dq.pop_back();
        }
        while dq.len() >= 2 && outside(l, &meet(&dq[0], &dq[1])) {
            dq.pop_front();
        }
        dq.push_back(*l);
    }
    while dq.len() >= 3 && outside(&dq[0], &meet(&dq[dq.len() - 1], &dq[dq.len() - 2])) {
        dq.pop_back();
    }
    while dq.len() >= 3 && outside(&dq[dq.len() - 1], &meet(&dq[0], &dq[1])) {
        dq.pop_front();
    }
    if dq.len() < 3 {
        return Err(Error::UnboundedOrEmpty);
    }
    let k = dq.len();
    let mut verts: Vec<Vec3> = (0..k).map(|i| meet(&dq[i], &dq[(i + 1) % k])).collect();
    let tol = 1e-12 * scale.max(1.0);
    verts.dedup_by(|a, b| (*a - *b).norm() <= tol);
    while verts.len() > 1 && (verts[0] - verts[verts.len() - 1]).norm() <= tol {
        verts.pop();
    }
    if verts.len() < 3 || verts.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
        return Err(Error::UnboundedOrEmpty);
    }
    Ok(verts)
}

impl Polytope {
    fn cube(half: f64) -> Self {
        let vertices = (0..8)
            .map(|i| {
                let s = |bit: usize| if i & bit != 0 { half } else { -half };
                Vec3::new(s(1), s(2), s(4))
            })
            .collect();
        let faces: [([f64; 3], [usize; 4]); 6] = [
            ([1.0, 0.0, 0.0], [1, 3, 7, 5]),
            ([-1.0, 0.0, 0.0], [0, 4, 6, 2]),
            ([0.0, 1.0, 0.0], [2, 6, 7, 3]),
            ([0.0, -1.0, 0.0], [0, 1, 5, 4]),
            ([0.0, 0.0, 1.0], [4, 5, 7, 6]),
            ([0.0, 0.0, -1.0], [0, 2, 3, 1]),
        ];
        let facets = faces
            .iter()
            .map(|(n, v)| Facet {
                normal: Vec3::new(n[0], n[1], n[2]),
                offset: half,
                vertices: v.to_vec(),
                bounding: true,
            })
            .collect();
        Self { vertices, facets }
    }

    /// Cuts by `<x, normal> <= offset`. Returns false when the half-space is redundant.
    fn cut(&mut self, normal: Vec3, offset: f64, eps: f64) -> bool {
        let side: Vec<f64> = self.vertices.iter().map(|v| normal.dot(v) - offset).collect();
        if side.iter().all(|&s| s <= eps) {
            return false;
        }
        let mut crossing: HashMap<(usize, usize), usize> = HashMap::new();
        let mut cap: Vec<usize> = Vec::new();
        let mut facets = Vec::with_capacity(self.facets.len() + 1);
        for f in &self.facets {
            let m = f.vertices.len();
            let mut kept: Vec<usize> = Vec::with_capacity(m + 1);
            for k in 0..m {
                let (a, b) = (f.vertices[k], f.vertices[(k + 1) % m]);
                let (sa, sb) = (side[a], side[b]);
                if sa <= eps {
                    kept.push(a);
                    if sa >= -eps {
                        cap.push(a);
                    }
                }
                if (sa < -eps && sb > eps) || (sa > eps && sb < -eps) {
                    let key = (a.min(b), a.max(b));
                    let idx = match crossing.get(&key) {
                        Some(&i) => i,
                        None => {
                            let t = sa / (sa - sb);
                            let p = self.vertices[a] + (self.vertices[b] - self.vertices[a]) * t;
                            self.vertices.push(p);
                            let i = self.vertices.len() - 1;
                            crossing.insert(key, i);
                            i
                        }
                    };
                    kept.push(idx);
                    cap.push(idx);
                }
            }
            kept.dedup();
            while kept.len() > 1 && kept[0] == kept[kept.len() - 1] {
                kept.pop();
            }
            if kept.len() >= 3 {
                facets.push(Facet {
                    vertices: kept,
                    ..f.clone()
                });
            }
        }
        cap.sort_unstable();
        cap.dedup();
        if cap.len() >= 3 {
            let centroid = cap.iter().map(|&i| self.vertices[i]).sum::<Vec3>() / cap.len() as f64;
            let u = normal.cross(&least_aligned_axis(&normal)).normalize();
            let w = normal.cross(&u);
            let mut ordered: Vec<(f64, usize)> = cap
                .iter()
                .map(|&i| {
                    let r = self.vertices[i] - centroid;
                    (r.dot(&w).atan2(r.dot(&u)), i)
                })
                .collect();
            ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
            facets.push(Facet {
                normal,
                offset,
                vertices: ordered.into_iter().map(|(_, i)| i).collect(),
                bounding: false,
            });
        }
        self.facets = facets;
        self.compact();
        true
    }

    fn compact(&mut self) {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut verts = Vec::new();
        for f in &mut self.facets {
            for v in &mut f.vertices {
                if map[*v] == usize::MAX {
                    map[*v] = verts.len();
                    verts.push(self.vertices[*v]);
                }
                *v = map[*v];
            }
        }
        self.vertices = verts;
    }

    /// Merges vertices closer than `tol`. Nearly coincident planes through a
    /// common point otherwise leave clusters of almost equal vertices.
    fn weld(&mut self, tol: f64) {
        let key = |v: &Vec3| ((v.x / tol).floor() as i64, (v.y / tol).floor() as i64, (v.z / tol).floor() as i64);
        let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        let mut map = vec![0usize; self.vertices.len()];
        for (i, v) in self.vertices.iter().enumerate() {
            let (a, b, c) = key(v);
            let mut found = None;
            'search: for da in -1..=1 {
                for db in -1..=1 {
                    for dc in -1..=1 {
                        if let Some(list) = buckets.get(&(a + da, b + db, c + dc)) {
                            if let Some(&j) = list.iter().find(|&&j| (self.vertices[j] - v).norm() <= tol) {
                                found = Some(j);
                                break 'search;
                            }
                        }
                    }
                }
            }
            map[i] = match found {
                Some(j) => map[j],
                None => {
                    buckets.entry((a, b, c)).or_default().push(i);
                    i
                }
            };
        }
        for f in &mut self.facets {
            for v in &mut f.vertices {
                *v = map[*v];
            }
            f.vertices.dedup();
            while f.vertices.len() > 1 && f.vertices[0] == f.vertices[f.vertices.len() - 1] {
                f.vertices.pop();
            }
        }
        self.facets.retain(|f| f.vertices.len() >= 3);
        self.compact();
    }

    /// Fan triangulation of the facets, for mesh export.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for f in &self.facets {
            for w in f.vertices[1..].windows(2) {
                out.push([f.vertices[0], w[0], w[1]]);
            }
        }
        out
    }
}

fn least_aligned_axis(v: &Vec3) -> Vec3 {
    let a = v.abs();
    if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    }
}

fn intersect_halfspaces(normals: &[Vec3], offsets: &[f64]) -> Result<Polytope> {
    let max_d = offsets
        .iter()
        .zip(normals)
        .map(|(d, u)| d / u.norm())
        .fold(0.0, f64::max);
    let half = 1e3 * max_d;
    let mut poly = Polytope::cube(half);
    let eps = 1e-12 * max_d;
    for (u, d) in normals.iter().zip(offsets) {
        let norm = u.norm();
        poly.cut(u / norm, d / norm, eps);
        if poly.facets.len() < 4 {
            return Err(Error::UnboundedOrEmpty);
        }
    }
    if poly.facets.iter().any(|f| f.bounding) {
        return Err(Error::UnboundedOrEmpty);
    }
    poly.weld(1e-9 * max_d);
    Ok(poly)
}
