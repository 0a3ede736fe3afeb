//! Closed-form homogeneous extensions and their ambient derivatives.

use nalgebra::Matrix3;

use crate::Vec3;

/// One term `c * (q(nu))^p` of a power-of-polynomial-sum integrand, where `q`
/// is a polynomial optionally wrapped in an absolute value.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyTerm {
    pub coefficient: f64,
    pub exponent: f64,
    pub absolute: bool,
    /// `(coefficient, [e1, e2, e3])` monomials.
    pub monomials: Vec<(f64, [u32; 3])>,
}

impl PolyTerm {
    fn eval(&self, nu: &Vec3) -> f64 {
        let q: f64 = self
            .monomials
            .iter()
            .map(|(c, e)| c * nu.x.powi(e[0] as i32) * nu.y.powi(e[1] as i32) * nu.z.powi(e[2] as i32))
            .sum();
        let q = if self.absolute { q.abs() } else { q };
        self.coefficient * q.powf(self.exponent)
    }
}

/// Shape of an integrand, evaluated through its degree-one homogeneous extension.
#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    Constant,
    Reilly([f64; 3]),
    Lorentz,
    L1,
    Cylinder { radius: f64, height: f64 },
    Lm { m: u32 },
    Arc { radius: f64 },
    Cubic,
    PolySum(Vec<PolyTerm>),
    /// Support function of a finite point set: `max_v <v, x>`.
    Support(Vec<Vec3>),
}

/// Ambient dimension helpers: coordinates `0..=n` are live.
fn last(n: usize) -> usize {
    n
}

fn radial(x: &Vec3, n: usize) -> f64 {
    (0..=n).map(|i| x[i] * x[i]).sum::<f64>().sqrt()
}

/// `(I - x x^T / |x|^2) / |x|` restricted to the live coordinates.
fn sphere_projector(x: &Vec3, n: usize, r: f64) -> Matrix3<f64> {
    let mut h = Matrix3::zeros();
    for i in 0..=n {
        for j in 0..=n {
            let delta = if i == j { 1.0 } else { 0.0 };
            h[(i, j)] = (delta - x[i] * x[j] / (r * r)) / r;
        }
    }
    h
}

impl Form {
    /// Value of the homogeneous extension at `x` (with `x != 0`).
    pub fn value(&self, x: &Vec3, n: usize) -> f64 {
        match self {
            Form::Constant => radial(x, n),
            Form::Reilly(a) => (0..3).map(|i| (a[i] * x[i]).powi(2)).sum::<f64>().sqrt(),
            Form::Lorentz => (x.z * x.z - x.x * x.x - x.y * x.y).abs().sqrt(),
            Form::L1 => (0..=n).map(|i| x[i].abs()).sum(),
            Form::Cylinder { radius, height } => {
                let p: f64 = (0..n).map(|i| x[i] * x[i]).sum::<f64>().sqrt();
                radius * p + height * x[last(n)].abs()
            }
            Form::Lm { m } => {
                let s: f64 = (0..=n).map(|i| x[i].powi(2 * *m as i32)).sum();
                s.powf(1.0 / (2.0 * *m as f64))
            }
            Form::Arc { radius } => arc_value(x, *radius),
            Form::Cubic => {
                let r2 = x.x * x.x + x.y * x.y;
                4.0 * x.x.powi(3) / r2 - 3.0 * x.x + 2.0 * r2.sqrt()
            }
            Form::PolySum(terms) => {
                let r = radial(x, n);
                let nu = x / r;
                r * terms.iter().map(|t| t.eval(&nu)).sum::<f64>()
            }
            Form::Support(points) => points.iter().map(|v| v.dot(x)).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Closed-form gradient of the extension, if available.
    pub fn gradient(&self, x: &Vec3, n: usize) -> Option<Vec3> {
        let g = match self {
            Form::Constant => {
                let r = radial(x, n);
                x / r
            }
            Form::Reilly(a) => {
                let dx = Vec3::new(a[0] * a[0] * x.x, a[1] * a[1] * x.y, a[2] * a[2] * x.z);
                dx / self.value(x, n)
            }
            Form::Lorentz => {
                let q = x.z * x.z - x.x * x.x - x.y * x.y;
                let jx = Vec3::new(-x.x, -x.y, x.z);
                jx * q.signum() / q.abs().sqrt()
            }
            Form::L1 => {
                let mut g = Vec3::zeros();
                for i in 0..=n {
                    g[i] = x[i].signum();
                }
                g
            }
            Form::Cylinder { radius, height } => {
                let p: f64 = (0..n).map(|i| x[i] * x[i]).sum::<f64>().sqrt();
                let mut g = Vec3::zeros();
                for i in 0..n {
                    g[i] = radius * x[i] / p;
                }
                g[last(n)] = height * x[last(n)].signum();
                g
            }
            Form::Lm { m } => {
                let m = *m as i32;
                let s: f64 = (0..=n).map(|i| x[i].powi(2 * m)).sum();
                let f = s.powf(1.0 / (2.0 * m as f64) - 1.0);
                let mut g = Vec3::zeros();
                for i in 0..=n {
                    g[i] = f * x[i].powi(2 * m - 1);
                }
                g
            }
            Form::Arc { radius } => arc_gradient(x, *radius),
            Form::Cubic => {
                let r2 = x.x * x.x + x.y * x.y;
                let r = r2.sqrt();
                let e1 = Vec3::x();
                let xy = Vec3::new(x.x, x.y, 0.0);
                e1 * (12.0 * x.x * x.x / r2 - 3.0) - xy * (8.0 * x.x.powi(3) / (r2 * r2)) + xy * (2.0 / r)
            }
            Form::PolySum(_) => return None,
            Form::Support(points) => {
                let mut best = points[0];
                for v in points {
                    if v.dot(x) > best.dot(x) {
                        best = *v;
                    }
                }
                best
            }
        };
        Some(g)
    }

    /// Closed-form Hessian of the extension, if available.
    pub fn hessian(&self, x: &Vec3, n: usize) -> Option<Matrix3<f64>> {
        let h = match self {
            Form::Constant => sphere_projector(x, n, radial(x, n)),
            Form::Reilly(a) => {
                let d = Matrix3::from_diagonal(&Vec3::new(a[0] * a[0], a[1] * a[1], a[2] * a[2]));
                let g = self.value(x, n);
                let dx = d * x;
                d / g - dx * dx.transpose() / g.powi(3)
            }
            Form::Lorentz => {
                let q = x.z * x.z - x.x * x.x - x.y * x.y;
                let j = Matrix3::from_diagonal(&Vec3::new(-1.0, -1.0, 1.0));
                let g = q.abs().sqrt();
                let jx = j * x;
                j * (q.signum() / g) - jx * jx.transpose() / g.powi(3)
            }
            Form::L1 => Matrix3::zeros(),
            Form::Cylinder { radius, .. } => {
                let mut p = *x;
                p[last(n)] = 0.0;
                let r = radial(&p, n - 1);
                let mut h = Matrix3::zeros();
                for i in 0..n {
                    for j in 0..n {
                        let delta = if i == j { 1.0 } else { 0.0 };
                        h[(i, j)] = radius * (delta - x[i] * x[j] / (r * r)) / r;
                    }
                }
                h
            }
            Form::Lm { m } => {
                let m = *m as i32;
                let s: f64 = (0..=n).map(|i| x[i].powi(2 * m)).sum();
                let f = (2 * m - 1) as f64 * s.powf(1.0 / (2.0 * m as f64) - 2.0);
                let mut h = Matrix3::zeros();
                for i in 0..=n {
                    for j in 0..=n {
                        let diag = if i == j { s * x[i].powi(2 * m - 2) } else { 0.0 };
                        h[(i, j)] = f * (diag - x[i].powi(2 * m - 1) * x[j].powi(2 * m - 1));
                    }
                }
                h
            }
            Form::Arc { radius } => arc_hessian(x, *radius),
            Form::Cubic => {
                let r2 = x.x * x.x + x.y * x.y;
                let r = r2.sqrt();
                let e1 = Vec3::x();
                let xy = Vec3::new(x.x, x.y, 0.0);
                let mut id = Matrix3::identity();
                id[(2, 2)] = 0.0;
                e1 * e1.transpose() * (24.0 * x.x / r2)
                    - (e1 * xy.transpose() + xy * e1.transpose()) * (24.0 * x.x * x.x / (r2 * r2))
                    - id * (8.0 * x.x.powi(3) / (r2 * r2))
                    + xy * xy.transpose() * (32.0 * x.x.powi(3) / (r2 * r2 * r2))
                    + (id - xy * xy.transpose() / r2) * (2.0 / r)
            }
            Form::PolySum(_) => return None,
            Form::Support(_) => Matrix3::zeros(),
        };
        Some(h)
    }
}

/// Axis of the arc whose normal cone contains the direction of `x`, if any.
fn arc_axis(x: &Vec3, radius: f64) -> Option<Vec3> {
    let r = x.xy().norm();
    let (ax, ay) = (x.x.abs(), x.y.abs());
    let threshold = (radius * radius - 1.0).sqrt() / radius;
    if ay >= ax && ay / r > threshold {
        Some(Vec3::new(0.0, x.y.signum(), 0.0))
    } else if ax > ay && ax / r > threshold {
        Some(Vec3::new(x.x.signum(), 0.0, 0.0))
    } else {
        None
    }
}

fn arc_center_offset(radius: f64) -> f64 {
    1.0 - (radius * radius - 1.0).sqrt()
}

fn arc_value(x: &Vec3, radius: f64) -> f64 {
    match arc_axis(x, radius) {
        Some(e) => arc_center_offset(radius) * e.dot(x) + radius * x.xy().norm(),
        None => x.x.abs() + x.y.abs(),
    }
}

fn arc_gradient(x: &Vec3, radius: f64) -> Vec3 {
    match arc_axis(x, radius) {
        Some(e) => {
            let xy = Vec3::new(x.x, x.y, 0.0);
            e * arc_center_offset(radius) + xy * (radius / xy.norm())
        }
        None => Vec3::new(x.x.signum(), x.y.signum(), 0.0),
    }
}

fn arc_hessian(x: &Vec3, radius: f64) -> Matrix3<f64> {
    match arc_axis(x, radius) {
        Some(_) => {
            let xy = Vec3::new(x.x, x.y, 0.0);
            sphere_projector(&xy, 1, xy.norm()) * radius
        }
        None => Matrix3::zeros(),
    }
}

/// Angles on S^1 where the arc integrand fails to be twice differentiable.
pub fn arc_breakpoints(radius: f64) -> Vec<f64> {
    let a = (1.0 / radius).asin();
    let mut out = Vec::new();
    for k in 0..4 {
        let c = k as f64 * std::f64::consts::FRAC_PI_2;
        out.push((c - a).rem_euclid(2.0 * std::f64::consts::PI));
        out.push((c + a).rem_euclid(2.0 * std::f64::consts::PI));
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}
