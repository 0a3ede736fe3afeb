//! Closed-form eigen-solvers for matrices of size at most 3x3.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

fn check_size(a: &DMatrix<f64>) {
    assert!(a.is_square() && a.nrows() >= 1 && a.nrows() <= 3, "closed-form solvers handle 1x1 to 3x3");
}

/// Eigenvalues (ascending) and eigenvectors of a symmetric matrix up to 3x3.
pub fn eig_symmetric(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    check_size(a);
    let n = a.nrows();
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let asym = (a - a.transpose()).amax();
    if asym > 1e-9 * scale.max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let a = (a + a.transpose()) * 0.5;
    match n {
        1 => Ok(SymmetricEigen {
            values: vec![a[(0, 0)]],
            vectors: DMatrix::from_element(1, 1, 1.0),
        }),
        2 => Ok(sym2(&a)),
        _ => Ok(sym3(&a)),
    }
}

fn sym2(a: &DMatrix<f64>) -> SymmetricEigen {
    let (p, b, q) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
    let mean = 0.5 * (p + q);
    let rad = (0.5 * (p - q)).hypot(b);
    let lo = mean - rad;
    let hi = mean + rad;
    // Eigenvector of the larger eigenvalue, from the better conditioned row.
    let (vx, vy) = if rad == 0.0 {
        (1.0, 0.0)
    } else {
        let r1 = (b, hi - p);
        let r2 = (hi - q, b);
        if r1.0.hypot(r1.1) >= r2.0.hypot(r2.1) {
            r1
        } else {
            r2
        }
    };
    let norm = vx.hypot(vy);
    let (vx, vy) = (vx / norm, vy / norm);
    let vectors = DMatrix::from_column_slice(2, 2, &[-vy, vx, vx, vy]);
    SymmetricEigen {
        values: vec![lo, hi],
        vectors,
    }
}

fn sym3(a: &DMatrix<f64>) -> SymmetricEigen {
    let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let mut values = if off == 0.0 {
        vec![a[(0, 0)], a[(1, 1)], a[(2, 2)]]
    } else {
        let q = a.trace() / 3.0;
        let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * off;
        let p = (p2 / 6.0).sqrt();
        let b = (a - DMatrix::identity(3, 3) * q) / p;
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let l1 = q + 2.0 * p * phi.cos();
        let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
        vec![l3, 3.0 * q - l1 - l3, l1]
    };
    values.sort_by(|x, y| x.total_cmp(y));

    let scale = a.amax().max(f64::MIN_POSITIVE);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(3);
    // Visit eigenvalues from the most isolated one so that clustered pairs are
    // completed from the orthogonal complement.
    let gap = |i: usize| {
        (0..3)
            .filter(|&j| j != i)
            .map(|j| (values[i] - values[j]).abs())
            .fold(f64::INFINITY, f64::min)
    };
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| gap(j).total_cmp(&gap(i)));
    let mut vecs = vec![DVector::zeros(3); 3];
    for &i in &order {
        let v = if basis.len() == 2 {
            let c = basis[0].cross(&basis[1]);
            c.normalize()
        } else {
            let m = a - DMatrix::identity(3, 3) * values[i];
            let rows: Vec<nalgebra::Vector3<f64>> = (0..3)
                .map(|r| nalgebra::Vector3::new(m[(r, 0)], m[(r, 1)], m[(r, 2)]))
                .collect();
            let mut best = nalgebra::Vector3::zeros();
            for (r, s) in [(0, 1), (0, 2), (1, 2)] {
                let c = rows[r].cross(&rows[s]);
                if c.norm() > best.norm() {
                    best = c;
                }
            }
            let mut v = DVector::from_column_slice(best.as_slice());
            for b in &basis {
                let d = v.dot(b);
                v -= b * d;
            }
            if v.norm() <= 1e-8 * scale * scale {
                // Degenerate eigenvalue: any unit vector orthogonal to the basis found so far.
                complement(&basis)
            } else {
                v.normalize()
            }
        };
        basis.push(v.clone());
        vecs[i] = v;
    }
    let mut vectors = DMatrix::zeros(3, 3);
    for (i, v) in vecs.iter().enumerate() {
        vectors.set_column(i, v);
    }
    SymmetricEigen { values, vectors }
}

fn complement(basis: &[DVector<f64>]) -> DVector<f64> {
    for axis in 0..3 {
        let mut v = DVector::zeros(3);
        v[axis] = 1.0;
        for b in basis {
            let d = v.dot(b);
            v -= b * d;
        }
        if v.norm() > 0.5 {
            return v.normalize();
        }
    }
    unreachable!("three axes cannot all lie in a subspace of dimension < 3")
}

/// Eigenvalues of a general real matrix up to 3x3, from the characteristic
/// polynomial. Complex roots come in exact conjugate pairs.
pub fn eig_general(a: &DMatrix<f64>) -> Vec<Complex64> {
    check_size(a);
    match a.nrows() {
        1 => vec![Complex64::new(a[(0, 0)], 0.0)],
        2 => {
            let tr = a.trace();
            let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            quadratic_roots(-tr, det)
        }
        _ => {
            let tr = a.trace();
            let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
                + a[(0, 0)] * a[(2, 2)]
                - a[(0, 2)] * a[(2, 0)]
                + a[(1, 1)] * a[(2, 2)]
                - a[(1, 2)] * a[(2, 1)];
            cubic_roots(-tr, minors, -a.determinant())
        }
    }
}

/// Roots of `x^2 + b x + c`.
fn quadratic_roots(b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Stable form avoiding cancellation.
        let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sgn * s);
        let (r1, r2) = if q == 0.0 { (0.0, -b) } else { (q, c / q) };
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        vec![Complex64::new(lo, 0.0), Complex64::new(hi, 0.0)]
    } else {
        let re = -0.5 * b;
        let im = 0.5 * (-disc).sqrt();
        vec![Complex64::new(re, -im), Complex64::new(re, im)]
    }
}

/// Roots of `x^3 + b x^2 + c x + d`.
fn cubic_roots(b: f64, c: f64, d: f64) -> Vec<Complex64> {
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let polish = |mut x: f64| {
        for _ in 0..3 {
            let f = ((x + b) * x + c) * x + d;
            let df = (3.0 * x + 2.0 * b) * x + c;
            if df == 0.0 {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            x -= step;
        }
        x
    };
    if disc <= 0.0 {
        // Three real roots (trigonometric form).
        let mut roots: Vec<f64> = if p == 0.0 {
            vec![-shift; 3]
        } else {
            let m = 2.0 * (-p / 3.0).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            (0..3)
                .map(|k| polish(m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - shift))
                .collect()
        };
        roots.sort_by(|x, y| x.total_cmp(y));
        roots.into_iter().map(|r| Complex64::new(r, 0.0)).collect()
    } else {
        let s = disc.sqrt();
        let u = (-q / 2.0 + s).cbrt();
        let v = (-q / 2.0 - s).cbrt();
        let real = polish(u + v - shift);
        // Deflate: x^2 + (b + real) x + (c + real (b + real)).
        let b2 = b + real;
        let c2 = c + real * b2;
        let mut roots = vec![Complex64::new(real, 0.0)];
        roots.extend(quadratic_roots(b2, c2));
        roots
    }
}
