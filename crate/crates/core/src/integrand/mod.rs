//! Energy densities on the unit sphere.
//!
//! An [`Integrand`] is always evaluated through its degree-one homogeneous
//! extension `γ̄(x) = |x| γ(x/|x|)`. Derivatives are ambient: the Cahn-Hoffman
//! vector is `∇γ̄` and the sphere Hessian `D²γ + γ·1` is the restriction of
//! `Hess γ̄` to the tangent space.

mod convexity;
mod forms;
mod gallery;
mod specfile;

use nalgebra::{DMatrix, Matrix3};

use crate::{Error, Result, Vec3};

pub use convexity::{classify_convexity, ConvexityClass, ConvexityVerdict};
pub use forms::{arc_breakpoints, Form, PolyTerm};
pub use gallery::{gallery, params, Params, GALLERY_NAMES};
pub use specfile::{load_spec, parse_spec};

/// Distance below which a normal counts as lying on a declared set.
pub const DECLARED_SET_TOL: f64 = 1e-10;

/// How derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

/// Declared regularity of the integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Smoothness {
    C0,
    C1,
    C2,
    CInfinity,
}

impl std::fmt::Display for Smoothness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Smoothness::C0 => "C0",
            Smoothness::C1 => "C1",
            Smoothness::C2 => "C2",
            Smoothness::CInfinity => "Cinf",
        };
        f.write_str(s)
    }
}

/// A set of normals described by an equation rather than by sampling.
#[derive(Clone, Debug, PartialEq)]
pub enum NormalSet {
    Empty,
    /// Normals with some vanishing coordinate.
    CoordinatePlanes,
    /// `ν_{n+1} ∈ {0, ±1}`.
    EquatorAndPoles,
    /// `ν_3² = ν_1² + ν_2²`.
    LightCone,
    /// Angles on S¹.
    Angles(Vec<f64>),
}

impl NormalSet {
    pub fn contains(&self, nu: &Vec3, n: usize) -> bool {
        match self {
            NormalSet::Empty => false,
            NormalSet::CoordinatePlanes => (0..=n).any(|i| nu[i].abs() < DECLARED_SET_TOL),
            NormalSet::EquatorAndPoles => {
                let t = nu[n].abs();
                t < DECLARED_SET_TOL || (0..n).map(|i| nu[i] * nu[i]).sum::<f64>().sqrt() < DECLARED_SET_TOL
            }
            NormalSet::LightCone => (nu.z * nu.z - nu.x * nu.x - nu.y * nu.y).abs() < DECLARED_SET_TOL,
            NormalSet::Angles(angles) => {
                let theta = nu.y.atan2(nu.x);
                angles.iter().any(|a| {
                    let d = (theta - a).rem_euclid(2.0 * std::f64::consts::PI);
                    d.min(2.0 * std::f64::consts::PI - d) < DECLARED_SET_TOL
                })
            }
        }
    }
}

/// The tangent-space matrix `D²γ + γ·1` together with the basis it is written in.
#[derive(Clone, Debug)]
pub struct SphereHessian {
    pub matrix: DMatrix<f64>,
    pub basis: Vec<Vec3>,
}

/// An energy density `γ : Sⁿ → ℝ≥0`, `n ∈ {1, 2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Integrand {
    pub name: String,
    pub dimension: usize,
    pub form: Form,
    pub derivative_mode: DerivativeMode,
    pub smoothness: Smoothness,
    /// Normals where the integrand loses regularity.
    pub non_smooth: NormalSet,
    /// Derivative order that fails on `non_smooth`: 1 for the gradient, 2 for the Hessian.
    pub non_smooth_order: u8,
    pub zero_set: NormalSet,
}

impl Integrand {
    pub fn new(name: &str, dimension: usize, form: Form) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(Error::UnsupportedDimension(dimension));
        }
        let derivative_mode = match form {
            Form::PolySum(_) => DerivativeMode::FiniteDifference,
            _ => DerivativeMode::Analytic,
        };
        Ok(Integrand {
            name: name.to_string(),
            dimension,
            form,
            derivative_mode,
            smoothness: Smoothness::CInfinity,
            non_smooth: NormalSet::Empty,
            non_smooth_order: 2,
            zero_set: NormalSet::Empty,
        })
    }

    pub(crate) fn with_regularity(mut self, smoothness: Smoothness, set: NormalSet, order: u8) -> Self {
        self.smoothness = smoothness;
        self.non_smooth = set;
        self.non_smooth_order = order;
        self
    }

    /// `γ ≡ 1` on Sⁿ.
    pub fn constant(n: usize) -> Result<Self> {
        Integrand::new("constant", n, Form::Constant)
    }

    /// Support function of a finite point set, as produced by convexification.
    pub fn support(n: usize, points: Vec<Vec3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("support function needs at least one point".into()));
        }
        Ok(Integrand::new("support", n, Form::Support(points))?.with_regularity(
            Smoothness::C0,
            NormalSet::Empty,
            1,
        ))
    }

    /// Checks the length of `nu` and renormalizes it.
    pub fn unit(&self, nu: &Vec3) -> Result<Vec3> {
        if self.dimension == 1 && nu.z != 0.0 {
            return Err(Error::DimensionMismatch { expected: 2, got: 3 });
        }
        let norm = nu.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotAUnitVector { norm });
        }
        Ok(nu / norm)
    }

    /// Builds an ambient vector from `n + 1` coordinates.
    pub fn vector_from_slice(&self, v: &[f64]) -> Result<Vec3> {
        if v.len() != self.dimension + 1 {
            return Err(Error::DimensionMismatch { expected: self.dimension + 1, got: v.len() });
        }
        let mut out = Vec3::zeros();
        for (i, x) in v.iter().enumerate() {
            out[i] = *x;
        }
        Ok(out)
    }

    pub fn evaluate(&self, nu: &Vec3) -> Result<f64> {
        let nu = self.unit(nu)?;
        Ok(self.form.value(&nu, self.dimension))
    }

    /// `γ̄(x) = |x| γ(x/|x|)`, zero at the origin.
    pub fn extend(&self, x: &Vec3) -> f64 {
        let r = x.norm();
        if r == 0.0 {
            return 0.0;
        }
        r * self.form.value(&(x / r), self.dimension)
    }

    pub fn is_non_smooth(&self, nu: &Vec3) -> bool {
        self.non_smooth.contains(nu, self.dimension)
    }

    pub fn in_zero_set(&self, nu: &Vec3) -> bool {
        self.zero_set.contains(nu, self.dimension)
    }

    pub fn has_zero_set(&self) -> bool {
        self.zero_set != NormalSet::Empty
    }

    pub fn is_twice_differentiable_at(&self, nu: &Vec3) -> bool {
        !self.is_non_smooth(nu)
    }

    fn coords(&self, nu: &Vec3) -> Vec<f64> {
        (0..=self.dimension).map(|i| nu[i]).collect()
    }

    /// `∇γ̄` at `ν`. By Euler's relation `⟨∇γ̄, ν⟩ = γ(ν)`.
    pub fn ambient_gradient(&self, nu: &Vec3) -> Result<Vec3> {
        let nu = self.unit(nu)?;
        if self.non_smooth_order <= 1 && self.is_non_smooth(&nu) {
            return Err(Error::NotDifferentiable(self.coords(&nu)));
        }
        match self.form.gradient(&nu, self.dimension) {
            Some(g) if self.derivative_mode == DerivativeMode::Analytic => Ok(g),
            _ => Ok(self.fd_gradient(&nu)),
        }
    }

    /// `Hess γ̄` at `ν` as an ambient 3×3 matrix (unused rows are zero for n = 1).
    pub fn ambient_hessian(&self, nu: &Vec3) -> Result<Matrix3<f64>> {
        let nu = self.unit(nu)?;
        if self.is_non_smooth(&nu) {
            return Err(Error::NotTwiceDifferentiable(self.coords(&nu)));
        }
        match self.form.hessian(&nu, self.dimension) {
            Some(h) if self.derivative_mode == DerivativeMode::Analytic => Ok(h),
            _ => Ok(self.fd_hessian(&nu)),
        }
    }

    /// `A = D²γ + γ·1` in the tangent basis of [`tangent_basis`].
    pub fn sphere_hessian_operator(&self, nu: &Vec3) -> Result<SphereHessian> {
        let nu = self.unit(nu)?;
        let h = self.ambient_hessian(&nu)?;
        let basis = tangent_basis(&nu, self.dimension);
        Ok(SphereHessian { matrix: restrict(&h, &basis), basis })
    }

    /// Central-difference gradient of `γ̄` with step `ε^{1/3}`.
    pub fn fd_gradient(&self, x: &Vec3) -> Vec3 {
        let h = f64::EPSILON.cbrt();
        let f0 = self.extend(x);
        let mut g = Vec3::zeros();
        let mut worst = 0.0f64;
        for i in 0..=self.dimension {
            let mut e = Vec3::zeros();
            e[i] = h;
            let fp = self.extend(&(x + e));
            let fm = self.extend(&(x - e));
            g[i] = (fp - fm) / (2.0 * h);
            worst = worst.max(((fp - f0) / h - (f0 - fm) / h).abs());
        }
        if worst > 1e-4 * f0.abs().max(1.0) {
            log::warn!(
                "one-sided difference quotients of '{}' disagree by {:.3e} at {:?}",
                self.name,
                worst,
                self.coords(x)
            );
        }
        g
    }

    /// Central-difference Hessian of `γ̄` with step `ε^{1/4}`.
    pub fn fd_hessian(&self, x: &Vec3) -> Matrix3<f64> {
        let h = f64::EPSILON.powf(0.25);
        let n = self.dimension;
        let f = |v: Vec3| self.extend(&v);
        let unit = |i: usize| {
            let mut e = Vec3::zeros();
            e[i] = h;
            e
        };
        let mut m = Matrix3::zeros();
        let f0 = f(*x);
        for i in 0..=n {
            let ei = unit(i);
            m[(i, i)] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / (h * h);
            for j in 0..i {
                let ej = unit(j);
                let v = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) / (4.0 * h * h);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }
}

/// Orthonormal tangent basis of Sⁿ at `ν`.
///
/// n = 1 uses `(−ν₂, ν₁)`; n = 2 applies Gram-Schmidt to the two coordinate
/// axes least aligned with `ν`, taken in index order.
pub fn tangent_basis(nu: &Vec3, n: usize) -> Vec<Vec3> {
    if n == 1 {
        return vec![Vec3::new(-nu.y, nu.x, 0.0)];
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|a, b| nu[*a].abs().total_cmp(&nu[*b].abs()).then(a.cmp(b)));
    let (mut a, mut b) = (idx[0], idx[1]);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let mut out: Vec<Vec3> = Vec::with_capacity(2);
    for k in [a, b] {
        let mut v = Vec3::zeros();
        v[k] = 1.0;
        v -= nu * nu.dot(&v);
        for u in &out {
            v -= u * u.dot(&v);
        }
        out.push(v.normalize());
    }
    out
}

/// `Bᵀ H B`, symmetrized.
pub fn restrict(h: &Matrix3<f64>, basis: &[Vec3]) -> DMatrix<f64> {
    let n = basis.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = basis[i].dot(&(h * basis[j]));
        }
    }
    let t = m.transpose();
    (m + t) * 0.5
}
