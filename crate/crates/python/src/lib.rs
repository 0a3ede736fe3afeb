//! Python bindings for `wulffkit`.
//!
//! Vectors cross the boundary as lists of two or three floats, reports as dicts.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wk::hypersurface as hs;
use wk::integrand::{self, Params};
use wk::numerics::default_sphere_grid;
use wk::{variational, wulff, Vec3};

fn err(e: wk::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vec3(v: &[f64]) -> PyResult<Vec3> {
    match v {
        [x, y] => Ok(Vec3::new(*x, *y, 0.0)),
        [x, y, z] => Ok(Vec3::new(*x, *y, *z)),
        _ => Err(PyValueError::new_err(format!("expected 2 or 3 components, got {}", v.len()))),
    }
}

fn list(v: &Vec3, n: usize) -> Vec<f64> {
    v.iter().take(n + 1).copied().collect()
}

fn grid_resolution(n: usize, resolution: Option<usize>) -> usize {
    resolution.unwrap_or(if n == 1 { 720 } else { 64 })
}

/// An energy density on the unit circle or sphere.
#[pyclass(module = "wulffkit", frozen)]
struct Integrand {
    inner: integrand::Integrand,
}

#[pymethods]
impl Integrand {
    /// A gallery integrand; parameters are floats or lists of floats.
    #[staticmethod]
    #[pyo3(signature = (name, **params))]
    fn gallery(name: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = Params::new();
        if let Some(d) = params {
            for (k, v) in d.iter() {
                let key: String = k.extract()?;
                let vals = match v.extract::<f64>() {
                    Ok(x) => vec![x],
                    Err(_) => v.extract::<Vec<f64>>()?,
                };
                p.insert(key, vals);
            }
        }
        integrand::gallery(name, &p).map(|inner| Self { inner }).map_err(err)
    }

    #[staticmethod]
    fn constant(n: usize) -> PyResult<Self> {
        integrand::Integrand::constant(n).map(|inner| Self { inner }).map_err(err)
    }

    /// Parses the text of an integrand spec file.
    #[staticmethod]
    fn from_spec(text: &str) -> PyResult<Self> {
        integrand::parse_spec(text).map(|inner| Self { inner }).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension
    }

    fn evaluate(&self, nu: Vec<f64>) -> PyResult<f64> {
        self.inner.evaluate(&vec3(&nu)?).map_err(err)
    }

    /// The degree-one homogeneous extension.
    fn extend(&self, x: Vec<f64>) -> PyResult<f64> {
        Ok(self.inner.extend(&vec3(&x)?))
    }

    /// The Cahn-Hoffman map.
    fn xi(&self, nu: Vec<f64>) -> PyResult<Vec<f64>> {
        let x = wulff::xi(&self.inner, &vec3(&nu)?).map_err(err)?;
        Ok(list(&x, self.inner.dimension))
    }

    fn principal_curvatures_of_xi(&self, nu: Vec<f64>) -> PyResult<Vec<f64>> {
        wulff::principal_curvatures_of_xi(&self.inner, &vec3(&nu)?).map_err(err)
    }

    /// Returns `(verdict, witnesses)` with witnesses as `(normal, eigenvalue)` pairs.
    #[pyo3(signature = (resolution=None, tolerance=None))]
    fn classify(&self, resolution: Option<usize>, tolerance: Option<f64>) -> PyResult<(String, Vec<(Vec<f64>, f64)>)> {
        let n = self.inner.dimension;
        let grid = default_sphere_grid(n, grid_resolution(n, resolution)).map_err(err)?;
        let c = integrand::classify_convexity(&self.inner, &grid, tolerance).map_err(err)?;
        Ok((c.verdict.to_string(), c.witnesses.iter().map(|(nu, e)| (list(nu, n), *e)).collect()))
    }

    /// Vertices of the Wulff shape built from a sphere grid.
    #[pyo3(signature = (resolution=None))]
    fn wulff_vertices(&self, resolution: Option<usize>) -> PyResult<Vec<Vec<f64>>> {
        let n = self.inner.dimension;
        let grid = default_sphere_grid(n, grid_resolution(n, resolution)).map_err(err)?;
        let w = wulff::wulff_construct(&self.inner, &grid).map_err(err)?;
        Ok(w.vertices().iter().map(|v| list(v, n)).collect())
    }

    /// Clusters of singular normals, each a list of unit vectors.
    #[pyo3(signature = (resolution=None))]
    fn singular_clusters(&self, resolution: Option<usize>) -> PyResult<Vec<Vec<Vec<f64>>>> {
        let n = self.inner.dimension;
        let grid = default_sphere_grid(n, grid_resolution(n, resolution)).map_err(err)?;
        let s = wulff::singular_set(&self.inner, &grid, None).map_err(err)?;
        Ok(s.clusters.iter().map(|c| c.iter().map(|&i| list(&grid.nodes[i], n)).collect()).collect())
    }

    /// `∫ H dA` over the Cahn-Hoffman image.
    #[pyo3(signature = (resolution=None))]
    fn total_curvature(&self, resolution: Option<usize>) -> PyResult<f64> {
        let n = self.inner.dimension;
        let grid = default_sphere_grid(n, grid_resolution(n, resolution)).map_err(err)?;
        wulff::mean_curvature_integral(&self.inner, &grid).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Integrand({:?}, n={})", self.inner.name, self.inner.dimension)
    }
}

/// A closed or open piecewise parametric hypersurface.
#[pyclass(module = "wulffkit", frozen)]
struct Surface {
    inner: hs::PiecewiseHypersurface,
}

fn surface(r: wk::Result<hs::PiecewiseHypersurface>) -> PyResult<Surface> {
    r.map(|inner| Surface { inner }).map_err(err)
}

#[pymethods]
impl Surface {
    #[staticmethod]
    fn circle(radius: f64, count: usize) -> PyResult<Self> {
        surface(hs::circle(radius, count))
    }

    #[staticmethod]
    fn ellipse(a: f64, b: f64, count: usize) -> PyResult<Self> {
        surface(hs::ellipse(a, b, count))
    }

    #[staticmethod]
    fn sphere(radius: f64, nlat: usize) -> PyResult<Self> {
        surface(hs::sphere(radius, nlat))
    }

    #[staticmethod]
    fn ellipsoid(a: [f64; 3], nlat: usize) -> PyResult<Self> {
        surface(hs::ellipsoid(a, nlat))
    }

    #[staticmethod]
    fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> PyResult<Self> {
        surface(hs::torus(major, minor, nu, nv))
    }

    #[staticmethod]
    fn cube(half: f64, count: usize) -> PyResult<Self> {
        surface(hs::cube(half, count))
    }

    /// The Wulff boundary of `g` parametrized by its Cahn-Hoffman map.
    #[staticmethod]
    fn wulff(g: &Integrand, resolution: usize) -> PyResult<Self> {
        surface(hs::wulff_boundary(&g.inner, resolution))
    }

    /// The star-shaped `r(ν)·ν` with `r(ν) = 1 + Σ a sin(⟨f, ν⟩ + φ)` for `(f, a, φ)` triples.
    #[staticmethod]
    fn star_shaped(n: usize, modes: Vec<(Vec<f64>, f64, f64)>, resolution: usize) -> PyResult<Self> {
        let modes = modes
            .into_iter()
            .map(|(f, amplitude, phase)| Ok(hs::Mode { frequency: vec3(&f)?, amplitude, phase }))
            .collect::<PyResult<Vec<_>>>()?;
        surface(hs::star_shaped(n, &modes, resolution))
    }

    /// Loads a tabulated grid CSV.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        surface(hs::load_tabulated(&path))
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension
    }

    /// Sample points of every patch, concatenated.
    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        let n = self.inner.dimension;
        self.inner.patches.iter().flat_map(|p| p.points.iter().map(|x| list(x, n))).collect()
    }

    fn scaled(&self, c: f64) -> Self {
        Self { inner: self.inner.scaled(c) }
    }

    fn is_closed(&self) -> bool {
        self.inner.is_closed()
    }

    fn __repr__(&self) -> String {
        let nodes: usize = self.inner.patches.iter().map(|p| p.len()).sum();
        format!("Surface(n={}, patches={}, nodes={nodes})", self.inner.dimension, self.inner.patches.len())
    }
}

/// Per-node anisotropic curvatures of a surface.
#[pyclass(module = "wulffkit", frozen)]
struct CurvatureField {
    inner: hs::CurvatureField,
}

#[pymethods]
impl CurvatureField {
    #[new]
    fn new(g: &Integrand, x: &Surface) -> PyResult<Self> {
        hs::curvature_field(&g.inner, &x.inner).map(|inner| Self { inner }).map_err(err)
    }

    /// `(weighted mean, max − min)` of `Λ`.
    fn lambda_stats(&self) -> (f64, f64) {
        self.inner.lambda_stats()
    }

    #[getter]
    fn lambdas(&self) -> Vec<f64> {
        self.inner.nodes.iter().map(|c| c.lambda).collect()
    }

    /// Anisotropic principal curvatures per node as `(re, im)` pairs.
    #[getter]
    fn principal(&self) -> Vec<Vec<(f64, f64)>> {
        self.inner.nodes.iter().map(|c| c.principal.iter().map(|k| (k.re, k.im)).collect()).collect()
    }

    #[getter]
    fn excluded_fraction(&self) -> f64 {
        self.inner.excluded_fraction()
    }

    fn max_imaginary(&self) -> f64 {
        self.inner.max_imaginary()
    }

    fn max_principal(&self) -> f64 {
        self.inner.max_principal()
    }

    fn to_csv(&self) -> String {
        hs::curvature_csv(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.nodes.len()
    }
}

#[pyfunction]
fn energy(g: &Integrand, x: &Surface) -> PyResult<f64> {
    variational::energy(&g.inner, &x.inner).map_err(err)
}

#[pyfunction]
fn volume(x: &Surface) -> PyResult<f64> {
    variational::volume(&x.inner).map_err(err)
}

/// The anisotropic parallel surface `X + t ξ̃`.
#[pyfunction]
fn parallel(g: &Integrand, x: &Surface, t: f64) -> PyResult<Surface> {
    surface(variational::parallel(&g.inner, &x.inner, t))
}

#[pyfunction]
#[pyo3(signature = (g, x, tol=1e-6))]
fn camc_check<'py>(py: Python<'py>, g: &Integrand, x: &Surface, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = hs::camc_check(&g.inner, &x.inner, tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("is_camc", r.is_camc)?;
    d.set_item("lambda_mean", r.lambda_mean)?;
    d.set_item("lambda_spread", r.lambda_spread)?;
    d.set_item("edges_hold", r.edges.iter().all(|e| e.holds))?;
    d.set_item("excluded", r.excluded)?;
    d.set_item("total", r.total)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (g, x, t=None))]
fn steiner<'py>(py: Python<'py>, g: &Integrand, x: &Surface, t: Option<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
    let r = variational::steiner(&g.inner, &x.inner, t.as_deref().unwrap_or(&[])).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("coefficients", r.coefficients)?;
    d.set_item("direct_samples", r.direct_samples)?;
    d.set_item("max_polynomial_residual", r.max_polynomial_residual)?;
    d.set_item("energy", r.energy)?;
    Ok(d)
}

/// One dict per `r` with keys `r`, `value`, `scale` and `relative`.
#[pyfunction]
fn minkowski(g: &Integrand, x: &Surface) -> PyResult<Vec<BTreeMap<&'static str, f64>>> {
    let r = variational::minkowski(&g.inner, &x.inner).map_err(err)?;
    Ok(r.residuals
        .iter()
        .map(|m| BTreeMap::from([("r", m.r as f64), ("value", m.value), ("scale", m.scale), ("relative", m.relative)]))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (g, x, tol=1e-6))]
fn stability<'py>(py: Python<'py>, g: &Integrand, x: &Surface, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let r = variational::second_variation_volume_preserving(&g.inner, &x.inner, tol).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("f0", r.f0)?;
    d.set_item("v0", r.v0)?;
    d.set_item("lambda_from_minkowski", r.lambda_from_minkowski)?;
    d.set_item("lambda_from_field", r.lambda_from_field)?;
    d.set_item("lambda_disagreement", r.lambda_disagreement)?;
    d.set_item("f_second", r.f_second)?;
    d.set_item("umbilic_deviation_integral", r.umbilic_deviation_integral)?;
    d.set_item("max_umbilic_deviation", r.max_umbilic_deviation)?;
    d.set_item("max_curvature", r.max_curvature)?;
    d.set_item("mu_prime_fd", r.mu_prime_fd)?;
    d.set_item("verdict", r.verdict.to_string())?;
    Ok(d)
}

#[pyfunction]
fn homothety<'py>(py: Python<'py>, g: &Integrand, x: &Surface) -> PyResult<Bound<'py, PyDict>> {
    let h = variational::homothety_derivative(&g.inner, &x.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("value", h.value)?;
    d.set_item("positivity", h.positivity)?;
    d.set_item("fd_value", h.fd_value)?;
    d.set_item("relative_residual", h.relative_residual)?;
    Ok(d)
}

/// `(δ𝓕 formula, δ𝓕 finite difference, δV formula, δV finite difference)` for a translation.
#[pyfunction]
#[pyo3(signature = (g, x, direction, h=1e-4))]
fn translation_variation(g: &Integrand, x: &Surface, direction: Vec<f64>, h: f64) -> PyResult<(f64, f64, f64, f64)> {
    let psi = variational::translation_field(&x.inner, &vec3(&direction)?);
    let fv = variational::first_variation_check(&g.inner, &x.inner, &psi, h).map_err(err)?;
    Ok((fv.energy.rhs, fv.energy.lhs, fv.volume.rhs, fv.volume.lhs))
}

/// Runs the command line tool in-process and returns `(exit code, stdout)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String) {
    let mut buf = Vec::new();
    let code = wk::cli::run(std::iter::once("wulffkit".to_string()).chain(args), &mut buf);
    (code, String::from_utf8_lossy(&buf).into_owned())
}

#[pymodule]
fn wulffkit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Integrand>()?;
    m.add_class::<Surface>()?;
    m.add_class::<CurvatureField>()?;
    m.add("GALLERY_NAMES", integrand::GALLERY_NAMES.to_vec())?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(volume, m)?)?;
    m.add_function(wrap_pyfunction!(parallel, m)?)?;
    m.add_function(wrap_pyfunction!(camc_check, m)?)?;
    m.add_function(wrap_pyfunction!(steiner, m)?)?;
    m.add_function(wrap_pyfunction!(minkowski, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add_function(wrap_pyfunction!(homothety, m)?)?;
    m.add_function(wrap_pyfunction!(translation_variation, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
