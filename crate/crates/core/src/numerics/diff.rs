//! Differentiation along grid lines: Fourier differentiation on periodic axes
//! and fourth-order finite differences elsewhere.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// How a parameter axis of a patch is sampled and differentiated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisKind {
    /// Equispaced samples of a periodic coordinate; Fourier differentiation.
    Periodic,
    /// Polar angle of a sphere-like chart sampled at `(j + 1/2) pi / N`. Data are
    /// extended across the poles (`f(-phi, l) = f(phi, l + pi)`) and then
    /// differentiated as a periodic signal. The companion axis must be periodic
    /// with an even sample count.
    Polar,
    /// Equispaced samples including both end points; fourth-order differences
    /// with one-sided stencils at the boundary.
    Open,
}

/// Fourth-order first-derivative stencil along one axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub axis: usize,
    pub order: usize,
    pub periodic: bool,
    pub step: f64,
}

impl Stencil {
    pub fn new(axis: usize, periodic: bool, step: f64) -> Self {
        Self {
            axis,
            order: 4,
            periodic,
            step,
        }
    }

    /// Differentiates a line of samples. Non-periodic lines need at least five samples.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len();
        let h12 = 12.0 * self.step;
        if self.periodic {
            return (0..n)
                .map(|i| {
                    let at = |k: isize| f[(i as isize + k).rem_euclid(n as isize) as usize];
                    (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / h12
                })
                .collect();
        }
        assert!(n >= 5, "fourth-order stencil needs at least five samples");
        let mut d = vec![0.0; n];
        d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / h12;
        d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / h12;
        for i in 2..n - 2 {
            d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / h12;
        }
        let m = n - 1;
        d[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) / h12;
        d[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / h12;
        d
    }
}

/// Cached Fourier differentiator for periodic lines of a fixed length.
pub struct SpectralDiff {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl SpectralDiff {
    pub fn new(len: usize, period: f64) -> Self {
        let mut planner = FftPlanner::new();
        let scale = 2.0 * std::f64::consts::PI / period;
        let wavenumbers = (0..len)
            .map(|k| {
                if len % 2 == 0 && k == len / 2 {
                    0.0
                } else if k <= len / 2 {
                    k as f64 * scale
                } else {
                    (k as f64 - len as f64) * scale
                }
            })
            .collect();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            wavenumbers,
        }
    }

    /// Differentiates two real lines at once (packed as real and imaginary parts).
    pub fn apply_pair(&self, a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.len;
        let mut buf: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.forward.process(&mut buf);
        // Split into the spectra of a and b, differentiate, and repack.
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let kc = (n - k) % n;
            let z = buf[k];
            let zc = buf[kc].conj();
            let fa = (z + zc) * 0.5;
            let fb = (z - zc) * Complex64::new(0.0, -0.5);
            let ik = Complex64::new(0.0, self.wavenumbers[k]);
            out[k] = ik * fa + Complex64::new(0.0, 1.0) * (ik * fb);
        }
        self.inverse.process(&mut out);
        let inv = 1.0 / n as f64;
        (
            out.iter().map(|z| z.re * inv).collect(),
            out.iter().map(|z| z.im * inv).collect(),
        )
    }

    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        let zeros = vec![0.0; a.len()];
        self.apply_pair(a, &zeros).0
    }
}

/// Fourier derivative of equispaced samples of a `period`-periodic function.
pub fn spectral_derivative(values: &[f64], period: f64) -> Vec<f64> {
    SpectralDiff::new(values.len(), period).apply(values)
}
