//! One-dimensional quadrature weights.

use std::f64::consts::PI;

/// Trapezoid weights for `count` equispaced nodes over one period of length `period`.
pub fn periodic_weights(count: usize, period: f64) -> Vec<f64> {
    vec![period / count as f64; count]
}

/// Fejér's first rule on the Chebyshev points `x_j = cos((j + 1/2) pi / count)`.
///
/// The weights integrate over `x` in `[-1, 1]`; in terms of the polar angle
/// `phi_j = (j + 1/2) pi / count` they integrate `f(cos phi) sin phi dphi` over `[0, pi]`.
pub fn fejer_weights(count: usize) -> Vec<f64> {
    let n = count as f64;
    (0..count)
        .map(|j| {
            let theta = (j as f64 + 0.5) * PI / n;
            let mut s = 0.0;
            for k in 1..=count / 2 {
                let k = k as f64;
                s += (2.0 * k * theta).cos() / (4.0 * k * k - 1.0);
            }
            2.0 / n * (1.0 - 2.0 * s)
        })
        .collect()
}

/// Fourth-order end-corrected trapezoid (Gregory) weights on `count` equispaced
/// nodes spanning `[lo, hi]` inclusive. Falls back to Simpson/trapezoid for tiny grids.
pub fn gregory_weights(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    assert!(count >= 2, "need at least two nodes");
    let h = (hi - lo) / (count - 1) as f64;
    if count < 8 {
        let mut w = vec![h; count];
        if count % 2 == 1 && count >= 3 {
            for (i, wi) in w.iter_mut().enumerate() {
                *wi = if i == 0 || i == count - 1 {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                };
            }
        } else {
            w[0] = h / 2.0;
            w[count - 1] = h / 2.0;
        }
        return w;
    }
    let ends = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
    let mut w = vec![h; count];
    for (i, e) in ends.iter().enumerate() {
        w[i] = e * h;
        w[count - 1 - i] = e * h;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_integrates_polynomials_in_cos() {
        let n = 16;
        let w = fejer_weights(n);
        let xs: Vec<f64> = (0..n)
            .map(|j| ((j as f64 + 0.5) * PI / n as f64).cos())
            .collect();
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        let x4: f64 = xs.iter().zip(&w).map(|(x, w)| x.powi(4) * w).sum();
        assert!((x4 - 0.4).abs() < 1e-14);
    }

    #[test]
    fn gregory_is_fourth_order() {
        let f = |x: f64| x.exp();
        let exact = 1f64.exp() - 1.0;
        let err = |n: usize| {
            let w = gregory_weights(n, 0.0, 1.0);
            let h = 1.0 / (n - 1) as f64;
            let s: f64 = w.iter().enumerate().map(|(i, w)| w * f(i as f64 * h)).sum();
            (s - exact).abs()
        };
        let ratio = err(21) / err(41);
        assert!(ratio > 14.0, "ratio {ratio}");
    }
}
