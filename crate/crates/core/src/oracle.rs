//! Independent numerical oracles used to cross-check closed forms.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::linalg;

/// k-th derivative of an analytic f at z0 by the trapezoidal rule on a
/// circle of the given radius.
pub fn contour_derivative(
    f: impl Fn(Complex64) -> Result<Complex64>,
    z0: Complex64,
    k: u32,
    radius: f64,
    points: usize,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..points {
        let t = 2.0 * PI * p as f64 / points as f64;
        let w = Complex64::from_polar(1.0, t);
        acc += f(z0 + w * radius)? * w.powi(-(k as i32));
    }
    let fact: f64 = (1..=k).map(f64::from).product();
    Ok(acc * fact / (points as f64 * radius.powi(k as i32)))
}

/// Eigenvalues of -d²/dx² + V(x) on [0, 2π) with periodic boundary
/// conditions, by an 8th-order central difference on M points.
pub fn fd_periodic_eigenvalues(m: usize, v: impl Fn(f64) -> f64) -> Vec<f64> {
    const STENCIL: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let h = 2.0 * PI / m as f64;
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for (o, c) in STENCIL.iter().enumerate() {
            let w = -c / (h * h);
            if o == 0 {
                a[(i, i)] += w;
            } else {
                a[(i, (i + o) % m)] += w;
                a[(i, (i + m - o) % m)] += w;
            }
        }
        a[(i, i)] += v(i as f64 * h);
    }
    linalg::sym_eigenvalues(&a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_derivative_of_exp() {
        let d = contour_derivative(|z| Ok(z.exp()), Complex64::new(0.3, 0.0), 2, 0.25, 64).unwrap();
        assert!((d - Complex64::new(0.3_f64.exp(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn free_periodic_spectrum() {
        let ev = fd_periodic_eigenvalues(128, |_| 0.0);
        let want = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
