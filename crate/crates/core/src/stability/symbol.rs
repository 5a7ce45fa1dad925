//! Log-polyhomogeneous matrix symbols Σ_l [ξ]^d log^l[ξ] c_l(ξ), with each
//! c_l homogeneous of degree 0.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fiber::{phi_jet, Covector};

/// A degree-0 homogeneous matrix-valued function of ξ with its first two
/// derivatives.
pub trait DirectionalCoefficient: Send + Sync + std::fmt::Debug {
    /// Side of the square matrices returned.
    fn dim(&self) -> usize;
    fn value(&self, xi: &Covector) -> DMatrix<f64>;
    /// ∂_i of the coefficient, i = 0..n.
    fn grad(&self, xi: &Covector) -> Vec<DMatrix<f64>>;
    /// ∂_i∂_j, row-major in (i, j).
    fn hess(&self, xi: &Covector) -> Vec<DMatrix<f64>>;
}

/// A coefficient that does not depend on ξ.
#[derive(Debug, Clone)]
pub struct Constant(pub DMatrix<f64>);

impl DirectionalCoefficient for Constant {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn value(&self, _: &Covector) -> DMatrix<f64> {
        self.0.clone()
    }

    fn grad(&self, xi: &Covector) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(self.dim(), self.dim()); xi.n()]
    }

    fn hess(&self, xi: &Covector) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(self.dim(), self.dim()); xi.n() * xi.n()]
    }
}

/// `constant + scale·Φ(ξ)` acting on symmetric 2-tensors of Rⁿ.
#[derive(Debug, Clone)]
pub struct PhiAffine {
    pub constant: DMatrix<f64>,
    pub scale: f64,
}

impl PhiAffine {
    pub fn new(constant: DMatrix<f64>, scale: f64) -> Self {
        Self { constant, scale }
    }
}

impl DirectionalCoefficient for PhiAffine {
    fn dim(&self) -> usize {
        self.constant.nrows()
    }

    fn value(&self, xi: &Covector) -> DMatrix<f64> {
        let j = phi_jet(xi).expect("n ≥ 2 checked at construction");
        &self.constant + j.value * self.scale
    }

    fn grad(&self, xi: &Covector) -> Vec<DMatrix<f64>> {
        let j = phi_jet(xi).expect("n ≥ 2 checked at construction");
        j.grad.into_iter().map(|g| g * self.scale).collect()
    }

    fn hess(&self, xi: &Covector) -> Vec<DMatrix<f64>> {
        let j = phi_jet(xi).expect("n ≥ 2 checked at construction");
        j.hess.into_iter().flatten().map(|h| h * self.scale).collect()
    }
}

/// [ξ] = max(|ξ|, 1).
pub fn bracket(r: f64) -> f64 {
    r.max(1.0)
}

/// Σ_l [ξ]^d log^l[ξ] c_l(ξ). At ξ = 0 the coefficients are read in the
/// direction e_1.
#[derive(Debug, Clone)]
pub struct LogHomSymbol {
    n: usize,
    dim: usize,
    degree: f64,
    terms: Vec<(u32, Arc<dyn DirectionalCoefficient>)>,
}

impl LogHomSymbol {
    pub fn new(n: usize, degree: f64, terms: Vec<(u32, Arc<dyn DirectionalCoefficient>)>) -> Result<Self> {
        if n < 1 {
            return Err(Error::Dimension { min: 1, got: n });
        }
        let dim = terms.first().map(|(_, c)| c.dim()).ok_or_else(|| Error::Domain("symbol has no terms".into()))?;
        if let Some((_, c)) = terms.iter().find(|(_, c)| c.dim() != dim) {
            return Err(Error::Mismatch { expected: dim, got: c.dim() });
        }
        Ok(Self { n, dim, degree, terms })
    }

    /// [ξ]^d times a constant matrix.
    pub fn constant(n: usize, degree: f64, m: DMatrix<f64>) -> Self {
        Self::new(n, degree, vec![(0, Arc::new(Constant(m)))]).expect("one term")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> f64 {
        self.degree
    }

    pub fn log_degree(&self) -> u32 {
        self.terms.iter().map(|(l, _)| *l).max().unwrap_or(0)
    }

    pub fn terms(&self) -> &[(u32, Arc<dyn DirectionalCoefficient>)] {
        &self.terms
    }

    /// Multiply every coefficient by c.
    pub fn scaled(&self, c: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(l, t)| (*l, Arc::new(Scaled(c, t.clone())) as Arc<dyn DirectionalCoefficient>))
            .collect();
        Self { terms, ..self.clone() }
    }

    fn direction(&self, xi: &[f64]) -> Result<Covector> {
        if xi.len() != self.n {
            return Err(Error::Mismatch { expected: self.n, got: xi.len() });
        }
        if xi.iter().all(|&x| x == 0.0) {
            let mut e = vec![0.0; self.n];
            e[0] = 1.0;
            return Covector::new(e);
        }
        Covector::new(xi.to_vec())
    }

    /// The l-th coefficient c_l(ξ) (without the radial factor).
    pub fn coefficient(&self, l: u32, xi: &[f64]) -> Result<DMatrix<f64>> {
        let c = self.direction(xi)?;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (_, t) in self.terms.iter().filter(|(k, _)| *k == l) {
            out += t.value(&c);
        }
        Ok(out)
    }

    pub fn eval(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        let c = self.direction(xi)?;
        let r = bracket(c_norm(xi));
        let lr = r.ln();
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for (l, t) in &self.terms {
            out += t.value(&c) * lr.powi(*l as i32);
        }
        Ok(out * r.powf(self.degree))
    }

    /// ∂_i q at |ξ| ≥ 1, where [ξ] = |ξ| is smooth.
    pub fn grad(&self, xi: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let c = self.smooth_point(xi)?;
        let n = self.n;
        let r = c.norm();
        let mut out = vec![DMatrix::zeros(self.dim, self.dim); n];
        for (l, t) in &self.terms {
            let (g, g1, _) = radial(r, self.degree, *l);
            let v = t.value(&c);
            let dv = t.grad(&c);
            for i in 0..n {
                out[i] += &v * (g1 * xi[i] / r) + &dv[i] * g;
            }
        }
        Ok(out)
    }

    /// ∂_i∂_j q at |ξ| ≥ 1, row-major.
    pub fn hess(&self, xi: &[f64]) -> Result<Vec<DMatrix<f64>>> {
        let c = self.smooth_point(xi)?;
        let n = self.n;
        let r = c.norm();
        let mut out = vec![DMatrix::zeros(self.dim, self.dim); n * n];
        for (l, t) in &self.terms {
            let (g, g1, g2) = radial(r, self.degree, *l);
            let v = t.value(&c);
            let dv = t.grad(&c);
            let hv = t.hess(&c);
            for i in 0..n {
                let gi = g1 * xi[i] / r;
                for j in 0..n {
                    let gj = g1 * xi[j] / r;
                    let dij = if i == j { 1.0 } else { 0.0 };
                    let gij = g2 * xi[i] * xi[j] / (r * r) + g1 * (dij / r - xi[i] * xi[j] / (r * r * r));
                    out[i * n + j] += &v * gij + &dv[j] * gi + &dv[i] * gj + &hv[i * n + j] * g;
                }
            }
        }
        Ok(out)
    }

    fn smooth_point(&self, xi: &[f64]) -> Result<Covector> {
        let c = self.direction(xi)?;
        if c_norm(xi) < 1.0 {
            return Err(Error::Domain("derivatives are only taken where |ξ| ≥ 1".into()));
        }
        Ok(c)
    }
}

fn c_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// g(r) = r^d log^l r with g′ and g″.
fn radial(r: f64, d: f64, l: u32) -> (f64, f64, f64) {
    let lr = r.ln();
    let p = |k: i64| if k < 0 { 0.0 } else { lr.powi(k as i32) };
    let l = l as i64;
    let lf = l as f64;
    let g = r.powf(d) * p(l);
    let g1 = r.powf(d - 1.0) * (d * p(l) + lf * p(l - 1));
    let g2 = r.powf(d - 2.0) * (d * (d - 1.0) * p(l) + lf * (2.0 * d - 1.0) * p(l - 1) + lf * (lf - 1.0) * p(l - 2));
    (g, g1, g2)
}

#[derive(Debug)]
struct Scaled(f64, Arc<dyn DirectionalCoefficient>);

impl DirectionalCoefficient for Scaled {
    fn dim(&self) -> usize {
        self.1.dim()
    }

    fn value(&self, xi: &Covector) -> DMatrix<f64> {
        self.1.value(xi) * self.0
    }

    fn grad(&self, xi: &Covector) -> Vec<DMatrix<f64>> {
        self.1.grad(xi).into_iter().map(|m| m * self.0).collect()
    }

    fn hess(&self, xi: &Covector) -> Vec<DMatrix<f64>> {
        self.1.hess(xi).into_iter().map(|m| m * self.0).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::sym_dim;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phi_symbol(n: usize) -> LogHomSymbol {
        let d = sym_dim(n);
        LogHomSymbol::new(
            n,
            n as f64,
            vec![
                (0, Arc::new(PhiAffine::new(DMatrix::identity(d, d), -0.7))),
                (1, Arc::new(PhiAffine::new(DMatrix::zeros(d, d), (n - 1) as f64))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn coefficients_are_degree_zero() {
        let q = phi_symbol(3);
        let xi = [0.3, -1.1, 0.8];
        let base = q.coefficient(1, &xi).unwrap();
        for lam in [1.0, 7.0, 1e3] {
            let x: Vec<f64> = xi.iter().map(|v| v * lam).collect();
            assert!((q.coefficient(1, &x).unwrap() - &base).amax() < 1e-12);
        }
    }

    #[test]
    fn zero_uses_bracket_one() {
        let q = LogHomSymbol::constant(2, 2.0, DMatrix::identity(1, 1));
        assert_eq!(q.eval(&[0.0, 0.0]).unwrap()[(0, 0)], 1.0);
        assert_eq!(q.eval(&[0.0, 3.0]).unwrap()[(0, 0)], 9.0);
        assert!(q.grad(&[0.5, 0.0]).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 3, 4] {
            let q = phi_symbol(n);
            for _ in 0..3 {
                let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(2.0..5.0)).collect();
                let g = q.grad(&xi).unwrap();
                let h = q.hess(&xi).unwrap();
                let eps = 1e-5;
                for i in 0..n {
                    let mut p = xi.clone();
                    let mut m = xi.clone();
                    p[i] += eps;
                    m[i] -= eps;
                    let fd = (q.eval(&p).unwrap() - q.eval(&m).unwrap()) / (2.0 * eps);
                    assert!((&fd - &g[i]).amax() < 1e-6 * fd.amax().max(1.0), "n={n} i={i}");
                    let gp = q.grad(&p).unwrap();
                    let gm = q.grad(&m).unwrap();
                    for j in 0..n {
                        let fd = (&gp[j] - &gm[j]) / (2.0 * eps);
                        assert!((&fd - &h[i * n + j]).amax() < 1e-6 * fd.amax().max(1.0));
                    }
                }
            }
        }
    }
}
