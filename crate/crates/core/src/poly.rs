//! Polynomial scalar and symmetric-tensor fields on Rⁿ.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fiber::SymTensor;

/// Exponent vector of a monomial x^α.
pub type Monomial = Vec<u32>;

/// Real polynomial on Rⁿ as a map from exponent vectors to coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarPoly {
    pub n: usize,
    pub terms: BTreeMap<Monomial, f64>,
}

impl ScalarPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, mono: Monomial, c: f64) {
        if c != 0.0 {
            *self.terms.entry(mono).or_insert(0.0) += c;
        }
    }

    pub fn deriv(&self, a: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, &c) in &self.terms {
            if m[a] > 0 {
                let mut d = m.clone();
                d[a] -= 1;
                out.add_term(d, c * m[a] as f64);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * monomial(m, x)).sum()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }
}

pub fn monomial(m: &[u32], x: &[f64]) -> f64 {
    m.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product()
}

/// A symmetric-tensor field k(x) = Σ_α K_α x^α.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorPoly {
    n: usize,
    terms: Vec<(Monomial, SymTensor)>,
}

impl TensorPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn constant(k: SymTensor) -> Self {
        let n = k.n();
        Self { n, terms: vec![(vec![0; n], k)] }
    }

    /// k(x) = K0 + Σ_a x_a K1[a] + ½ Σ_ab x_a x_b K2[a][b]; K2 is symmetrized in (a, b).
    pub fn quadratic(k0: SymTensor, k1: &[SymTensor], k2: &[Vec<SymTensor>]) -> Result<Self> {
        let n = k0.n();
        let mut p = Self::constant(k0);
        for (a, t) in k1.iter().enumerate() {
            let mut m = vec![0; n];
            m[a] = 1;
            p.add_term(m, t.clone())?;
        }
        for a in 0..k2.len() {
            for b in 0..k2[a].len() {
                let mut m = vec![0; n];
                m[a] += 1;
                m[b] += 1;
                p.add_term(m, k2[a][b].scaled(0.5))?;
            }
        }
        Ok(p)
    }

    pub fn add_term(&mut self, mono: Monomial, k: SymTensor) -> Result<()> {
        if mono.len() != self.n {
            return Err(Error::Mismatch { expected: self.n, got: mono.len() });
        }
        if k.n() != self.n {
            return Err(Error::Mismatch { expected: self.n, got: k.n() });
        }
        self.terms.push((mono, k));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().filter(|(_, k)| k.norm() > 0.0).map(|(m, _)| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> SymTensor {
        self.terms.iter().fold(SymTensor::zeros(self.n), |acc, (m, k)| acc.plus(&k.scaled(monomial(m, x))))
    }

    /// The (i, j) entry as a scalar polynomial.
    pub fn entry(&self, i: usize, j: usize) -> ScalarPoly {
        let mut p = ScalarPoly::zero(self.n);
        for (m, k) in &self.terms {
            p.add_term(m.clone(), k.get(i, j));
        }
        p
    }

    pub fn trace(&self) -> ScalarPoly {
        (0..self.n).fold(ScalarPoly::zero(self.n), |acc, i| acc.plus(&self.entry(i, i)))
    }

    pub fn deriv(&self, a: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, k) in &self.terms {
            if m[a] > 0 {
                let mut d = m.clone();
                d[a] -= 1;
                out.terms.push((d, k.scaled(m[a] as f64)));
            }
        }
        out
    }

    /// ∂_X k at x, for a constant vector X.
    pub fn directional(&self, x: &[f64], dir: &[f64]) -> SymTensor {
        (0..self.n).fold(SymTensor::zeros(self.n), |acc, a| acc.plus(&self.deriv(a).eval(x).scaled(dir[a])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_quadratic_field() {
        let n = 2;
        let k0 = SymTensor::identity(n);
        let k1 = vec![SymTensor::outer(&[1.0, 0.0]), SymTensor::zeros(n)];
        let k2 = vec![vec![SymTensor::zeros(n), SymTensor::outer(&[0.0, 1.0])], vec![SymTensor::outer(&[0.0, 1.0]), SymTensor::zeros(n)]];
        let p = TensorPoly::quadratic(k0, &k1, &k2).unwrap();
        assert_eq!(p.degree(), 2);
        let x = [0.5, 2.0];
        // k_22(x) = 1 + x_1 x_2
        assert!((p.eval(&x).get(1, 1) - 2.0).abs() < 1e-15);
        assert!((p.deriv(0).deriv(1).eval(&x).get(1, 1) - 1.0).abs() < 1e-15);
        assert!((p.entry(0, 0).deriv(0).eval(&x) - 1.0).abs() < 1e-15);
        assert!((p.trace().eval(&x) - 3.5).abs() < 1e-15);
    }
}
