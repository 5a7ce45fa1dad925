//! From the Hessian of the modified zeta function to the Hessian of ζ′(0):
//! harmonic constants η_j, the Γ-factor coefficients, leading symbols and
//! their positivity.

pub mod hypo;
pub mod symbol;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fiber::{diffperp_symbol, phi_matrix, phi_projection, sym_dim, Covector, SymTensor};
use crate::oracle::contour_derivative;
use crate::special::{gamma, recip_gamma};
use symbol::{Constant, LogHomSymbol, PhiAffine};

pub use hypo::{hypoellipticity_check, projection_inverse_decay, symbol_sqrt, HypoConfig, HypoReport, XiGrid};

/// η_j = 2 Σ_{i ≤ 2j+1} 1/i − Σ_{i ≤ j} 1/i, exactly.
pub fn eta(j: usize) -> Result<BigRational> {
    if j < 1 {
        return Err(Error::Domain("η_j needs j ≥ 1".into()));
    }
    let h = |m: usize| (1..=m).fold(BigRational::zero(), |acc, i| acc + BigRational::new(BigInt::one(), BigInt::from(i)));
    Ok(h(2 * j + 1) * BigInt::from(2) - h(j))
}

pub fn eta_f64(j: usize) -> Result<f64> {
    Ok(eta(j)?.to_f64().expect("finite rational"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

pub fn parity(n: usize) -> Parity {
    if n % 2 == 1 {
        Parity::Odd
    } else {
        Parity::Even
    }
}

/// The constant relating Hess ζ′(0) to W(s) = Hess Z(s)·Γ(2-2S)/Γ(1-S)².
/// Odd n = 2k+1: Hess ζ′(0) = constant · W(0). Even n = 2k:
/// Hess ζ′(0) = constant · (W′(0) + η_k W(0)).
#[derive(Debug, Clone, PartialEq)]
pub struct GammaLemma {
    pub n: usize,
    pub k: usize,
    pub parity: Parity,
    pub constant: f64,
    pub eta: Option<f64>,
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

pub fn gammalemma_coeff(n: usize) -> Result<GammaLemma> {
    if n < 2 {
        return Err(Error::Dimension { min: 2, got: n });
    }
    let k = n / 2;
    Ok(match parity(n) {
        Parity::Odd => {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            let constant = sign * PI.powf(1.5) / (2f64.powi(2 * k as i32 + 2) * factorial(k + 1));
            GammaLemma { n, k, parity: Parity::Odd, constant, eta: None }
        }
        Parity::Even => {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let constant = sign * factorial(k) / factorial(2 * k + 1);
            GammaLemma { n, k, parity: Parity::Even, constant, eta: Some(eta_f64(k)?) }
        }
    })
}

/// F(s) = Γ(S)Γ(1-S)²/(Γ(s)Γ(2-2S)), the factor carrying the s-dependence
/// of the modified-zeta Hessian that is not in W. Evaluated away from its
/// removable singularity at s = 0.
pub fn gamma_factor(n: usize, s: Complex64) -> Result<Complex64> {
    let sc = s - n as f64 / 2.0;
    let g = gamma(1.0 - sc)?;
    Ok(gamma(sc)? * g * g * recip_gamma(s) / gamma(2.0 - 2.0 * sc)?)
}

/// (F(0), F′(0)) by contour integration around s = 0.
pub fn gamma_factor_jet(n: usize) -> Result<(f64, f64)> {
    let f = |s| gamma_factor(n, s);
    let z = Complex64::new(0.0, 0.0);
    let f0 = contour_derivative(f, z, 0, 0.25, 64)?;
    let f1 = contour_derivative(f, z, 1, 0.25, 64)?;
    Ok((f0.re, f1.re))
}

/// The lemma's constant recomputed from [`gamma_factor_jet`]: F′(0) for odd
/// n; F(0) and F′(0)/F(0) for even n.
pub fn gammalemma_oracle(n: usize) -> Result<GammaLemma> {
    let (f0, f1) = gamma_factor_jet(n)?;
    let k = n / 2;
    Ok(match parity(n) {
        Parity::Odd => GammaLemma { n, k, parity: Parity::Odd, constant: f1, eta: None },
        Parity::Even => GammaLemma { n, k, parity: Parity::Even, constant: f0, eta: Some(f1 / f0) },
    })
}

/// Coefficient T in the leading symbol of Hess ζ′(0):
/// odd n = 2j+1: T|ξ|^n ΦK; even n = 2j: T|ξ|^n[Π⊥KΠ⊥ + (n-1)(log|ξ| - η_j/2)ΦK].
pub fn leading_constant(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Dimension { min: 2, got: n });
    }
    let j = n / 2;
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    Ok(match parity(n) {
        Parity::Odd => sign * j as f64 / (2f64.powi(3 * j as i32 + 4) * PI.powi(j as i32 - 1) * factorial(j + 1)),
        Parity::Even => sign * factorial(j) / (2.0 * (2.0 * PI).powi(j as i32) * factorial(2 * j + 1)),
    })
}

/// Leading constant composed from the Γ-factor lemma and the closed-form
/// prefactor (4π)^{-n/2} dim_e/4.
pub fn composed_leading_constant(n: usize) -> Result<f64> {
    let lemma = gammalemma_coeff(n)?;
    let c = (4.0 * PI).powf(-(n as f64) / 2.0) * (1usize << (n / 2)) as f64 / 4.0;
    Ok(match lemma.parity {
        Parity::Odd => -(n as f64 - 1.0) * c * lemma.constant,
        Parity::Even => 2.0 * c * lemma.constant,
    })
}

/// A symbol value Σ_l log^l|ξ| · coeffs[l]; each coefficient already carries |ξ|^n.
#[derive(Debug, Clone, PartialEq)]
pub struct LogExpansion {
    pub log_xi: f64,
    pub coeffs: Vec<SymTensor>,
}

impl LogExpansion {
    pub fn value(&self) -> SymTensor {
        self.coeffs
            .iter()
            .enumerate()
            .fold(SymTensor::zeros(self.coeffs[0].n()), |acc, (l, c)| acc.plus(&c.scaled(self.log_xi.powi(l as i32))))
    }

    pub fn log_degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

fn check_leading(n: usize, xi: &Covector, k: &SymTensor) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension { min: 2, got: n });
    }
    if xi.n() != n || k.n() != n {
        return Err(Error::Mismatch { expected: n, got: if xi.n() != n { xi.n() } else { k.n() } });
    }
    if xi.norm() < 1.0 {
        return Err(Error::Domain("leading symbols are evaluated for |ξ| ≥ 1".into()));
    }
    Ok(())
}

/// Leading symbol of Hess ζ′(0) applied to K.
pub fn hess_zeta_prime_leading(n: usize, xi: &Covector, k: &SymTensor) -> Result<LogExpansion> {
    check_leading(n, xi, k)?;
    let r = xi.norm();
    let t = leading_constant(n)? * r.powi(n as i32);
    let phi_k = phi_projection(xi, k)?;
    let coeffs = match parity(n) {
        Parity::Odd => vec![phi_k.scaled(t)],
        Parity::Even => {
            let eta = eta_f64(n / 2)?;
            let nm1 = n as f64 - 1.0;
            let base = diffperp_symbol(xi, k)?.minus(&phi_k.scaled(nm1 * eta / 2.0));
            vec![base.scaled(t), phi_k.scaled(nm1 * t)]
        }
    };
    Ok(LogExpansion { log_xi: r.ln(), coeffs })
}

/// Principal symbol of the factor H: C(n)|ξ|^n K for odd n and
/// C(n)|ξ|^n[K + (n-1)(log|ξ| - η_j/2)ΦK] for even n, with C(n) = |T|.
pub fn h_leading(n: usize, xi: &Covector, k: &SymTensor) -> Result<SymTensor> {
    check_leading(n, xi, k)?;
    let c = leading_constant(n)?.abs() * xi.norm().powi(n as i32);
    Ok(match parity(n) {
        Parity::Odd => k.scaled(c),
        Parity::Even => {
            let a = (n as f64 - 1.0) * (xi.norm().ln() - eta_f64(n / 2)? / 2.0);
            k.plus(&phi_projection(xi, k)?.scaled(a)).scaled(c)
        }
    })
}

/// max-entry gap between the leading symbol and (-1)^j P∘h∘P K, with P = Φ
/// for odd n and P = K ↦ Π⊥KΠ⊥ for even n.
/// Max-entry residual of the factorization, relative to the larger side.
pub fn factorization_residual(n: usize, xi: &Covector, k: &SymTensor) -> Result<f64> {
    let lhs = hess_zeta_prime_leading(n, xi, k)?.value();
    let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let proj = |t: &SymTensor| match parity(n) {
        Parity::Odd => phi_projection(xi, t),
        Parity::Even => diffperp_symbol(xi, t),
    };
    let rhs = proj(&h_leading(n, xi, &proj(k)?)?)?.scaled(sign);
    let scale = lhs.matrix().amax().max(rhs.matrix().amax());
    let diff = lhs.minus(&rhs).matrix().amax();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// R = exp(η_j/2 - 1/(n-1)); above it I + (n-1)(log|ξ| - η_j/2)Φ is positive.
pub fn positivity_radius(n: usize) -> Result<f64> {
    if parity(n) != Parity::Even || n < 2 {
        return Err(Error::Domain(format!("positivity radius is defined for even n, got {n}")));
    }
    Ok((eta_f64(n / 2)? / 2.0 - 1.0 / (n as f64 - 1.0)).exp())
}

/// I + (n-1)(log|ξ| - η_j/2)Φ(ξ) as a matrix on S²(Rⁿ).
pub fn normalized_bracket(n: usize, xi: &Covector) -> Result<DMatrix<f64>> {
    let a = (n as f64 - 1.0) * (xi.norm().ln() - eta_f64(n / 2)? / 2.0);
    let d = sym_dim(n);
    Ok(DMatrix::identity(d, d) + phi_matrix(xi) * a)
}

/// The normalized even-n symbol I + (n-1)(log[ξ] - η_j/2)Φ as a LogHomSymbol of degree 0.
pub fn normalized_symbol(n: usize) -> Result<LogHomSymbol> {
    if parity(n) != Parity::Even {
        return Err(Error::Domain(format!("normalized symbol is for even n, got {n}")));
    }
    let d = sym_dim(n);
    let nm1 = n as f64 - 1.0;
    let eta = eta_f64(n / 2)?;
    LogHomSymbol::new(
        n,
        0.0,
        vec![
            (0, Arc::new(PhiAffine::new(DMatrix::identity(d, d), -nm1 * eta / 2.0))),
            (1, Arc::new(PhiAffine::new(DMatrix::zeros(d, d), nm1))),
        ],
    )
}

/// The principal symbol of H as an operator on S²(Rⁿ), degree n.
pub fn h_symbol(n: usize) -> Result<LogHomSymbol> {
    let c = leading_constant(n)?.abs();
    match parity(n) {
        Parity::Odd => Ok(LogHomSymbol::constant(n, n as f64, DMatrix::identity(sym_dim(n), sym_dim(n)) * c)),
        Parity::Even => {
            let q = normalized_symbol(n)?.scaled(c);
            LogHomSymbol::new(n, n as f64, q.terms().to_vec())
        }
    }
}

/// log|ξ|·Φ with no identity part, a symbol with a kernel.
pub fn singular_phi_symbol(n: usize) -> Result<LogHomSymbol> {
    let d = sym_dim(n);
    LogHomSymbol::new(n, 0.0, vec![(1, Arc::new(PhiAffine::new(DMatrix::zeros(d, d), 1.0)))])
}

/// |ξ|^d I on a block of the given size.
pub fn scalar_symbol(n: usize, d: f64, block: usize) -> LogHomSymbol {
    LogHomSymbol::new(n, d, vec![(0, Arc::new(Constant(DMatrix::identity(block, block))))]).expect("one term")
}
