//! Zeta function and determinant of D² on the round n-sphere.
//!
//! Spectrum model: eigenvalues (n/2 + k)², k ≥ 0, with multiplicity
//! 2·2^{⌊n/2⌋}·C(k+n-1, k) counting both signs of the Dirac eigenvalue.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::special::hurwitz_zeta;

/// Distance from a pole at which the continuation refuses to evaluate.
pub const POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereSpectrum {
    pub n: usize,
    /// (eigenvalue of D², multiplicity) for k = 0..=k_max.
    pub entries: Vec<(f64, f64)>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension { min: 2, got: n });
    }
    Ok(())
}

fn spinor_factor(n: usize) -> f64 {
    2.0 * (1u64 << (n / 2)) as f64
}

/// 2·2^{⌊n/2⌋}·C(k+n-1, n-1).
pub fn multiplicity(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 1..n {
        b = b * (k + i) as f64 / i as f64;
    }
    spinor_factor(n) * b
}

pub fn dirac_sq_spectrum(n: usize, k_max: usize) -> Result<SphereSpectrum> {
    check_n(n)?;
    let h = n as f64 / 2.0;
    let entries = (0..=k_max).map(|k| ((h + k as f64).powi(2), multiplicity(n, k))).collect();
    Ok(SphereSpectrum { n, entries })
}

impl SphereSpectrum {
    /// Least-squares exponent of the counting function N(λ) ~ cλ^p over the
    /// upper half of the spectrum.
    pub fn weyl_exponent(&self) -> f64 {
        let mut total = 0.0;
        let pts: Vec<(f64, f64)> = self
            .entries
            .iter()
            .map(|&(l, m)| {
                total += m;
                (l.ln(), total.ln())
            })
            .collect();
        crate::stability::hypo::fit_slope(&pts[pts.len() / 2..])
    }
}

/// Multiplicity as a polynomial in x = k + n/2: coefficients c_0..c_{n-1}.
pub fn multiplicity_poly(n: usize) -> Result<Vec<BigRational>> {
    check_n(n)?;
    let half = BigRational::new(BigInt::from(n), BigInt::from(2));
    // Π_{i=1}^{n-1} (x - n/2 + i)
    let mut p = vec![BigRational::one()];
    for i in 1..n {
        let root = BigRational::from_integer(BigInt::from(i)) - &half;
        let mut q = vec![BigRational::zero(); p.len() + 1];
        for (d, c) in p.iter().enumerate() {
            q[d + 1] += c;
            q[d] += c * &root;
        }
        p = q;
    }
    let fact: BigInt = (1..n).map(BigInt::from).product();
    let scale = BigRational::new(BigInt::from(2u64 << (n / 2)), fact);
    Ok(p.into_iter().map(|c| c * &scale).collect())
}

fn poly_f64(n: usize) -> Result<Vec<f64>> {
    Ok(multiplicity_poly(n)?.iter().map(|c| c.to_f64().expect("finite")).collect())
}

/// Direct partial sum with an integral tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSum {
    pub value: Complex64,
    /// Bound on |value - ζ(s)|.
    pub tail_bound: f64,
    pub k_max: usize,
}

fn cpow(x: f64, w: Complex64) -> Complex64 {
    (w * x.ln()).exp()
}

/// Σ_{k ≤ k_max} m(k) λ_k^{-s} plus the midpoint integral of the rest,
/// for Re 2s > n.
pub fn zeta_direct(n: usize, s: Complex64, k_max: usize) -> Result<DirectSum> {
    check_n(n)?;
    let sigma = s.re;
    if 2.0 * sigma <= n as f64 {
        return Err(Error::Domain(format!("direct sum diverges for Re 2s = {} ≤ n = {n}", 2.0 * sigma)));
    }
    let h = n as f64 / 2.0;
    let mut value = Complex64::new(0.0, 0.0);
    // Summed smallest first.
    for k in (0..=k_max).rev() {
        value += multiplicity(n, k) * cpow(h + k as f64, -2.0 * s);
    }
    // Tail Σ_{k > K} f(k), f(k) = Σ_j c_j x^{j-2s}, by ∫_{X}^∞ f with X = K + 1/2 + n/2.
    let c = poly_f64(n)?;
    let x = k_max as f64 + 0.5 + h;
    let mut bound = 0.0;
    for (j, cj) in c.iter().enumerate() {
        let e = j as f64 - 2.0 * s; // exponent
        value += cj * cpow(x, e + 1.0) / (-(e + 1.0));
        // Midpoint rule: per-cell error ≤ max|f″|/24; summed against ∫ |f″|.
        let er = j as f64 - 2.0 * sigma;
        let d2 = (e * (e - 1.0)).norm();
        bound += cj.abs() * d2 * (x - 1.0).powf(er - 1.0) / (1.0 - er) / 24.0;
    }
    Ok(DirectSum { value, tail_bound: bound, k_max })
}

/// Poles of the continuation: s = (j+1)/2 for each nonzero coefficient c_j.
pub fn poles(n: usize) -> Result<Vec<f64>> {
    Ok(multiplicity_poly(n)?.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, _)| (j as f64 + 1.0) / 2.0).collect())
}

/// Residue at s = (j+1)/2, equal to c_j/2.
pub fn residue(n: usize, pole: f64) -> Result<f64> {
    let j = (2.0 * pole - 1.0).round();
    if (2.0 * pole - 1.0 - j).abs() > 1e-12 || j < 0.0 || j as usize >= n {
        return Ok(0.0);
    }
    Ok(multiplicity_poly(n)?[j as usize].to_f64().expect("finite") / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Continued {
    pub value: Complex64,
    pub derivative: Complex64,
}

/// ζ(s) = Σ_j c_j ζ_H(2s - j, n/2) and its s-derivative.
pub fn zeta_continued_with_derivative(n: usize, s: Complex64) -> Result<Continued> {
    check_n(n)?;
    if let Some(p) = poles(n)?.into_iter().find(|&p| (s - p).norm() < POLE_GUARD) {
        return Err(Error::Pole { what: "sphere zeta", at: format!("s = {p}") });
    }
    let a = n as f64 / 2.0;
    let mut value = Complex64::new(0.0, 0.0);
    let mut derivative = Complex64::new(0.0, 0.0);
    for (j, cj) in poly_f64(n)?.iter().enumerate() {
        if *cj == 0.0 {
            continue;
        }
        let z = hurwitz_zeta(2.0 * s - j as f64, a)?;
        value += cj * z.value;
        derivative += 2.0 * cj * z.derivative;
    }
    Ok(Continued { value, derivative })
}

pub fn zeta_continued(n: usize, s: Complex64) -> Result<Complex64> {
    Ok(zeta_continued_with_derivative(n, s)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Continued,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaResult {
    pub n: usize,
    pub zeta_at_0: f64,
    pub zeta_prime_at_0: f64,
    /// -ζ′(0).
    pub log_det: f64,
    pub det: f64,
    pub method: Method,
}

pub fn det_dirac_sq(n: usize) -> Result<ZetaResult> {
    let z = zeta_continued_with_derivative(n, Complex64::new(0.0, 0.0))?;
    let zp = z.derivative.re;
    Ok(ZetaResult { n, zeta_at_0: z.value.re, zeta_prime_at_0: zp, log_det: -zp, det: (-zp).exp(), method: Method::Continued })
}

/// (-1)^{⌊(n-1)/2⌋}.
pub fn expected_logdet_sign(n: usize) -> i32 {
    if ((n - 1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremalType {
    LocalMax,
    LocalMin,
}

impl ExtremalType {
    /// Local max when ⌊n/2⌋ is even, i.e. n ≡ 0, 1 mod 4.
    pub fn for_dimension(n: usize) -> Self {
        if (n / 2) % 2 == 0 {
            Self::LocalMax
        } else {
            Self::LocalMin
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::LocalMax => "local max",
            Self::LocalMin => "local min",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternRow {
    pub n: usize,
    pub extremal_type: ExtremalType,
    pub sign_logdet: i32,
    pub log_det: f64,
    pub det: f64,
}

/// One row per n = 2..=n_max.
pub fn pattern_table(n_max: usize, exec: Exec) -> Result<Vec<PatternRow>> {
    if n_max < 4 {
        return Err(Error::Domain(format!("n_max must be at least 4, got {n_max}")));
    }
    let rows = exec::map_range(exec, n_max - 1, |i| {
        let n = i + 2;
        let d = det_dirac_sq(n)?;
        Ok(PatternRow {
            n,
            extremal_type: ExtremalType::for_dimension(n),
            sign_logdet: if d.log_det >= 0.0 { 1 } else { -1 },
            log_det: d.log_det,
            det: d.det,
        })
    });
    rows.into_iter().collect()
}

/// Result of the |log det| trend check over a range of n.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTrend {
    pub values: Vec<(usize, f64)>,
    /// Every step n → n+1 decreases.
    pub strictly_monotone: bool,
    /// Every step n → n+2 decreases.
    pub same_parity_monotone: bool,
    /// Slope of log|log det| against n.
    pub log_slope: f64,
}

impl DecayTrend {
    pub fn trend_pass(&self) -> bool {
        self.same_parity_monotone && self.log_slope < 0.0
    }
}

pub fn logdet_decay(n_lo: usize, n_hi: usize, exec: Exec) -> Result<DecayTrend> {
    let vals: Vec<Result<(usize, f64)>> = exec::map_range(exec, n_hi + 1 - n_lo, |i| {
        let n = n_lo + i;
        Ok((n, det_dirac_sq(n)?.log_det.abs()))
    });
    let values: Vec<(usize, f64)> = vals.into_iter().collect::<Result<_>>()?;
    let strictly_monotone = values.windows(2).all(|w| w[1].1 < w[0].1);
    let same_parity_monotone = values.windows(3).all(|w| w[2].1 < w[0].1);
    let pts: Vec<(f64, f64)> = values.iter().map(|&(n, v)| (n as f64, v.ln())).collect();
    Ok(DecayTrend { log_slope: crate::stability::hypo::fit_slope(&pts), values, strictly_monotone, same_parity_monotone })
}
