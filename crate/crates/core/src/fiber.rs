//! Symmetric 2-tensors, covector projections and the gauge-breaking
//! projection symbols acting on them.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Real symmetric n×n matrix, the fiber of S²M.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    m: DMatrix<f64>,
}

impl SymTensor {
    pub fn zeros(n: usize) -> Self {
        Self { m: DMatrix::zeros(n, n) }
    }

    pub fn identity(n: usize) -> Self {
        Self { m: DMatrix::identity(n, n) }
    }

    /// Fills the upper triangle from `f` and mirrors it.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self { m }
    }

    /// Accepts a matrix that is symmetric up to rounding and symmetrizes it.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Mismatch { expected: m.nrows(), got: m.ncols() });
        }
        let scale = m.amax().max(1.0);
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Domain(format!("matrix is not symmetric (asymmetry {asym:e})")));
        }
        Ok(Self { m: (&m + m.transpose()) * 0.5 })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Mismatch { expected: n, got: r.len() });
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// a⊗a.
    pub fn outer(a: &[f64]) -> Self {
        let n = a.len();
        Self::from_fn(n, |i, j| a[i] * a[j])
    }

    /// a⊙b = a⊗b + b⊗a.
    pub fn sym_product(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Mismatch { expected: a.len(), got: b.len() });
        }
        Ok(Self::from_fn(a.len(), |i, j| a[i] * b[j] + b[i] * a[j]))
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Frobenius pairing ⟨K, L⟩ = Σ K_ij L_ij.
    pub fn inner(&self, other: &Self) -> f64 {
        self.m.dot(&other.m)
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    /// (k·ξ)_i = Σ_j k_ij ξ_j.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (self.m.clone() * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    /// ξ·k·ξ.
    pub fn quad(&self, v: &[f64]) -> f64 {
        self.apply(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { m: &self.m * c }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { m: &self.m + &other.m }
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self { m: &self.m - &other.m }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::Mismatch { expected: n, got: self.n() });
        }
        Ok(())
    }
}

/// A nonzero covector ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    xi: Vec<f64>,
}

impl Covector {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if xi.iter().all(|x| *x == 0.0) {
            return Err(Error::ZeroCovector);
        }
        Ok(Self { xi })
    }

    pub fn basis(n: usize, i: usize) -> Self {
        Self { xi: crate::clifford::basis(n, i) }
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.xi
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.xi.iter().map(|x| x * c).collect())
    }
}

/// Π_ξ = ξξᵀ/|ξ|².
pub fn proj_par(xi: &Covector) -> DMatrix<f64> {
    let v = DVector::from_column_slice(xi.as_slice());
    &v * v.transpose() / xi.norm_sq()
}

/// Π⊥_ξ = I - ξξᵀ/|ξ|².
pub fn proj_perp(xi: &Covector) -> DMatrix<f64> {
    let n = xi.n();
    DMatrix::identity(n, n) - proj_par(xi)
}

/// Π⊥ K Π⊥, the leading symbol of the projection onto the complement of
/// the diffeomorphism directions.
pub fn diffperp_symbol(xi: &Covector, k: &SymTensor) -> Result<SymTensor> {
    k.check(xi.n())?;
    let p = proj_perp(xi);
    SymTensor::from_matrix(&p * k.matrix() * &p)
}

/// Π⊥KΠ⊥ - tr(Π⊥K) Π⊥/(n-1), additionally removing conformal directions.
pub fn confdiffperp_symbol(xi: &Covector, k: &SymTensor) -> Result<SymTensor> {
    let n = xi.n();
    if n < 2 {
        return Err(Error::Dimension { min: 2, got: n });
    }
    k.check(n)?;
    let p = proj_perp(xi);
    let tr = (&p * k.matrix()).trace();
    SymTensor::from_matrix(&p * k.matrix() * &p - &p * (tr / (n as f64 - 1.0)))
}

/// The projection Φ(ξ) on S²; same action as [`confdiffperp_symbol`].
pub fn phi_projection(xi: &Covector, k: &SymTensor) -> Result<SymTensor> {
    confdiffperp_symbol(xi, k)
}

/// (I + αP)⁻¹ = I - α/(α+1) P for an orthogonal projection P.
pub fn inv_identity_plus_proj(alpha: f64, p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !p.is_square() {
        return Err(Error::Mismatch { expected: p.nrows(), got: p.ncols() });
    }
    if (alpha + 1.0).abs() < 1e-14 {
        return Err(Error::Singular("I + αP with α = -1".into()));
    }
    let idem = (p * p - p).amax();
    if idem > 1e-10 {
        return Err(Error::Domain(format!("P is not a projection (|P²-P| = {idem:e})")));
    }
    let n = p.nrows();
    Ok(DMatrix::identity(n, n) - p * (alpha / (alpha + 1.0)))
}

/// Leading symbol |ξ|²(I + Π_ξ) of div∇⊙ on 1-forms and its parametrix
/// symbol |ξ|⁻²/2 (I + Π⊥_ξ).
pub fn div_gradsym_symbol(xi: &Covector) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = xi.n();
    let r2 = xi.norm_sq();
    let id = DMatrix::identity(n, n);
    let sym = (&id + proj_par(xi)) * r2;
    let par = (&id + proj_perp(xi)) * (0.5 / r2);
    (sym, par)
}

/// Orthonormal basis of S²(Rⁿ) for the Frobenius pairing: E_aa and
/// (E_ab + E_ba)/√2 for a < b, in row-major order of (a, b).
pub fn sym_basis(n: usize) -> Vec<SymTensor> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for a in 0..n {
        for b in a..n {
            let v = if a == b { 1.0 } else { r };
            out.push(SymTensor::from_fn(n, |i, j| if (i, j) == (a, b) { v } else { 0.0 }));
        }
    }
    out
}

pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Coordinates of K in [`sym_basis`].
pub fn to_coords(k: &SymTensor) -> DVector<f64> {
    let n = k.n();
    let r = std::f64::consts::SQRT_2;
    let mut v = Vec::with_capacity(sym_dim(n));
    for a in 0..n {
        for b in a..n {
            v.push(if a == b { k.get(a, a) } else { r * k.get(a, b) });
        }
    }
    DVector::from_vec(v)
}

pub fn from_coords(n: usize, c: &DVector<f64>) -> SymTensor {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(n, n);
    let mut idx = 0;
    for a in 0..n {
        for b in a..n {
            if a == b {
                m[(a, a)] = c[idx];
            } else {
                m[(a, b)] = r * c[idx];
                m[(b, a)] = r * c[idx];
            }
            idx += 1;
        }
    }
    SymTensor { m }
}

/// Matrix of a linear map S² → S² in the orthonormal basis.
pub fn operator_matrix(n: usize, f: impl Fn(&SymTensor) -> SymTensor) -> DMatrix<f64> {
    let basis = sym_basis(n);
    let d = basis.len();
    let mut m = DMatrix::zeros(d, d);
    for (b, e) in basis.iter().enumerate() {
        m.set_column(b, &to_coords(&f(e)));
    }
    m
}

/// Matrix of Φ(ξ) on S² in the orthonormal basis.
pub fn phi_matrix(xi: &Covector) -> DMatrix<f64> {
    let p = proj_perp(xi);
    phi_from_perp(&p)
}

fn phi_from_perp(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    let c = 1.0 / (n as f64 - 1.0);
    operator_matrix(n, |k| {
        let tr = (p * k.matrix()).trace();
        SymTensor { m: p * k.matrix() * p - p * (tr * c) }
    })
}

/// Φ together with its first and second ξ-derivatives, as matrices on S².
#[derive(Debug, Clone)]
pub struct PhiJet {
    pub value: DMatrix<f64>,
    pub grad: Vec<DMatrix<f64>>,
    /// hess[i][j] = ∂_i∂_j Φ.
    pub hess: Vec<Vec<DMatrix<f64>>>,
}

/// Analytic derivatives of Φ(ξ) through P = I - ξξᵀ/|ξ|².
pub fn phi_jet(xi: &Covector) -> Result<PhiJet> {
    let n = xi.n();
    if n < 2 {
        return Err(Error::Dimension { min: 2, got: n });
    }
    let u = DVector::from_column_slice(xi.as_slice());
    let r2 = xi.norm_sq();
    let r4 = r2 * r2;
    let uu = &u * u.transpose();
    let e = |i: usize| DVector::from_fn(n, |a, _| if a == i { 1.0 } else { 0.0 });
    let sym = |a: &DVector<f64>, b: &DVector<f64>| a * b.transpose() + b * a.transpose();
    let p = DMatrix::identity(n, n) - &uu / r2;
    // ∂_i P = -∂_i Q with Q = uuᵀ/r².
    let dp: Vec<DMatrix<f64>> = (0..n).map(|i| -(sym(&e(i), &u) / r2 - &uu * (2.0 * u[i] / r4))).collect();
    let ddp: Vec<Vec<DMatrix<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut q = sym(&e(i), &e(j)) / r2;
                    q -= sym(&e(i), &u) * (2.0 * u[j] / r4);
                    q -= sym(&e(j), &u) * (2.0 * u[i] / r4);
                    if i == j {
                        q -= &uu * (2.0 / r4);
                    }
                    q += &uu * (8.0 * u[i] * u[j] / (r4 * r2));
                    -q
                })
                .collect()
        })
        .collect();
    let c = 1.0 / (n as f64 - 1.0);
    // Φ(K) = PKP - c tr(PK) P is a quadratic form in P; polarize it.
    let bil = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        operator_matrix(n, |k| {
            let km = k.matrix();
            let m = a * km * b + b * km * a - (b * (a * km).trace() + a * (b * km).trace()) * c;
            SymTensor { m: m * 0.5 }
        })
    };
    let value = phi_from_perp(&p);
    let grad: Vec<DMatrix<f64>> = dp.iter().map(|d| bil(d, &p) * 2.0).collect();
    let hess = (0..n)
        .map(|i| (0..n).map(|j| (bil(&ddp[i][j], &p) + bil(&dp[i], &dp[j])) * 2.0).collect())
        .collect();
    Ok(PhiJet { value, grad, hess })
}
