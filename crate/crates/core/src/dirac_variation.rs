//! First variation of the Dirac operator in a metric direction k.
//!
//! On flat Rⁿ the variation of D² is a second-order operator
//!
//! ```text
//! (D²)' = Σ D^{ij}_{kl} k_ij ∂_k∂_l + Σ A^{ij}_{kl} (∂_k k_ij) ∂_l + Σ B^{ij}_{kl} (∂_k∂_l k_ij)
//! ```
//!
//! with Clifford-valued coefficients. This module builds those coefficients,
//! the symbols obtained by replacing each ∂ with ξ, an operator-level oracle
//! working on plane waves, and the constant-metric isospectrality check on
//! flat tori.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::clifford::{CMatrix, GammaRep};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::fiber::{Covector, SymTensor};
use crate::linalg;
use crate::poly::{Monomial, ScalarPoly, TensorPoly};
use crate::spectral_model::SpectrumReport;

pub type CVector = DVector<Complex64>;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const IM: Complex64 = Complex64::new(0.0, 1.0);

/// The coefficient endomorphisms D, A, B indexed by (i, j, k, l).
#[derive(Debug, Clone)]
pub struct CoeffTensor {
    n: usize,
    dim_e: usize,
    d: Vec<CMatrix>,
    a: Vec<CMatrix>,
    b: Vec<CMatrix>,
}

impl CoeffTensor {
    pub fn new(rep: &GammaRep) -> Self {
        let n = rep.n();
        let e = rep.dim_e();
        let id = rep.identity();
        let zero = CMatrix::zeros(e, e);
        let g = rep.gammas();
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let mut d = Vec::with_capacity(n.pow(4));
        let mut a = Vec::with_capacity(n.pow(4));
        let mut b = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        d.push(if i == k && j == l { id.clone() } else { zero.clone() });
                        // A = -½(δ_kl δ_ij I - δ_jl δ_ik I + δ_jl γ_k γ_i)
                        let mut am = &id * re(delta(k, l) * delta(i, j) - delta(j, l) * delta(i, k));
                        if j == l {
                            am += &g[k] * &g[i];
                        }
                        a.push(am * re(-0.5));
                        // B = ¼(δ_ij γ_l γ_k - δ_ik γ_l γ_j)
                        let mut bm = zero.clone();
                        if i == j {
                            bm += &g[l] * &g[k];
                        }
                        if i == k {
                            bm -= &g[l] * &g[j];
                        }
                        b.push(bm * re(0.25));
                    }
                }
            }
        }
        Self { n, dim_e: e, d, a, b }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn d(&self, i: usize, j: usize, k: usize, l: usize) -> &CMatrix {
        &self.d[self.idx(i, j, k, l)]
    }

    pub fn a(&self, i: usize, j: usize, k: usize, l: usize) -> &CMatrix {
        &self.a[self.idx(i, j, k, l)]
    }

    pub fn b(&self, i: usize, j: usize, k: usize, l: usize) -> &CMatrix {
        &self.b[self.idx(i, j, k, l)]
    }

    pub fn family(&self, f: Family) -> &[CMatrix] {
        match f {
            Family::D => &self.d,
            Family::A => &self.a,
            Family::B => &self.b,
        }
    }

    /// X_kl = Σ_ij k_ij X^{ij}_{kl} for one family, as an n×n grid (row-major).
    pub fn contract_k(&self, f: Family, k: &SymTensor) -> Vec<CMatrix> {
        let n = self.n;
        let src = self.family(f);
        let mut out = vec![CMatrix::zeros(self.dim_e, self.dim_e); n * n];
        for i in 0..n {
            for j in 0..n {
                let kij = k.get(i, j);
                if kij == 0.0 {
                    continue;
                }
                for kl in 0..n * n {
                    out[kl] += &src[(i * n + j) * n * n + kl] * re(kij);
                }
            }
        }
        out
    }

    /// Σ X^{ij}_{kl} ξ_k ξ_l k_ij for each family: the σ's assembled from the
    /// coefficient data rather than from the closed forms.
    pub fn assemble_symbols(&self, k: &SymTensor, xi: &Covector) -> Result<[CMatrix; 3]> {
        check_dims(self.n, k, xi)?;
        let x = xi.as_slice();
        let n = self.n;
        let out = [Family::D, Family::A, Family::B].map(|f| {
            let c = self.contract_k(f, k);
            let mut m = CMatrix::zeros(self.dim_e, self.dim_e);
            for a in 0..n {
                for b in 0..n {
                    m += &c[a * n + b] * re(x[a] * x[b]);
                }
            }
            m
        });
        Ok(out)
    }
}

/// The three coefficient families, by the derivative pattern they carry:
/// D with both derivatives on the spinor, A with one on k and one on the
/// spinor, B with both on k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    D,
    A,
    B,
}

fn check_dims(n: usize, k: &SymTensor, xi: &Covector) -> Result<()> {
    if k.n() != n {
        return Err(Error::Mismatch { expected: n, got: k.n() });
    }
    if xi.n() != n {
        return Err(Error::Mismatch { expected: n, got: xi.n() });
    }
    Ok(())
}

/// Symbols of the variation with every ∂ replaced by ξ.
#[derive(Debug, Clone)]
pub struct SigmaSymbols {
    pub sigma2: f64,
    pub sigma1: CMatrix,
    pub sigma0: CMatrix,
    /// σ1_components[k*n + l] = σ^{(1)}_{kl}.
    pub sigma1_components: Vec<CMatrix>,
}

/// Closed forms:
/// σ2 = ξ·k·ξ,
/// σ1 = -½((tr k)|ξ|² - ξ·k·ξ + ξ(k·ξ)),
/// σ0 = ¼((tr k) ξξ - ξ(k·ξ)),
/// with ξ(k·ξ) and ξξ Clifford products (so ξξ = -|ξ|²).
pub fn sigma_symbols(rep: &GammaRep, k: &SymTensor, xi: &Covector) -> Result<SigmaSymbols> {
    let n = rep.n();
    check_dims(n, k, xi)?;
    let x = xi.as_slice();
    let kx = k.apply(x);
    let tr = k.trace();
    let xkx = k.quad(x);
    let id = rep.identity();
    let cx = rep.clifford_vector(x)?;
    let ckx = rep.clifford_vector(&kx)?;
    let x_kx = &cx * &ckx;
    let sigma1 = (&id * re(tr * xi.norm_sq() - xkx) + &x_kx) * re(-0.5);
    let sigma0 = ((&cx * &cx) * re(tr) - &x_kx) * re(0.25);
    let g = rep.gammas();
    let mut comps = Vec::with_capacity(n * n);
    for a in 0..n {
        // Σ_i e_i k_il for each l
        for l in 0..n {
            let col: Vec<f64> = (0..n).map(|i| k.get(i, l)).collect();
            let m = &g[a] * rep.clifford_vector(&col)?;
            let delta = if a == l { tr } else { 0.0 };
            comps.push((&id * re(delta - k.get(a, l)) + m) * re(-0.5));
        }
    }
    Ok(SigmaSymbols { sigma2: xkx, sigma1, sigma0, sigma1_components: comps })
}

/// Restricts the oracle to a flat background.
#[derive(Debug, Clone)]
pub enum Background {
    Flat,
    /// Any other ground metric; only the constant identity is accepted.
    Metric(TensorPoly),
}

/// (D²)'ψ at x = 0 by the two routes.
#[derive(Debug, Clone)]
pub struct FlatVariation {
    /// D'D + DD' applied to the plane wave by polynomial calculus.
    pub operator_route: CVector,
    /// The D/A/B expansion with ∂ → iξ on the plane wave.
    pub coefficient_route: CVector,
}

impl FlatVariation {
    pub fn deviation(&self) -> f64 {
        (&self.operator_route - &self.coefficient_route).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Spinor field Σ_α u_α x^α · e^{i x·ξ}, stored by its polynomial part.
#[derive(Debug, Clone)]
struct PlaneWaveField {
    xi: Vec<f64>,
    terms: BTreeMap<Monomial, CVector>,
    dim: usize,
}

impl PlaneWaveField {
    fn constant(xi: &[f64], u: &CVector) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; xi.len()], u.clone());
        Self { xi: xi.to_vec(), terms, dim: u.len() }
    }

    fn empty(&self) -> Self {
        Self { xi: self.xi.clone(), terms: BTreeMap::new(), dim: self.dim }
    }

    fn add(&mut self, m: Monomial, v: CVector) {
        match self.terms.get_mut(&m) {
            Some(t) => *t += v,
            None => {
                self.terms.insert(m, v);
            }
        }
    }

    fn plus(mut self, other: &Self) -> Self {
        for (m, v) in &other.terms {
            self.add(m.clone(), v.clone());
        }
        self
    }

    /// ∂_a (P e^{ixξ}) = (∂_a P + iξ_a P) e^{ixξ}.
    fn deriv(&self, a: usize) -> Self {
        let mut out = self.empty();
        for (m, v) in &self.terms {
            if m[a] > 0 {
                let mut d = m.clone();
                d[a] -= 1;
                out.add(d, v * re(m[a] as f64));
            }
            out.add(m.clone(), v * (IM * self.xi[a]));
        }
        out
    }

    fn times_poly(&self, p: &ScalarPoly) -> Self {
        let mut out = self.empty();
        for (m, v) in &self.terms {
            for (pm, &c) in &p.terms {
                let prod: Monomial = m.iter().zip(pm).map(|(a, b)| a + b).collect();
                out.add(prod, v * re(c));
            }
        }
        out
    }

    fn times_matrix(&self, g: &CMatrix) -> Self {
        let mut out = self.empty();
        for (m, v) in &self.terms {
            out.add(m.clone(), g * v);
        }
        out
    }

    fn at_origin(&self) -> CVector {
        let zero = vec![0; self.xi.len()];
        self.terms.get(&zero).cloned().unwrap_or_else(|| CVector::zeros(self.dim))
    }
}

/// Dψ = Σ_j e_j ∂_j ψ.
fn apply_dirac(rep: &GammaRep, f: &PlaneWaveField) -> PlaneWaveField {
    (0..rep.n()).fold(f.empty(), |acc, j| acc.plus(&f.deriv(j).times_matrix(rep.gamma(j))))
}

/// D'ψ = -½ Σ_il k_il e_i ∂_l ψ + ¼ Σ_j (∂_j tr k - Σ_i ∂_i k_ij) e_j ψ.
fn apply_dirac_variation(rep: &GammaRep, k: &TensorPoly, f: &PlaneWaveField) -> PlaneWaveField {
    let n = rep.n();
    let mut out = f.empty();
    for l in 0..n {
        let dl = f.deriv(l);
        for i in 0..n {
            let kil = k.entry(i, l).scaled(-0.5);
            out = out.plus(&dl.times_poly(&kil).times_matrix(rep.gamma(i)));
        }
    }
    let tr = k.trace();
    for j in 0..n {
        let mut v = tr.deriv(j);
        for i in 0..n {
            v = v.plus(&k.entry(i, j).deriv(i).scaled(-1.0));
        }
        out = out.plus(&f.times_poly(&v.scaled(0.25)).times_matrix(rep.gamma(j)));
    }
    out
}

/// Computes (D²)'ψ at the origin for ψ = u e^{ix·ξ} by the operator formula
/// and by the coefficient expansion.
pub fn flat_variation_oracle(
    rep: &GammaRep,
    coeffs: &CoeffTensor,
    k_poly: &TensorPoly,
    background: &Background,
    xi: &Covector,
    spinor: &CVector,
) -> Result<FlatVariation> {
    let n = rep.n();
    if let Background::Metric(g) = background {
        let id = TensorPoly::constant(SymTensor::identity(g.n()));
        if g.degree() > 0 || g.eval(&vec![0.0; g.n()]) != id.eval(&vec![0.0; g.n()]) {
            return Err(Error::Unsupported("the plane-wave oracle needs the flat identity metric".into()));
        }
    }
    if k_poly.degree() > 2 {
        return Err(Error::Domain(format!("k has degree {} > 2", k_poly.degree())));
    }
    if k_poly.n() != n || xi.n() != n {
        return Err(Error::Mismatch { expected: n, got: k_poly.n().max(xi.n()) });
    }
    if spinor.len() != rep.dim_e() {
        return Err(Error::Mismatch { expected: rep.dim_e(), got: spinor.len() });
    }
    if coeffs.n() != n {
        return Err(Error::Mismatch { expected: n, got: coeffs.n() });
    }
    let x = xi.as_slice();
    let psi = PlaneWaveField::constant(x, spinor);
    let dvar_d = apply_dirac_variation(rep, k_poly, &apply_dirac(rep, &psi));
    let d_dvar = apply_dirac(rep, &apply_dirac_variation(rep, k_poly, &psi));
    let operator_route = dvar_d.plus(&d_dvar).at_origin();

    let origin = vec![0.0; n];
    let k0 = k_poly.eval(&origin);
    let k1: Vec<SymTensor> = (0..n).map(|a| k_poly.deriv(a).eval(&origin)).collect();
    let k2: Vec<Vec<SymTensor>> =
        (0..n).map(|a| (0..n).map(|b| k_poly.deriv(a).deriv(b).eval(&origin)).collect()).collect();
    let e = rep.dim_e();
    let mut op = CMatrix::zeros(e, e);
    for i in 0..n {
        for j in 0..n {
            for kk in 0..n {
                for l in 0..n {
                    let dd = k0.get(i, j) * -(x[kk] * x[l]);
                    let aa = IM * (k1[kk].get(i, j) * x[l]);
                    let bb = k2[kk][l].get(i, j);
                    op += coeffs.d(i, j, kk, l) * re(dd) + coeffs.a(i, j, kk, l) * aa + coeffs.b(i, j, kk, l) * re(bb);
                }
            }
        }
    }
    Ok(FlatVariation { operator_route, coefficient_route: op * spinor })
}

/// Spin structure on the flat torus Rⁿ/2πZⁿ: periodic spinors have modes
/// in Zⁿ, antiperiodic ones in (Z + ½)ⁿ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpinStructure {
    #[default]
    Periodic,
    Antiperiodic,
}

/// Lattice modes ξ with |m|_∞ ≤ cut.
pub fn torus_modes(n: usize, cut: usize, spin: SpinStructure) -> Vec<Vec<f64>> {
    let shift = match spin {
        SpinStructure::Periodic => 0.0,
        SpinStructure::Antiperiodic => 0.5,
    };
    let side = 2 * cut + 1;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let m = (idx % side) as f64 - cut as f64;
                    idx /= side;
                    m + shift
                })
                .collect()
        })
        .collect()
}

/// Spectra on the flat torus with constant metric h: (a) the operator
/// Σ e_i ∂_{h^{-1/2} e_i} transported to the ground spinor bundle, and
/// (b) the Dirac operator of h in the Cholesky orthonormal frame.
pub fn torus_gauge_isospectral(
    rep: &GammaRep,
    h: &DMatrix<f64>,
    lattice_cut: usize,
    spin: SpinStructure,
    exec: Exec,
) -> Result<(SpectrumReport, SpectrumReport)> {
    let n = rep.n();
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::Mismatch { expected: n, got: h.nrows() });
    }
    if lattice_cut < 1 {
        return Err(Error::Domain("lattice_cut must be at least 1".into()));
    }
    let (_, inv_root) = linalg::spd_sqrt_pair(h)?;
    let chol = h.clone().cholesky().ok_or_else(|| Error::NotPositive("Cholesky failed".into()))?;
    let l = chol.l();
    let modes = torus_modes(n, lattice_cut, spin);
    let per_mode = |xi: &Vec<f64>| -> (Vec<f64>, Vec<f64>) {
        let x = DVector::from_column_slice(xi);
        let a = &inv_root * &x;
        let b = l.solve_lower_triangular(&x).expect("Cholesky factor is invertible");
        let op = |v: &DVector<f64>| {
            let m = rep.clifford_vector(v.as_slice()).expect("dimension checked");
            linalg::herm_eigenvalues(&(m * IM))
        };
        (op(&a), op(&b))
    };
    let both = exec::map_collect(exec, &modes, per_mode);
    let (mut ga, mut gb) = (Vec::new(), Vec::new());
    for (a, b) in both {
        ga.extend(a);
        gb.extend(b);
    }
    Ok((SpectrumReport::from_eigenvalues(ga), SpectrumReport::from_eigenvalues(gb)))
}

/// ½[(∂_X k)(Y,Z) + (∂_Y k)(X,Z) - (∂_Z k)(X,Y)] at a point of flat Rⁿ.
pub fn levi_civita_variation(k: &TensorPoly, point: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<f64> {
    let n = k.n();
    for v in [point, x, y, z] {
        if v.len() != n {
            return Err(Error::Mismatch { expected: n, got: v.len() });
        }
    }
    let bil = |t: &SymTensor, a: &[f64], b: &[f64]| t.quad_pair(a, b);
    let dx = k.directional(point, x);
    let dy = k.directional(point, y);
    let dz = k.directional(point, z);
    Ok(0.5 * (bil(&dx, y, z) + bil(&dy, x, z) - bil(&dz, x, y)))
}

impl SymTensor {
    /// a·K·b.
    pub fn quad_pair(&self, a: &[f64], b: &[f64]) -> f64 {
        self.apply(b).iter().zip(a).map(|(p, q)| p * q).sum()
    }
}
