//! Truncated Fourier models of pseudodifferential operators on tori and
//! their spectra.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clifford::CMatrix;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::linalg;
use crate::stability::symbol::LogHomSymbol;

/// Residual above which an operator is not accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// A matrix-valued symbol of ξ ∈ Z^d, evaluated at lattice points.
pub trait FourierSymbol: Send + Sync {
    fn block_dim(&self) -> usize;
    fn torus_dim(&self) -> usize {
        1
    }
    fn eval(&self, m: &[f64]) -> DMatrix<f64>;
}

/// Scalar polynomial Σ c_p |ξ|^{2p}... given by coefficients of ξ^p on T¹.
#[derive(Debug, Clone)]
pub struct ScalarPolynomial(pub Vec<f64>);

impl FourierSymbol for ScalarPolynomial {
    fn block_dim(&self) -> usize {
        1
    }

    fn eval(&self, m: &[f64]) -> DMatrix<f64> {
        let x = m[0];
        let v = self.0.iter().rev().fold(0.0, |acc, c| acc * x + c);
        DMatrix::from_element(1, 1, v)
    }
}

impl FourierSymbol for LogHomSymbol {
    fn block_dim(&self) -> usize {
        self.dim()
    }

    fn torus_dim(&self) -> usize {
        self.n()
    }

    fn eval(&self, m: &[f64]) -> DMatrix<f64> {
        LogHomSymbol::eval(self, m).expect("lattice point has the torus dimension")
    }
}

/// A symbol on Rⁿ pulled back to T^d through a linear map of the lattice:
/// m ↦ Σ_a m_a ω_a.
pub struct Embedded<S> {
    pub inner: S,
    /// One vector of length n per torus direction.
    pub frame: Vec<Vec<f64>>,
}

impl<S: FourierSymbol> FourierSymbol for Embedded<S> {
    fn block_dim(&self) -> usize {
        self.inner.block_dim()
    }

    fn torus_dim(&self) -> usize {
        self.frame.len()
    }

    fn eval(&self, m: &[f64]) -> DMatrix<f64> {
        let n = self.inner.torus_dim();
        let mut x = vec![0.0; n];
        for (ma, w) in m.iter().zip(&self.frame) {
            for (xi, wi) in x.iter_mut().zip(w) {
                *xi += ma * wi;
            }
        }
        self.inner.eval(&x)
    }
}

/// A symbol given by a closure.
pub struct FnSymbol<F> {
    pub block_dim: usize,
    pub torus_dim: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync> FourierSymbol for FnSymbol<F> {
    fn block_dim(&self) -> usize {
        self.block_dim
    }

    fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    fn eval(&self, m: &[f64]) -> DMatrix<f64> {
        (self.f)(m)
    }
}

/// q(x, ξ) = Σ_r e^{irx} c_r q_r(ξ) on the circle.
#[derive(Clone)]
pub struct TrigSymbol {
    block_dim: usize,
    terms: Vec<(i64, Complex64, Arc<dyn FourierSymbol>)>,
}

impl TrigSymbol {
    /// The x-independent part.
    pub fn new(principal: Arc<dyn FourierSymbol>) -> Result<Self> {
        if principal.torus_dim() != 1 {
            return Err(Error::Unsupported("x-dependent symbols are modelled on the circle only".into()));
        }
        Ok(Self { block_dim: principal.block_dim(), terms: vec![(0, Complex64::new(1.0, 0.0), principal)] })
    }

    pub fn add(mut self, freq: i64, coeff: Complex64, part: Arc<dyn FourierSymbol>) -> Result<Self> {
        if part.block_dim() != self.block_dim {
            return Err(Error::Mismatch { expected: self.block_dim, got: part.block_dim() });
        }
        if part.torus_dim() != 1 {
            return Err(Error::Unsupported("x-dependent symbols are modelled on the circle only".into()));
        }
        self.terms.push((freq, coeff, part));
        Ok(self)
    }

    /// Adds a·cos(rx)·M with a constant matrix M.
    pub fn add_cos(self, r: i64, a: f64, m: DMatrix<f64>) -> Result<Self> {
        let part: Arc<dyn FourierSymbol> = Arc::new(FnSymbol { block_dim: m.nrows(), torus_dim: 1, f: move |_: &[f64]| m.clone() });
        let half = Complex64::new(a / 2.0, 0.0);
        self.add(r, half, part.clone())?.add(-r, half, part)
    }

    /// The Fourier coefficient in x at frequency r, evaluated at ξ.
    pub fn coefficient(&self, r: i64, xi: f64) -> CMatrix {
        let mut out = CMatrix::zeros(self.block_dim, self.block_dim);
        for (f, c, p) in self.terms.iter().filter(|(f, _, _)| *f == r) {
            let _ = f;
            out += linalg::to_complex(&p.eval(&[xi])) * *c;
        }
        out
    }

    fn frequencies(&self) -> Vec<i64> {
        let mut f: Vec<i64> = self.terms.iter().map(|t| t.0).collect();
        f.sort_unstable();
        f.dedup();
        f
    }
}

#[derive(Debug, Clone)]
pub enum Representation {
    /// One block per lattice mode, in the order of [`ModelOperator::modes`].
    Blocks(Vec<DMatrix<f64>>),
    Dense(CMatrix),
}

#[derive(Debug, Clone)]
pub struct ModelOperator {
    pub mode_cut: usize,
    pub torus_dim: usize,
    pub block_dim: usize,
    pub repr: Representation,
    /// max |Q - Q†| before Hermitization (collocation) or of the blocks.
    pub hermitization_residual: f64,
}

/// Lattice modes with every |m_a| ≤ cut, lexicographic.
pub fn lattice(torus_dim: usize, cut: usize) -> Vec<Vec<i64>> {
    let side = 2 * cut + 1;
    let total = side.pow(torus_dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut m = vec![0; torus_dim];
            for a in (0..torus_dim).rev() {
                m[a] = (idx % side) as i64 - cut as i64;
                idx /= side;
            }
            m
        })
        .collect()
}

impl ModelOperator {
    pub fn modes(&self) -> Vec<Vec<i64>> {
        lattice(self.torus_dim, self.mode_cut)
    }

    pub fn size(&self) -> usize {
        self.modes().len() * self.block_dim
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.repr {
            Representation::Dense(m) => m.clone(),
            Representation::Blocks(bs) => {
                let b = self.block_dim;
                let mut m = CMatrix::zeros(bs.len() * b, bs.len() * b);
                for (i, blk) in bs.iter().enumerate() {
                    m.view_mut((i * b, i * b), (b, b)).copy_from(&linalg::to_complex(blk));
                }
                m
            }
        }
    }

    /// Q f for a coefficient vector laid out mode-major.
    pub fn apply(&self, f: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.repr {
            Representation::Dense(m) => m * f,
            Representation::Blocks(bs) => {
                let b = self.block_dim;
                let mut out = DVector::zeros(f.len());
                for (i, blk) in bs.iter().enumerate() {
                    let seg = linalg::to_complex(blk) * f.rows(i * b, b);
                    out.rows_mut(i * b, b).copy_from(&seg);
                }
                out
            }
        }
    }
}

/// Fourier multiplier: block m = q(m).
pub fn build_multiplier(symbol: &dyn FourierSymbol, mode_cut: usize) -> Result<ModelOperator> {
    if mode_cut < 1 {
        return Err(Error::Domain("mode cut must be at least 1".into()));
    }
    let d = symbol.torus_dim();
    if d > 2 {
        return Err(Error::Unsupported(format!("torus dimension {d} > 2")));
    }
    let blocks: Vec<DMatrix<f64>> = lattice(d, mode_cut)
        .iter()
        .map(|m| symbol.eval(&m.iter().map(|&v| v as f64).collect::<Vec<_>>()))
        .collect();
    let residual = blocks.iter().map(|b| (b - b.transpose()).amax()).fold(0.0, f64::max);
    Ok(ModelOperator { mode_cut, torus_dim: d, block_dim: symbol.block_dim(), repr: Representation::Blocks(blocks), hermitization_residual: residual })
}

/// Left quantization on the circle: ⟨e_m, Q e_m′⟩ = q̂_{m-m′}(m′), then ½(Q + Q†).
pub fn build_collocation(symbol: &TrigSymbol, mode_cut: usize) -> Result<ModelOperator> {
    if mode_cut < 1 {
        return Err(Error::Domain("mode cut must be at least 1".into()));
    }
    let b = symbol.block_dim;
    let cut = mode_cut as i64;
    let side = 2 * mode_cut + 1;
    let freqs = symbol.frequencies();
    let mut q = CMatrix::zeros(side * b, side * b);
    for (col, mp) in (-cut..=cut).enumerate() {
        for &r in &freqs {
            let m = mp + r;
            if m.abs() > cut {
                continue;
            }
            let row = (m + cut) as usize;
            q.view_mut((row * b, col * b), (b, b)).copy_from(&symbol.coefficient(r, mp as f64));
        }
    }
    let residual = linalg::hermitian_residual(&q);
    let h = (&q + q.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(ModelOperator { mode_cut, torus_dim: 1, block_dim: b, repr: Representation::Dense(h), hermitization_residual: residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub lower_bound: f64,
    pub negative_count: usize,
    /// (value, multiplicity) for clusters of equal eigenvalues.
    pub multiplicities: Vec<(f64, usize)>,
}

impl SpectrumReport {
    pub fn from_eigenvalues(mut ev: Vec<f64>) -> Self {
        ev.sort_by(f64::total_cmp);
        let scale = ev.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let neg_tol = 1e-12 * scale;
        let negative_count = ev.iter().filter(|&&v| v < -neg_tol).count();
        let mut multiplicities: Vec<(f64, usize)> = Vec::new();
        for &v in &ev {
            match multiplicities.last_mut() {
                Some((w, c)) if (v - *w).abs() <= 1e-9 * w.abs().max(1.0) => *c += 1,
                _ => multiplicities.push((v, 1)),
            }
        }
        Self { lower_bound: ev.first().copied().unwrap_or(f64::INFINITY), negative_count, multiplicities, eigenvalues: ev }
    }

    /// Largest pointwise gap between the sorted spectra; infinite when the
    /// sizes differ.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        if self.eigenvalues.len() != other.eigenvalues.len() {
            return f64::INFINITY;
        }
        self.eigenvalues.iter().zip(&other.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Full Hermitian eigensolve. Block-diagonal operators are solved per block.
pub fn spectrum(op: &ModelOperator, exec: Exec) -> Result<SpectrumReport> {
    match &op.repr {
        Representation::Blocks(bs) => {
            if op.hermitization_residual > HERMITIAN_TOL {
                return Err(Error::NotHermitian(op.hermitization_residual));
            }
            let parts = exec::map_collect(exec, bs, |b| linalg::sym_eigenvalues(&((b + b.transpose()) * 0.5)));
            Ok(SpectrumReport::from_eigenvalues(parts.into_iter().flatten().collect()))
        }
        Representation::Dense(m) => {
            let r = linalg::hermitian_residual(m);
            if r > HERMITIAN_TOL {
                return Err(Error::NotHermitian(r));
            }
            Ok(SpectrumReport::from_eigenvalues(linalg::herm_eigenvalues(m)))
        }
    }
}

/// Discrete Sobolev norm (Σ (1+|m|²)^s |f_m|²)^{1/2}.
pub fn sobolev_norm(op: &ModelOperator, f: &DVector<Complex64>, s: f64) -> f64 {
    let b = op.block_dim;
    op.modes()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let m2: i64 = m.iter().map(|v| v * v).sum();
            let w = (1.0 + m2 as f64).powf(s);
            w * f.rows(i * b, b).norm_squared()
        })
        .sum::<f64>()
        .sqrt()
}

/// Solves (I + Q†Q) x = b, blockwise when possible.
struct GramSolver<'a> {
    op: &'a ModelOperator,
    dense: Option<nalgebra::Cholesky<Complex64, nalgebra::Dyn>>,
    blocks: Vec<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
}

impl<'a> GramSolver<'a> {
    fn new(op: &'a ModelOperator) -> Option<Self> {
        match &op.repr {
            Representation::Dense(m) => {
                let g = CMatrix::identity(m.nrows(), m.ncols()) + m.adjoint() * m;
                Some(Self { op, dense: Some(g.cholesky()?), blocks: Vec::new() })
            }
            Representation::Blocks(bs) => {
                let blocks = bs
                    .iter()
                    .map(|b| (DMatrix::identity(b.nrows(), b.ncols()) + b.transpose() * b).cholesky())
                    .collect::<Option<Vec<_>>>()?;
                Some(Self { op, dense: None, blocks })
            }
        }
    }

    fn solve(&self, f: &DVector<Complex64>) -> DVector<Complex64> {
        if let Some(c) = &self.dense {
            return c.solve(f);
        }
        let b = self.op.block_dim;
        let mut out = f.clone();
        for (i, c) in self.blocks.iter().enumerate() {
            let seg = f.rows(i * b, b);
            let re = c.solve(&seg.map(|z| z.re));
            let im = c.solve(&seg.map(|z| z.im));
            for k in 0..b {
                out[i * b + k] = Complex64::new(re[k], im[k]);
            }
        }
        out
    }
}

/// Number of raw samples refined by power iteration, and the steps taken.
const REFINED_SAMPLES: usize = 8;
const REFINE_STEPS: usize = 30;

/// Empirical sup of ‖f‖_{d0} / (‖f‖_0 + ‖Qf‖_0) over random trigonometric
/// polynomials. Half the raw samples are band-limited to a random scale
/// drawn log-uniformly up to the mode cut; the rest sit on one random mode
/// with small noise. The best raw samples are then pushed by power iteration
/// toward the top of ‖f‖²_{d0} against ‖f‖²_0 + ‖Qf‖²_0, whose maximizer
/// lives in the same low modes, and every iterate is scored.
pub fn gaarding_estimate(op: &ModelOperator, d0: f64, sample_size: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = op.modes();
    let b = op.block_dim;
    let size = modes.len() * b;
    let radius: Vec<f64> = modes.iter().map(|m| m.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt()).collect();
    let weight: Vec<f64> = radius.iter().flat_map(|r| std::iter::repeat_n((1.0 + r * r).powf(d0), b)).collect();
    let ratio = |f: &DVector<Complex64>| {
        let den = f.norm() + op.apply(f).norm();
        if den > 0.0 {
            sobolev_norm(op, f, d0) / den
        } else {
            0.0
        }
    };
    let mut scored: Vec<(f64, DVector<Complex64>)> = Vec::with_capacity(sample_size);
    for k in 0..sample_size {
        let mut f = DVector::<Complex64>::zeros(size);
        if k % 2 == 0 {
            let band = (op.mode_cut as f64).powf(rng.gen::<f64>());
            for (i, r) in radius.iter().enumerate() {
                if *r <= band {
                    for c in 0..b {
                        f[i * b + c] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    }
                }
            }
        } else {
            let centre = rng.gen_range(0..modes.len());
            for v in f.iter_mut() {
                *v = Complex64::new(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3));
            }
            for c in 0..b {
                f[centre * b + c] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        scored.push((ratio(&f), f));
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored.first().map_or(0.0, |s| s.0);
    if let Some(gram) = GramSolver::new(op) {
        for (_, f) in scored.iter().take(REFINED_SAMPLES) {
            let mut g = f.clone();
            for _ in 0..REFINE_STEPS {
                for (v, w) in g.iter_mut().zip(&weight) {
                    *v *= *w;
                }
                g = gram.solve(&g);
                let nrm = g.norm();
                if nrm == 0.0 {
                    break;
                }
                g /= Complex64::new(nrm, 0.0);
                best = best.max(ratio(&g));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fd_periodic_eigenvalues;
    use crate::stability::symbol::{Constant, PhiAffine};

    fn poly(c: &[f64]) -> ScalarPolynomial {
        ScalarPolynomial(c.to_vec())
    }

    fn log_symbol() -> LogHomSymbol {
        let one = DMatrix::identity(1, 1);
        LogHomSymbol::new(1, 2.0, vec![(0, Arc::new(Constant(one.clone()))), (1, Arc::new(Constant(one)))]).unwrap()
    }

    #[test]
    fn multiplier_examples() {
        let op = build_multiplier(&poly(&[0.0, 0.0, 1.0]), 3).unwrap();
        let r = spectrum(&op, Exec::Sequential).unwrap();
        assert_eq!(r.eigenvalues, vec![0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0]);
        assert_eq!((r.lower_bound, r.negative_count), (0.0, 0));
        assert_eq!(r.multiplicities, vec![(0.0, 1), (1.0, 2), (4.0, 2), (9.0, 2)]);

        let r = spectrum(&build_multiplier(&log_symbol(), 4).unwrap(), Exec::Parallel).unwrap();
        let mut want = vec![1.0];
        for m in 1..=4 {
            let m = m as f64;
            want.extend([m * m * (1.0 + m.ln()); 2]);
        }
        let want = SpectrumReport::from_eigenvalues(want);
        assert!(r.max_deviation(&want) < 1e-12);

        let r = spectrum(&build_multiplier(&poly(&[-4.0, 0.0, 1.0]), 5).unwrap(), Exec::Sequential).unwrap();
        assert_eq!(r.negative_count, 3);
        assert!(build_multiplier(&poly(&[1.0]), 0).is_err());
    }

    #[test]
    fn projection_split() {
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let q = LogHomSymbol::new(
            1,
            2.0,
            vec![(0, Arc::new(Constant(DMatrix::identity(2, 2)))), (1, Arc::new(Constant(p)))],
        )
        .unwrap();
        let op = build_multiplier(&q, 3).unwrap();
        if let Representation::Blocks(bs) = &op.repr {
            for (m, b) in op.modes().iter().zip(bs) {
                let r = (m[0].abs() as f64).max(1.0);
                let ev = linalg::sym_eigenvalues(b);
                let mut want = [r * r, r * r * (1.0 + r.ln())];
                want.sort_by(f64::total_cmp);
                assert!((ev[0] - want[0]).abs() < 1e-12 && (ev[1] - want[1]).abs() < 1e-12);
            }
        } else {
            panic!("multiplier must be block diagonal");
        }
    }

    #[test]
    fn collocation_without_x_dependence_is_the_multiplier() {
        let p: Arc<dyn FourierSymbol> = Arc::new(poly(&[0.0, 0.0, 1.0]));
        let t = TrigSymbol::new(p.clone()).unwrap().add_cos(1, 0.0, DMatrix::identity(1, 1)).unwrap();
        let a = spectrum(&build_collocation(&t, 6).unwrap(), Exec::Sequential).unwrap();
        let b = spectrum(&build_multiplier(p.as_ref(), 6).unwrap(), Exec::Sequential).unwrap();
        assert!(a.max_deviation(&b) < 1e-12);
    }

    #[test]
    fn mathieu_matches_finite_differences() {
        let t = TrigSymbol::new(Arc::new(poly(&[0.0, 0.0, 1.0]))).unwrap().add_cos(1, 1.0, DMatrix::identity(1, 1)).unwrap();
        let op = build_collocation(&t, 32).unwrap();
        assert!(op.hermitization_residual < 1e-10);
        let r = spectrum(&op, Exec::Sequential).unwrap();
        let fd = fd_periodic_eigenvalues(256, |x| x.cos());
        for i in 0..5 {
            assert!((r.eigenvalues[i] - fd[i]).abs() < 1e-6, "{i}: {} vs {}", r.eigenvalues[i], fd[i]);
        }
    }

    #[test]
    fn negative_count_is_stable_under_refinement() {
        let t = TrigSymbol::new(Arc::new(log_symbol())).unwrap().add_cos(1, -10.0, DMatrix::identity(1, 1)).unwrap();
        let counts: Vec<usize> =
            [32, 64, 128].iter().map(|&n| spectrum(&build_collocation(&t, n).unwrap(), Exec::Sequential).unwrap().negative_count).collect();
        assert!(counts[0] > 0);
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    }

    #[test]
    fn phi_symbol_on_circle() {
        // H_{2j}-shaped symbol for n = 2 through an embedding of the circle.
        let n = 2;
        let eta = 8.0 / 3.0;
        let d = 3;
        let q = LogHomSymbol::new(
            n,
            n as f64,
            vec![
                (0, Arc::new(PhiAffine::new(DMatrix::identity(d, d), -(n as f64 - 1.0) * eta / 2.0))),
                (1, Arc::new(PhiAffine::new(DMatrix::zeros(d, d), n as f64 - 1.0))),
            ],
        )
        .unwrap();
        let e = Embedded { inner: q, frame: vec![vec![0.6, 0.8]] };
        let a = spectrum(&build_multiplier(&e, 16).unwrap(), Exec::Sequential).unwrap();
        let b = spectrum(&build_multiplier(&e, 32).unwrap(), Exec::Sequential).unwrap();
        assert_eq!(a.negative_count, b.negative_count);
    }

    #[test]
    fn gaarding_examples() {
        let id = build_multiplier(&poly(&[1.0, 0.0, 1.0]), 32).unwrap();
        assert!(gaarding_estimate(&id, 2.0, 200, 1) <= 1.0 + 1e-12);
        let q = build_multiplier(&log_symbol(), 32).unwrap();
        let a = gaarding_estimate(&q, 2.0, 400, 2);
        let q2 = build_multiplier(&log_symbol(), 64).unwrap();
        let b = gaarding_estimate(&q2, 2.0, 800, 2);
        assert!(a.is_finite() && (a - b).abs() <= 0.05 * b, "{a} {b}");
        let zero = |n| build_multiplier(&poly(&[0.0]), n).unwrap();
        assert!(gaarding_estimate(&zero(64), 1.0, 200, 3) > 2.0 * gaarding_estimate(&zero(8), 1.0, 200, 3));
    }

    #[test]
    fn report_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let op = ModelOperator { mode_cut: 1, torus_dim: 1, block_dim: 1, repr: Representation::Dense(m), hermitization_residual: 1.0 };
        assert!(matches!(spectrum(&op, Exec::Sequential), Err(Error::NotHermitian(_))));
        let a = SpectrumReport::from_eigenvalues(vec![1.0]);
        assert_eq!(a.max_deviation(&SpectrumReport::from_eigenvalues(vec![])), f64::INFINITY);
    }
}
