//! Gamma matrices for the complex Clifford algebra with e_i² = -1.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Largest fiber dimension built by default (n <= 20).
pub const DEFAULT_FIBER_CAP: usize = 1024;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct GammaRep {
    n: usize,
    dim_e: usize,
    gammas: Vec<CMatrix>,
}

fn pauli() -> [CMatrix; 3] {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        CMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// m pairwise anticommuting Hermitian matrices squaring to the identity.
fn hermitian_generators(m: usize) -> Vec<CMatrix> {
    match m {
        1 => vec![CMatrix::identity(1, 1)],
        2 => {
            let [x, y, _] = pauli();
            vec![x, y]
        }
        _ if m % 2 == 1 => {
            let mut g = hermitian_generators(m - 1);
            let d = g[0].nrows();
            let prod = g.iter().fold(CMatrix::identity(d, d), |acc, x| acc * x);
            // prod² = ±I; scale by 1 or i to get a Hermitian involution.
            let sq = &prod * &prod;
            let chir = if sq[(0, 0)].re > 0.0 { prod } else { prod * I };
            g.push(chir);
            g
        }
        _ => {
            let [x, y, z] = pauli();
            let inner = hermitian_generators(m - 2);
            let d = inner[0].nrows();
            let id = CMatrix::identity(d, d);
            let mut g: Vec<CMatrix> = inner.iter().map(|a| a.kronecker(&x)).collect();
            g.push(id.kronecker(&y));
            g.push(id.kronecker(&z));
            g
        }
    }
}

impl GammaRep {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, DEFAULT_FIBER_CAP)
    }

    /// Builds the representation, refusing fiber dimensions above `cap`.
    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        let half = n / 2;
        if half >= usize::BITS as usize - 1 || (1usize << half) > cap {
            return Err(Error::TooLarge { half, cap });
        }
        let gammas: Vec<CMatrix> = hermitian_generators(n).into_iter().map(|g| g * I).collect();
        Ok(Self { n, dim_e: 1 << half, gammas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim_e(&self) -> usize {
        self.dim_e
    }

    pub fn gammas(&self) -> &[CMatrix] {
        &self.gammas
    }

    pub fn gamma(&self, i: usize) -> &CMatrix {
        &self.gammas[i]
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim_e, self.dim_e)
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Mismatch { expected: self.n, got: len });
        }
        Ok(())
    }

    /// Clifford multiplication by v, i.e. Σ v_i γ_i.
    pub fn clifford_vector(&self, v: &[f64]) -> Result<CMatrix> {
        self.check(v.len())?;
        let mut m = CMatrix::zeros(self.dim_e, self.dim_e);
        for (g, &vi) in self.gammas.iter().zip(v) {
            if vi != 0.0 {
                m += g * Complex64::new(vi, 0.0);
            }
        }
        Ok(m)
    }

    /// tr(v_1 · v_2 ··· v_m) in the fiber.
    pub fn trace_product<V: AsRef<[f64]>>(&self, vs: &[V]) -> Result<Complex64> {
        if vs.is_empty() {
            return Err(Error::Domain("trace_product needs at least one vector".into()));
        }
        let mut acc = self.clifford_vector(vs[0].as_ref())?;
        for v in &vs[1..] {
            acc *= self.clifford_vector(v.as_ref())?;
        }
        Ok(acc.trace())
    }

    /// max over i, j of |γ_iγ_j + γ_jγ_i + 2δ_ij I|.
    pub fn anticommutator_residual(&self) -> f64 {
        let id = self.identity();
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let mut m = &self.gammas[i] * &self.gammas[j] + &self.gammas[j] * &self.gammas[i];
                if i == j {
                    m += &id * Complex64::new(2.0, 0.0);
                }
                worst = worst.max(max_abs(&m));
            }
        }
        worst
    }

    /// max over i of |γ_i† + γ_i|.
    pub fn skew_residual(&self) -> f64 {
        self.gammas.iter().map(|g| max_abs(&(g.adjoint() + g))).fold(0.0, f64::max)
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// dim_e {⟨a,b⟩⟨c,d⟩ - ⟨a,c⟩⟨b,d⟩ + ⟨a,d⟩⟨b,c⟩}, the trace of a four-fold product.
pub fn closed_form_trace4(a: &[f64], b: &[f64], c: &[f64], d: &[f64], dim_e: usize) -> Result<f64> {
    let n = a.len();
    for v in [b, c, d] {
        if v.len() != n {
            return Err(Error::Mismatch { expected: n, got: v.len() });
        }
    }
    Ok(dim_e as f64 * (dot(a, b) * dot(c, d) - dot(a, c) * dot(b, d) + dot(a, d) * dot(b, c)))
}

/// Standard basis vector e_i in R^n (zero-based i).
pub fn basis(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_reps() {
        let r2 = GammaRep::new(2).unwrap();
        assert_eq!(r2.dim_e(), 2);
        let g1 = r2.gamma(0);
        let g2 = r2.gamma(1);
        assert!(max_abs(&(g1 * g1 + r2.identity())) < 1e-15);
        assert!(max_abs(&(g1 * g2 + g2 * g1)) < 1e-15);
        assert_eq!(GammaRep::new(3).unwrap().dim_e(), 2);
        let r6 = GammaRep::new(6).unwrap();
        assert_eq!(r6.dim_e(), 8);
        assert!(r6.anticommutator_residual() < 1e-14);
    }

    #[test]
    fn invariants_up_to_twelve() {
        for n in 1..=12 {
            let r = GammaRep::new(n).unwrap();
            assert_eq!(r.dim_e(), 1 << (n / 2));
            assert!(r.anticommutator_residual() < 1e-14, "n={n}");
            assert!(r.skew_residual() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(GammaRep::new(0).is_err());
        assert!(matches!(GammaRep::new(22), Err(Error::TooLarge { .. })));
        assert!(GammaRep::with_cap(8, 8).is_err());
        assert!(GammaRep::with_cap(7, 8).is_ok());
    }

    #[test]
    fn clifford_vector_examples() {
        let r = GammaRep::new(3).unwrap();
        assert!(max_abs(&(r.clifford_vector(&basis(3, 0)).unwrap() - r.gamma(0))) == 0.0);
        assert_eq!(max_abs(&r.clifford_vector(&[0.0; 3]).unwrap()), 0.0);
        let v = r.clifford_vector(&[1.0, 1.0, 0.0]).unwrap();
        assert!(max_abs(&(&v * &v + r.identity() * Complex64::new(2.0, 0.0))) < 1e-15);
        assert!(r.clifford_vector(&[1.0]).is_err());
    }

    #[test]
    fn trace_examples() {
        let r3 = GammaRep::new(3).unwrap();
        assert!(r3.trace_product(&[basis(3, 0), basis(3, 1)]).unwrap().norm() < 1e-15);
        let r4 = GammaRep::new(4).unwrap();
        let t = r4.trace_product(&[basis(4, 0), basis(4, 0)]).unwrap();
        assert!((t - Complex64::new(-4.0, 0.0)).norm() < 1e-14);
        let t = r4.trace_product(&[basis(4, 0), basis(4, 1), basis(4, 0), basis(4, 1)]).unwrap();
        assert!((t - Complex64::new(-4.0, 0.0)).norm() < 1e-14);
        assert_eq!(closed_form_trace4(&basis(2, 0), &basis(2, 0), &basis(2, 1), &basis(2, 1), 2).unwrap(), 2.0);
        assert_eq!(closed_form_trace4(&basis(2, 0), &basis(2, 1), &basis(2, 0), &basis(2, 1), 2).unwrap(), -2.0);
        let empty: [Vec<f64>; 0] = [];
        assert!(r3.trace_product(&empty).is_err());
    }

    fn vecs(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(-1.0..1.0f64, n), k)
    }

    proptest! {
        #[test]
        fn square_is_minus_norm(n in 1usize..=8, seed in vecs(8, 1)) {
            let r = GammaRep::new(n).unwrap();
            let v = &seed[0][..n];
            let m = r.clifford_vector(v).unwrap();
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            prop_assert!(max_abs(&(&m * &m + r.identity() * Complex64::new(norm2, 0.0))) < 1e-13);
        }

        #[test]
        fn pair_trace(n in 1usize..=8, v in vecs(8, 2)) {
            let r = GammaRep::new(n).unwrap();
            let (a, b) = (&v[0][..n], &v[1][..n]);
            let t = r.trace_product(&[a, b]).unwrap();
            prop_assert!((t.re + r.dim_e() as f64 * dot(a, b)).abs() < 1e-12 && t.im.abs() < 1e-12);
        }

        #[test]
        fn four_trace(n in 2usize..=8, v in vecs(8, 4)) {
            let r = GammaRep::new(n).unwrap();
            let w: Vec<&[f64]> = v.iter().map(|x| &x[..n]).collect();
            let t = r.trace_product(&w).unwrap();
            let cf = closed_form_trace4(w[0], w[1], w[2], w[3], r.dim_e()).unwrap();
            prop_assert!((t.re - cf).abs() < 1e-11 && t.im.abs() < 1e-11);
        }

        #[test]
        fn odd_word_trace_vanishes(n in 2usize..=8, word in proptest::collection::vec(0usize..8, 2..=6)) {
            // A word of basis vectors in which some index occurs exactly once.
            let word: Vec<usize> = word.into_iter().map(|i| i % n).collect();
            let singleton = word.iter().any(|i| word.iter().filter(|j| *j == i).count() == 1);
            prop_assume!(singleton && word.len() % 2 == 0);
            let r = GammaRep::new(n).unwrap();
            let vs: Vec<Vec<f64>> = word.iter().map(|&i| basis(n, i)).collect();
            prop_assert!(r.trace_product(&vs).unwrap().norm() < 1e-12);
        }
    }
}
