//! Leading symbol of the Hessian of the modified Dirac zeta function.
//!
//! Three evaluations of the quadratic form ⟨k, u_s(ξ) k⟩:
//!
//! * [`u_assembled`]: the tabulated kernels paired with the Clifford
//!   coefficient data of the variation of D², traced with explicit gamma
//!   matrices;
//! * [`u_parts`]: the same quantity split into four pieces built from the
//!   σ symbols;
//! * [`u_closed_form`]: the compact formula
//!   `dim_e/4 · C(s) · |ξ|^{n-2s} {(2s-(n-1)) tr(KΠ⊥)² + (tr KΠ⊥)²}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::clifford::{CMatrix, GammaRep};
use crate::dirac_variation::{sigma_symbols, CoeffTensor, Family};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::fiber::{proj_perp, Covector, SymTensor};
use crate::special::{gamma, is_nonpositive_integer};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// S = s - n/2.
pub fn big_s(n: usize, s: Complex64) -> Complex64 {
    s - n as f64 / 2.0
}

/// True when Re s < n/2 - 1, where the closed form is stated.
pub fn in_validity_strip(n: usize, s: Complex64) -> bool {
    s.re < n as f64 / 2.0 - 1.0
}

/// |ξ|^w for complex w.
fn rpow(r: f64, w: Complex64) -> Complex64 {
    (w * r.ln()).exp()
}

/// Γ(1-S)²/Γ(2-2S), the s-dependent part of C(s).
pub fn gamma_ratio(n: usize, s: Complex64) -> Result<Complex64> {
    let sc = big_s(n, s);
    let den = 2.0 - 2.0 * sc;
    if is_nonpositive_integer(den) || is_nonpositive_integer(1.0 - sc) {
        return Err(Error::Pole { what: "C(s)", at: format!("s = {s}") });
    }
    let g = gamma(1.0 - sc)?;
    Ok(g * g / gamma(den)?)
}

/// C(s) = (4π)^{-n/2} Γ(1-S)²/Γ(2-2S).
pub fn c_factor(n: usize, s: Complex64) -> Result<Complex64> {
    Ok(gamma_ratio(n, s)? * (4.0 * PI).powf(-(n as f64) / 2.0))
}

/// The six tabulated kernel rows, named by which coefficient families they
/// pair (first, second).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelShape {
    /// Row 1: both derivatives on both k's.
    BB,
    /// Row 2.
    AB,
    /// Row 3.
    AA,
    /// Row 4.
    DB,
    /// Row 5.
    DA,
    /// Row 6: all derivatives on the spinors.
    DD,
}

impl KernelShape {
    pub const ALL: [KernelShape; 6] = [Self::BB, Self::AB, Self::AA, Self::DB, Self::DA, Self::DD];

    /// Row number 1..=6 in the kernel table.
    pub fn row(self) -> usize {
        Self::ALL.iter().position(|&r| r == self).unwrap() + 1
    }

    pub fn from_row(row: usize) -> Result<Self> {
        Self::ALL.get(row.wrapping_sub(1)).copied().ok_or_else(|| Error::Domain(format!("unknown kernel row {row}")))
    }

    /// The row for an ordered family pair, and whether the index pairs
    /// must be swapped to use it.
    pub fn for_pair(x: Family, y: Family) -> (Self, bool) {
        use Family::*;
        match (x, y) {
            (B, B) => (Self::BB, false),
            (A, B) => (Self::AB, false),
            (B, A) => (Self::AB, true),
            (A, A) => (Self::AA, false),
            (D, B) => (Self::DB, false),
            (B, D) => (Self::DB, true),
            (D, A) => (Self::DA, false),
            (A, D) => (Self::DA, true),
            (D, D) => (Self::DD, false),
        }
    }
}

/// One entry of the kernel table at (j, k, p, q) (zero-based).
pub fn hessian_kernel(
    shape: KernelShape,
    idx: [usize; 4],
    n: usize,
    s: Complex64,
    xi: &Covector,
) -> Result<Complex64> {
    if xi.n() != n {
        return Err(Error::Mismatch { expected: n, got: xi.n() });
    }
    if idx.iter().any(|&i| i >= n) {
        return Err(Error::Domain(format!("kernel index out of range for n = {n}")));
    }
    Ok(KernelEval::new(n, s, xi).eval(shape, idx))
}

/// Per-(n, s, ξ) powers shared by all kernel entries.
struct KernelEval<'a> {
    x: &'a [f64],
    sc: Complex64,
    r4: Complex64,
    r2: Complex64,
    r0: Complex64,
}

impl<'a> KernelEval<'a> {
    fn new(n: usize, s: Complex64, xi: &'a Covector) -> Self {
        let r = xi.norm();
        let w = n as f64 - 2.0 * s;
        Self { x: xi.as_slice(), sc: big_s(n, s), r4: rpow(r, w - 4.0), r2: rpow(r, w - 2.0), r0: rpow(r, w) }
    }

    fn eval(&self, shape: KernelShape, [j, k, p, q]: [usize; 4]) -> Complex64 {
        let x = self.x;
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let s = self.sc;
        let f4 = self.r4 * (x[j] * x[k] * x[p] * x[q]);
        match shape {
            KernelShape::BB => 4.0 * (4.0 * s * s - 1.0) * f4,
            KernelShape::AB => -2.0 * (4.0 * s * s - 1.0) * f4,
            KernelShape::AA => (4.0 * s * s + 2.0 * s - 2.0) * f4 - (2.0 * s - 1.0) * self.r2 * (d(k, q) * x[j] * x[p]),
            KernelShape::DB => (4.0 * s * s - 2.0 * s) * f4 + (2.0 * s - 1.0) * self.r2 * (d(j, k) * x[p] * x[q]),
            KernelShape::DA => {
                let delta = -d(j, k) * x[p] * x[q] + d(j, q) * x[k] * x[p] + d(k, q) * x[j] * x[p];
                -(2.0 * s * s + s - 1.0) * f4 + (s - 0.5) * self.r2 * delta
            }
            KernelShape::DD => {
                let t2a = 0.5 * (s - 1.0) * (d(j, k) * x[p] * x[q] + x[j] * x[k] * d(p, q));
                let t2b = -(s / 2.0)
                    * (d(j, p) * x[k] * x[q] + d(k, q) * x[j] * x[p] + d(j, q) * x[k] * x[p] + d(k, p) * x[j] * x[q]);
                let t0 = 0.25 * (d(j, k) * d(p, q) + d(j, p) * d(k, q) + d(j, q) * d(k, p));
                (s * s + s) * f4 + (t2a + t2b) * self.r2 + self.r0 * t0
            }
        }
    }
}

/// ⟨k, u_s k⟩ with its parameters.
#[derive(Debug, Clone)]
pub struct HessianForm {
    pub n: usize,
    pub s: Complex64,
    pub big_s: Complex64,
    pub xi: Covector,
    pub volume: f64,
    pub value: Complex64,
}

fn check(rep: &GammaRep, k: &SymTensor, xi: &Covector) -> Result<()> {
    let n = rep.n();
    if k.n() != n {
        return Err(Error::Mismatch { expected: n, got: k.n() });
    }
    if xi.n() != n {
        return Err(Error::Mismatch { expected: n, got: xi.n() });
    }
    Ok(())
}

/// tr(XY) without forming the product.
fn trace_prod(x: &CMatrix, y: &CMatrix) -> Complex64 {
    let e = x.nrows();
    let mut t = Complex64::new(0.0, 0.0);
    for a in 0..e {
        for b in 0..e {
            t += x[(a, b)] * y[(b, a)];
        }
    }
    t
}

/// Full assembly from the kernel table and the coefficient data:
/// V^{(2s-n)/n} C(s) Σ_{X,Y ∈ {D,A,B}} Σ_{abcd} kernel_{XY}(a,b,c,d) tr(X_ab Y_cd),
/// with X_ab = Σ_ij k_ij X^{ij}_ab.
pub fn u_assembled(
    rep: &GammaRep,
    coeffs: &CoeffTensor,
    k: &SymTensor,
    xi: &Covector,
    s: Complex64,
    volume: f64,
    exec: Exec,
) -> Result<HessianForm> {
    check(rep, k, xi)?;
    if coeffs.n() != rep.n() {
        return Err(Error::Mismatch { expected: rep.n(), got: coeffs.n() });
    }
    if !(volume > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {volume}")));
    }
    let n = rep.n();
    let c = c_factor(n, s)?;
    let families = [Family::D, Family::A, Family::B];
    let contracted: Vec<Vec<CMatrix>> = families.iter().map(|&f| coeffs.contract_k(f, k)).collect();
    let kern = KernelEval::new(n, s, xi);
    let nn = n * n;
    let sum = exec::sum_by(exec, nn, |ab| {
        let (a, b) = (ab / n, ab % n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (xf, xs) in families.iter().zip(&contracted) {
            let xm = &xs[ab];
            for (yf, ys) in families.iter().zip(&contracted) {
                let (shape, swap) = KernelShape::for_pair(*xf, *yf);
                for cd in 0..nn {
                    let (cc, d) = (cd / n, cd % n);
                    let idx = if swap { [cc, d, a, b] } else { [a, b, cc, d] };
                    let w = kern.eval(shape, idx);
                    if w != Complex64::new(0.0, 0.0) {
                        acc += w * trace_prod(xm, &ys[cd]);
                    }
                }
            }
        }
        acc
    });
    let vol = rpow(volume, (2.0 * s - n as f64) / n as f64);
    Ok(HessianForm { n, s, big_s: big_s(n, s), xi: xi.clone(), volume, value: vol * c * sum })
}

/// The four pieces ⟨k, u^{(i)} k⟩, i = 1..4, evaluated with matrix traces of
/// the σ symbols. Their sum times C(s) is the full form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UParts(pub [Complex64; 4]);

impl UParts {
    pub fn sum(&self) -> Complex64 {
        self.0.iter().sum()
    }
}

pub fn u_parts(rep: &GammaRep, k: &SymTensor, xi: &Covector, s: Complex64) -> Result<UParts> {
    check(rep, k, xi)?;
    let n = rep.n();
    let e = rep.dim_e() as f64;
    let sig = sigma_symbols(rep, k, xi)?;
    let x = xi.as_slice();
    let r = xi.norm();
    let r2 = r * r;
    let sc = big_s(n, s);
    let w = n as f64 - 2.0 * s;
    let pre4 = rpow(r, w - 4.0);
    let id = rep.identity();
    let kx = k.apply(x);
    let xkx = k.quad(x);
    let trk = k.trace();
    let kx2: f64 = kx.iter().map(|v| v * v).sum();

    let m1 = &id * re(sig.sigma2) - &sig.sigma1 * re(2.0) + &sig.sigma0 * re(4.0);
    let u1 = (sc * sc - 0.25) * pre4 * trace_prod(&m1, &m1);

    let mut sq = CMatrix::zeros(id.nrows(), id.ncols());
    for j in 0..n {
        let mut inner = CMatrix::zeros(id.nrows(), id.ncols());
        for (i, xi_i) in x.iter().enumerate() {
            inner += &sig.sigma1_components[i * n + j] * re(*xi_i);
        }
        sq += &inner * &inner;
    }
    let u2 = (2.0 * sc - 1.0) * pre4 * (trace_prod(&sig.sigma1, &sig.sigma1) - r2 * sq.trace());

    let mut mixed = CMatrix::zeros(id.nrows(), id.ncols());
    for i in 0..n {
        for j in 0..n {
            mixed += &sig.sigma1_components[i * n + j] * re(x[i] * kx[j] + x[j] * kx[i]);
        }
    }
    let t1 = r2 * mixed.trace();
    let t2 = xkx * (-sig.sigma1.trace() - 2.0 * sig.sigma0.trace());
    let t3 = r2 * trk * (-sig.sigma1.trace() + 2.0 * sig.sigma0.trace());
    let u3 = (2.0 * sc - 1.0) * pre4 * (t1 + t2 + t3);

    let p = proj_perp(xi);
    let kp = k.matrix() * &p;
    let a = (&kp * &kp).trace();
    let b = kp.trace();
    let u4 = e * pre4 * (sc - 0.5) * (-2.0 * r2 * kx2 + xkx * xkx + r2 * xkx * trk)
        + e * rpow(r, w) * (0.5 * a + 0.25 * b * b);
    Ok(UParts([u1, u2, u3, u4]))
}

/// The compact closed form
/// 2^{⌊n/2⌋-2} (4π)^{-n/2} Γ(1-S)²/Γ(2-2S) |ξ|^{n-2s} {(2s-(n-1)) tr(KΠ⊥)² + (tr KΠ⊥)²}.
pub fn u_closed_form(n: usize, s: Complex64, xi: &Covector, k: &SymTensor) -> Result<Complex64> {
    if xi.n() != n || k.n() != n {
        return Err(Error::Mismatch { expected: n, got: if xi.n() != n { xi.n() } else { k.n() } });
    }
    Ok(c_factor(n, s)? * braces(n, s, xi, k))
}

/// Everything in the closed form except C(s):
/// dim_e/4 |ξ|^{n-2s} {(2s-(n-1)) tr(KΠ⊥)² + (tr KΠ⊥)²}.
pub fn braces(n: usize, s: Complex64, xi: &Covector, k: &SymTensor) -> Complex64 {
    let p = proj_perp(xi);
    let kp = k.matrix() * &p;
    let a = (&kp * &kp).trace();
    let b = kp.trace();
    let dim_e = (1usize << (n / 2)) as f64;
    let w = n as f64 - 2.0 * s;
    dim_e / 4.0 * rpow(xi.norm(), w) * ((2.0 * s - (n as f64 - 1.0)) * a + b * b)
}

/// d/ds of [`u_closed_form`], analytic in s.
pub fn u_closed_form_ds(n: usize, s: Complex64, xi: &Covector, k: &SymTensor) -> Result<Complex64> {
    let sc = big_s(n, s);
    let c = c_factor(n, s)?;
    // d/ds log(Γ(1-S)²/Γ(2-2S)) = -2ψ(1-S) + 2ψ(2-2S)
    let dlog_c = -2.0 * crate::special::digamma(1.0 - sc)? + 2.0 * crate::special::digamma(2.0 - 2.0 * sc)?;
    let p = proj_perp(xi);
    let kp = k.matrix() * &p;
    let a = (&kp * &kp).trace();
    let b = kp.trace();
    let dim_e = (1usize << (n / 2)) as f64;
    let r = xi.norm();
    let w = n as f64 - 2.0 * s;
    let inner = (2.0 * s - (n as f64 - 1.0)) * a + b * b;
    let rw = rpow(r, w);
    let d_br = dim_e / 4.0 * (rw * (-2.0 * r.ln()) * inner + rw * (2.0 * a));
    let br = dim_e / 4.0 * rw * inner;
    Ok(c * (dlog_c * br + d_br))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn rand_sym(rng: &mut ChaCha8Rng, n: usize) -> SymTensor {
        SymTensor::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn rand_xi(rng: &mut ChaCha8Rng, n: usize) -> Covector {
        Covector::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn c_factor_values() {
        assert_relative_eq!(c_factor(3, c(0.0)).unwrap().re, 3.0 / (1024.0 * PI.sqrt()), max_relative = 1e-13);
        assert_relative_eq!(c_factor(2, c(0.0)).unwrap().re, 1.0 / (24.0 * PI), max_relative = 1e-13);
        for n in 2..8 {
            let v = c_factor(n, c(n as f64 / 2.0)).unwrap();
            assert_relative_eq!(v.re, (4.0 * PI).powf(-(n as f64) / 2.0), max_relative = 1e-13);
        }
        // 2 - 2S = 0 at s = n/2 + 1
        assert!(matches!(c_factor(3, c(2.5)), Err(Error::Pole { .. })));
    }

    #[test]
    fn kernel_examples() {
        let xi = Covector::basis(3, 0);
        let v = hessian_kernel(KernelShape::BB, [0, 0, 0, 0], 3, c(0.0), &xi).unwrap();
        assert!((v - c(32.0)).norm() < 1e-13);
        let w = hessian_kernel(KernelShape::AB, [0, 0, 0, 0], 3, c(0.0), &xi).unwrap();
        assert!((w + 0.5 * v).norm() < 1e-13);
        // j = k = 1, p = q = 2, ξ = e_0: only the constant tail of row 6 survives.
        let t = hessian_kernel(KernelShape::DD, [1, 1, 2, 2], 3, c(0.0), &xi).unwrap();
        assert!((t - c(0.25)).norm() < 1e-14);
        assert!(hessian_kernel(KernelShape::DD, [3, 0, 0, 0], 3, c(0.0), &xi).is_err());
        assert_eq!(KernelShape::from_row(6).unwrap(), KernelShape::DD);
        assert!(KernelShape::from_row(7).is_err());
        assert!(KernelShape::from_row(0).is_err());
    }

    #[test]
    fn parts_examples() {
        // u2 at n=3, ξ=e_0, k=e_1⊗e_1: (2S-1) dim_e/4.
        let rep = GammaRep::new(3).unwrap();
        let xi = Covector::basis(3, 0);
        let k = SymTensor::outer(&[0.0, 1.0, 0.0]);
        for s in [0.0, 0.3, -1.2] {
            let p = u_parts(&rep, &k, &xi, c(s)).unwrap();
            let sc = s - 1.5;
            assert!((p.0[1] - c((2.0 * sc - 1.0) * 0.5)).norm() < 1e-13);
        }
        // u4 on a trace-free k supported on ξ^⊥ reduces to dim_e/2 tr((KΠ⊥)²).
        let k = SymTensor::from_fn(3, |i, j| match (i, j) {
            (1, 1) => 1.0,
            (2, 2) => -1.0,
            (1, 2) => 0.5,
            _ => 0.0,
        });
        let xi = Covector::new(vec![2.0, 0.0, 0.0]).unwrap();
        let p = u_parts(&rep, &k, &xi, c(0.0)).unwrap();
        let a = (k.matrix() * k.matrix()).trace();
        // dim_e |ξ|³ · ½a = 2 · 8 · ½a
        assert_relative_eq!(p.0[3].re, 8.0 * a, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let xi = Covector::basis(3, 0);
        let gauge = SymTensor::sym_product(&[1.0, 0.0, 0.0], &[0.3, -0.2, 0.9]).unwrap();
        assert!(u_closed_form(3, c(0.0), &xi, &gauge).unwrap().norm() < 1e-16);
        let k = SymTensor::outer(&[0.0, 1.0, 0.0]);
        let want = 0.5 * c_factor(3, c(0.0)).unwrap() * -1.0;
        assert!(rel(u_closed_form(3, c(0.0), &xi, &k).unwrap(), want) < 1e-14);
        // homogeneity in ξ
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = rand_sym(&mut rng, 4);
        let xi = rand_xi(&mut rng, 4);
        let s = Complex64::new(0.3, 0.2);
        let base = u_closed_form(4, s, &xi, &k).unwrap();
        let scaled = u_closed_form(4, s, &xi.scaled(2.5).unwrap(), &k).unwrap();
        assert!(rel(scaled, base * rpow(2.5, 4.0 - 2.0 * s)) < 1e-13);
    }

    #[test]
    fn parts_sum_and_assembly_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5 {
            let rep = GammaRep::new(n).unwrap();
            let co = CoeffTensor::new(&rep);
            for _ in 0..4 {
                let k = rand_sym(&mut rng, n);
                let xi = rand_xi(&mut rng, n);
                for s in [c(0.0), c(-0.7), Complex64::new(1.0, 0.3)] {
                    let parts = u_parts(&rep, &k, &xi, s).unwrap();
                    assert!(parts.0[0].norm() < 1e-11 * parts.0[3].norm().max(1.0));
                    let asm = u_assembled(&rep, &co, &k, &xi, s, 1.0, Exec::Sequential).unwrap().value;
                    let via_parts = c_factor(n, s).unwrap() * parts.sum();
                    let closed = u_closed_form(n, s, &xi, &k).unwrap();
                    if n == 2 && s == c(0.0) {
                        // The closed form vanishes identically here.
                        assert!(closed.norm() < 1e-14 && asm.norm() < 1e-12);
                        continue;
                    }
                    assert!(rel(asm, via_parts) < 1e-11, "n={n} s={s}");
                    assert!(rel(asm, closed) < 1e-10, "n={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn volume_scaling_and_exec_modes() {
        let rep = GammaRep::new(3).unwrap();
        let co = CoeffTensor::new(&rep);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = rand_sym(&mut rng, 3);
        let xi = rand_xi(&mut rng, 3);
        let v1 = u_assembled(&rep, &co, &k, &xi, c(0.0), 1.0, Exec::Parallel).unwrap().value;
        let v8 = u_assembled(&rep, &co, &k, &xi, c(0.0), 8.0, Exec::Sequential).unwrap().value;
        // V^{(2s-n)/n} = 8^{-1}
        assert!(rel(v8, 0.125 * v1) < 1e-13);
        assert!(u_assembled(&rep, &co, &k, &xi, c(0.0), 0.0, Exec::Sequential).is_err());
    }

    #[test]
    fn analytic_s_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let k = rand_sym(&mut rng, 5);
        let xi = rand_xi(&mut rng, 5);
        let s = Complex64::new(0.2, 0.1);
        let h = 1e-5;
        let fd = (u_closed_form(5, s + h, &xi, &k).unwrap() - u_closed_form(5, s - h, &xi, &k).unwrap()) / (2.0 * h);
        let d = u_closed_form_ds(5, s, &xi, &k).unwrap();
        assert!(rel(fd, d) < 1e-8);
    }
}
