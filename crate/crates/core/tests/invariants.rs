//! Cross-module invariants checked on random inputs.

use dirac_hess::clifford::GammaRep;
use dirac_hess::dirac_variation::CoeffTensor;
use dirac_hess::fiber::{Covector, SymTensor};
use dirac_hess::hessian::{c_factor, u_assembled, u_closed_form, u_parts};
use dirac_hess::linalg::sym_eigenvalues;
use dirac_hess::spectral_model::{build_multiplier, spectrum, FourierSymbol, ScalarPolynomial};
use dirac_hess::stability::{eta, normalized_bracket, positivity_radius};
use dirac_hess::Exec;
use num_complex::Complex64;
use proptest::prelude::*;

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n).prop_filter("away from zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.05)
}

fn sym(n: usize) -> impl Strategy<Value = SymTensor> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |e| SymTensor::from_fn(n, |i, j| if i <= j { e[i * n + j] } else { e[j * n + i] }))
}

/// n, s in the validity strip, ξ, k.
fn case() -> impl Strategy<Value = (usize, f64, Vec<f64>, SymTensor)> {
    (3usize..=6).prop_flat_map(|n| {
        let top = n as f64 / 2.0 - 1.0 - 0.05;
        (Just(n), -1.5..top, vector(n), sym(n))
    })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assembly_matches_closed_form((n, s, xi, k) in case()) {
        let rep = GammaRep::new(n).unwrap();
        let coeffs = CoeffTensor::new(&rep);
        let xi = Covector::new(xi).unwrap();
        let s = Complex64::new(s, 0.0);
        let a = u_assembled(&rep, &coeffs, &k, &xi, s, 1.0, Exec::Sequential).unwrap().value;
        let c = u_closed_form(n, s, &xi, &k).unwrap();
        let p = c_factor(n, s).unwrap() * u_parts(&rep, &k, &xi, s).unwrap().sum();
        prop_assert!(rel(a, c) < 1e-10, "assembled {a} closed {c}");
        prop_assert!(rel(p, c) < 1e-10, "parts {p} closed {c}");
        // real s gives a real form
        prop_assert!(a.im.abs() <= 1e-12 * a.norm().max(1e-300));
    }

    #[test]
    fn sequential_and_parallel_agree((n, s, xi, k) in case()) {
        let rep = GammaRep::new(n).unwrap();
        let coeffs = CoeffTensor::new(&rep);
        let xi = Covector::new(xi).unwrap();
        let s = Complex64::new(s, 0.3);
        let a = u_assembled(&rep, &coeffs, &k, &xi, s, 2.0, Exec::Sequential).unwrap().value;
        let b = u_assembled(&rep, &coeffs, &k, &xi, s, 2.0, Exec::Parallel).unwrap().value;
        prop_assert!(rel(a, b) < 1e-13);
    }

    #[test]
    fn closed_form_is_homogeneous_in_xi((n, s, xi, k) in case(), t in 0.2..5.0f64) {
        let s = Complex64::new(s, 0.4);
        let x = Covector::new(xi.clone()).unwrap();
        let xt = x.scaled(t).unwrap();
        let a = u_closed_form(n, s, &xt, &k).unwrap();
        let b = u_closed_form(n, s, &x, &k).unwrap() * ((n as f64 - 2.0 * s) * t.ln()).exp();
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn form_vanishes_on_diffeomorphism_directions((n, s, xi, _k) in case(), om in vector(6)) {
        let rep = GammaRep::new(n).unwrap();
        let coeffs = CoeffTensor::new(&rep);
        let k = SymTensor::sym_product(&xi, &om[..n]).unwrap();
        let x = Covector::new(xi).unwrap();
        let s = Complex64::new(s, 0.0);
        let scale = c_factor(n, s).unwrap().norm() * k.norm().powi(2) * x.norm().powf(n as f64 - 2.0 * s.re) * rep.dim_e() as f64;
        let a = u_assembled(&rep, &coeffs, &k, &x, s, 1.0, Exec::Sequential).unwrap().value;
        prop_assert!(a.norm() < 1e-11 * scale, "{a} vs scale {scale}");
    }

    #[test]
    fn bracket_is_positive_above_the_radius(j in 1usize..=4, u in vector(8), t in 1.01..1e4f64) {
        let n = 2 * j;
        let r = positivity_radius(n).unwrap();
        let norm = u[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
        let xi = Covector::new(u[..n].iter().map(|x| x / norm * r * t).collect()).unwrap();
        prop_assert!(sym_eigenvalues(&normalized_bracket(n, &xi).unwrap())[0] > 0.0);
    }

    #[test]
    fn multiplier_spectrum_is_the_sampled_symbol(c in prop::collection::vec(-3.0..3.0f64, 1..4), cut in 4usize..40) {
        let q = ScalarPolynomial(c);
        let op = build_multiplier(&q, cut).unwrap();
        let rep = spectrum(&op, Exec::Sequential).unwrap();
        let mut expect: Vec<f64> = (-(cut as i64)..=cut as i64).map(|m| q.eval(&[m as f64])[(0, 0)]).collect();
        expect.sort_by(f64::total_cmp);
        let scale = expect.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for (a, b) in rep.eigenvalues.iter().zip(&expect) {
            prop_assert!((a - b).abs() < 1e-12 * scale);
        }
        prop_assert_eq!(rep.negative_count, expect.iter().filter(|v| **v < 0.0).count());
    }
}

#[test]
fn bracket_fails_just_below_the_radius() {
    for n in [4usize, 6, 8] {
        let r = positivity_radius(n).unwrap();
        let xi = Covector::new((0..n).map(|i| if i == 0 { 0.97 * r } else { 0.0 }).collect()).unwrap();
        assert!(sym_eigenvalues(&normalized_bracket(n, &xi).unwrap())[0] < 0.0, "n = {n}");
    }
}

#[test]
fn eta_is_increasing() {
    for j in 1..12 {
        assert!(eta(j + 1).unwrap() > eta(j).unwrap());
    }
}
