//! Sequential vs rayon-parallel execution of the main data-parallel kernels.
//! Build with `--no-default-features` to time the sequential fallback alone.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dirac_hess::clifford::GammaRep;
use dirac_hess::dirac_variation::CoeffTensor;
use dirac_hess::fiber::{Covector, SymTensor};
use dirac_hess::hessian::u_assembled;
use dirac_hess::spectral_model::{build_multiplier, spectrum, Embedded};
use dirac_hess::sphere_zeta::pattern_table;
use dirac_hess::stability::{h_symbol, hypoellipticity_check, positivity_radius, HypoConfig, XiGrid};
use dirac_hess::Exec;
use num_complex::Complex64;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn hessian_assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("u_assembled");
    for n in [4usize, 6] {
        let rep = GammaRep::new(n).unwrap();
        let coeffs = CoeffTensor::new(&rep);
        let k = SymTensor::from_fn(n, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let xi = Covector::new((0..n).map(|i| 0.3 + i as f64).collect()).unwrap();
        let s = Complex64::new(0.3, 0.2);
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| u_assembled(&rep, &coeffs, black_box(&k), &xi, s, 1.0, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn determinant_table(c: &mut Criterion) {
    let mut g = c.benchmark_group("pattern_table");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| pattern_table(black_box(14), exec).unwrap()));
    }
    g.finish();
}

fn hypoellipticity(c: &mut Criterion) {
    let mut g = c.benchmark_group("hypoellipticity_check");
    g.sample_size(10);
    let q = h_symbol(4).unwrap();
    let r = positivity_radius(4).unwrap();
    let grid = XiGrid::new(2.0 * r, 1e4);
    for (name, exec) in MODES {
        let mut cfg = HypoConfig::new(4.1, 4.0);
        cfg.exec = exec;
        g.bench_function(name, |b| b.iter(|| hypoellipticity_check(&q, &grid, &cfg).unwrap()));
    }
    g.finish();
}

fn model_spectrum(c: &mut Criterion) {
    let mut g = c.benchmark_group("model_spectrum");
    g.sample_size(10);
    let h = Embedded { inner: h_symbol(4).unwrap(), frame: vec![vec![0.5; 4]] };
    let op = build_multiplier(&h, 128).unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| spectrum(&op, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, hessian_assembly, determinant_table, hypoellipticity, model_spectrum);
criterion_main!(benches);
