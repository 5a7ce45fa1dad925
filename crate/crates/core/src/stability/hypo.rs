//! Empirical hypoellipticity bounds on a log-spaced ξ grid, and symbol
//! square roots.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::symbol::LogHomSymbol;
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::fiber::{inv_identity_plus_proj, phi_matrix, Covector};
use crate::linalg;

/// Radii log-spaced over [r_min, r_max], crossed with seeded random
/// unit directions.
#[derive(Debug, Clone, PartialEq)]
pub struct XiGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub per_decade: usize,
    pub directions: usize,
    pub seed: u64,
}

impl XiGrid {
    pub fn new(r_min: f64, r_max: f64) -> Self {
        Self { r_min, r_max, per_decade: 8, directions: 6, seed: 0 }
    }

    pub fn radii(&self) -> Vec<f64> {
        let a = self.r_min.log10();
        let b = self.r_max.log10();
        let steps = ((b - a) * self.per_decade as f64).ceil().max(1.0) as usize;
        (0..=steps).map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64)).collect()
    }

    pub fn unit_directions(&self, n: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = vec![{
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            e
        }];
        while out.len() < self.directions.max(1) {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > 1e-3 {
                out.push(v.iter().map(|x| x / r).collect());
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct HypoConfig {
    /// Upper degree d.
    pub d: f64,
    /// Lower degree d0.
    pub d0: f64,
    pub max_order: usize,
    /// Largest acceptable slope of log(constant) against log|ξ|.
    pub slope_tol: f64,
    /// Number of trailing decades used in the slope fit.
    pub fit_decades: usize,
    /// Grid points below this radius are rejected.
    pub positivity_radius: Option<f64>,
    pub exec: Exec,
}

impl HypoConfig {
    pub fn new(d: f64, d0: f64) -> Self {
        Self { d, d0, max_order: 2, slope_tol: 0.01, fit_decades: 3, positivity_radius: None, exec: Exec::default() }
    }
}

/// One bounded constant: its extreme over the grid, the per-decade extremes
/// and the fitted tail slope.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantTrend {
    pub name: String,
    pub extreme: f64,
    pub per_decade: Vec<(f64, f64)>,
    pub slope: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypoReport {
    pub d: f64,
    pub d0: f64,
    /// inf |q|_min / |ξ|^{d0}.
    pub lower: ConstantTrend,
    /// sup |q| / |ξ|^d.
    pub upper: ConstantTrend,
    /// sup |q^{-1} ∂^α q| |ξ|^{|α|} for |α| = 1, 2, ...
    pub derivatives: Vec<ConstantTrend>,
}

impl HypoReport {
    pub fn bounds_pass(&self) -> bool {
        self.lower.pass && self.upper.pass
    }

    pub fn pass(&self) -> bool {
        self.bounds_pass() && self.derivatives.iter().all(|c| c.pass)
    }
}

struct Sample {
    r: f64,
    smin: f64,
    smax: f64,
    deriv: Vec<f64>,
}

fn singular_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.clone().singular_values();
    (sv.min(), sv.max())
}

fn op_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

/// Least-squares slope of y against x.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Groups (r, value) by decade of r and keeps the per-decade sup (or inf).
fn trend(name: &str, pts: &[(f64, f64)], take_sup: bool, cfg: &HypoConfig) -> ConstantTrend {
    let mut bins: Vec<(i64, f64, f64)> = Vec::new();
    for &(r, v) in pts {
        let dec = r.log10().floor() as i64;
        match bins.iter_mut().find(|b| b.0 == dec) {
            Some(b) => {
                b.2 = if take_sup { b.2.max(v) } else { b.2.min(v) };
                b.1 = b.1.max(r);
            }
            None => bins.push((dec, r, v)),
        }
    }
    bins.sort_by_key(|b| b.0);
    // A decade holding a single endpoint sample is folded away.
    if let Some(last) = bins.last().map(|b| b.0) {
        let mut radii: Vec<f64> = pts.iter().filter(|p| p.0.log10().floor() as i64 == last).map(|p| p.0).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        if bins.len() > 1 && radii.len() == 1 {
            bins.pop();
        }
    }
    let per_decade: Vec<(f64, f64)> = bins.iter().map(|b| (10f64.powi(b.0 as i32), b.2)).collect();
    let tail = &per_decade[per_decade.len().saturating_sub(cfg.fit_decades)..];
    let extreme = pts.iter().map(|p| p.1).fold(if take_sup { 0.0 } else { f64::INFINITY }, |a, v| if take_sup { a.max(v) } else { a.min(v) });
    let (slope, ok) = if take_sup {
        let fit: Vec<(f64, f64)> = tail.iter().map(|&(r, v)| (r.ln(), v.max(1e-300).ln())).collect();
        let s = fit_slope(&fit);
        (s, extreme.is_finite() && s <= cfg.slope_tol)
    } else {
        let positive = extreme > 1e-12;
        let fit: Vec<(f64, f64)> = tail.iter().map(|&(r, v)| (r.ln(), -v.max(1e-300).ln())).collect();
        let s = fit_slope(&fit);
        (s, positive && s <= cfg.slope_tol)
    };
    ConstantTrend { name: name.to_string(), extreme, per_decade, slope, pass: ok }
}

fn multi_indices(n: usize, order: usize) -> Vec<Vec<usize>> {
    match order {
        1 => (0..n).map(|i| vec![i]).collect(),
        2 => (0..n).flat_map(|i| (i..n).map(move |j| vec![i, j])).collect(),
        _ => Vec::new(),
    }
}

/// Checks C1|ξ|^{d0} ≤ |q| ≤ C2|ξ|^d and |q^{-1}∂^α q| ≤ C_α|ξ|^{-|α|} on the
/// grid, using the operator 2-norm and the smallest singular value.
pub fn hypoellipticity_check(symbol: &LogHomSymbol, grid: &XiGrid, cfg: &HypoConfig) -> Result<HypoReport> {
    if cfg.d0 > cfg.d {
        return Err(Error::Domain(format!("d0 = {} exceeds d = {}", cfg.d0, cfg.d)));
    }
    if cfg.max_order > 2 {
        return Err(Error::Unsupported("derivative orders above 2".into()));
    }
    if grid.r_min < 1.0 || grid.r_max <= grid.r_min {
        return Err(Error::Domain("grid must satisfy 1 ≤ r_min < r_max".into()));
    }
    if let Some(r) = cfg.positivity_radius {
        if grid.r_min < r {
            return Err(Error::Domain(format!("grid starts at {} below the positivity radius {r}", grid.r_min)));
        }
    }
    let n = symbol.n();
    let dirs = grid.unit_directions(n);
    let radii = grid.radii();
    let points: Vec<Vec<f64>> = radii.iter().flat_map(|&r| dirs.iter().map(move |u| u.iter().map(|x| x * r).collect())).collect();
    let samples: Vec<Result<Sample>> = exec::map_collect(cfg.exec, &points, |xi| {
        let q = symbol.eval(xi)?;
        let (smin, smax) = singular_extremes(&q);
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut deriv = Vec::new();
        if cfg.max_order >= 1 {
            let inv = q.clone().try_inverse();
            let g = symbol.grad(xi)?;
            let h = if cfg.max_order >= 2 { symbol.hess(xi)? } else { Vec::new() };
            for order in 1..=cfg.max_order {
                let worst = match &inv {
                    None => f64::INFINITY,
                    Some(inv) => multi_indices(n, order)
                        .iter()
                        .map(|a| {
                            let d = if order == 1 { &g[a[0]] } else { &h[a[0] * n + a[1]] };
                            op_norm(&(inv * d))
                        })
                        .fold(0.0, f64::max),
                };
                deriv.push(worst * r.powi(order as i32));
            }
        }
        Ok(Sample { r, smin, smax, deriv })
    });
    let samples: Vec<Sample> = samples.into_iter().collect::<Result<_>>()?;
    let lower: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.smin / s.r.powf(cfg.d0))).collect();
    let upper: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.smax / s.r.powf(cfg.d))).collect();
    let derivatives = (0..cfg.max_order)
        .map(|o| {
            let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.deriv[o])).collect();
            trend(&format!("derivative order {}", o + 1), &pts, true, cfg)
        })
        .collect();
    Ok(HypoReport {
        d: cfg.d,
        d0: cfg.d0,
        lower: trend("lower bound C1", &lower, false, cfg),
        upper: trend("upper bound C2", &upper, true, cfg),
        derivatives,
    })
}

/// sup over the grid of |(I + aΦ)^{-1}Φ|·log|ξ| per decade, with
/// a = (n-1)(log|ξ| - η/2), through the closed-form projection inverse.
pub fn projection_inverse_decay(n: usize, eta: f64, grid: &XiGrid) -> Result<ConstantTrend> {
    let dirs = grid.unit_directions(n);
    let mut pts = Vec::new();
    for r in grid.radii() {
        for u in &dirs {
            let xi = Covector::new(u.iter().map(|x| x * r).collect())?;
            let phi = phi_matrix(&xi);
            let a = (n as f64 - 1.0) * (r.ln() - eta / 2.0);
            let inv = inv_identity_plus_proj(a, &phi)?;
            pts.push((r, op_norm(&(inv * &phi)) * r.ln()));
        }
    }
    Ok(trend("|q^{-1}Φ| log|ξ|", &pts, true, &HypoConfig::new(0.0, 0.0)))
}

/// Principal square root of a symmetric positive definite sample.
pub fn symbol_sqrt(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(linalg::spd_sqrt_pair(q)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{eta_f64, normalized_symbol, positivity_radius, scalar_symbol, singular_phi_symbol, h_symbol};
    use rand::{Rng, SeedableRng};

    fn grid(r_min: f64) -> XiGrid {
        XiGrid { r_min, r_max: 1e6, per_decade: 6, directions: 4, seed: 11 }
    }

    #[test]
    fn laplacian_symbol_passes() {
        let q = scalar_symbol(3, 2.0, 1);
        let r = hypoellipticity_check(&q, &grid(1.0), &HypoConfig::new(2.0, 2.0)).unwrap();
        assert!(r.pass(), "{r:?}");
        assert!((r.lower.extreme - 1.0).abs() < 1e-12 && (r.upper.extreme - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_symbol_fails_lower_bound() {
        let q = singular_phi_symbol(3).unwrap();
        let r = hypoellipticity_check(&q, &grid(2.0), &HypoConfig { max_order: 0, ..HypoConfig::new(0.1, 0.0) }).unwrap();
        assert!(!r.lower.pass);
    }

    #[test]
    fn even_symbol_bounds_and_decay() {
        for n in [4, 6] {
            let rad = positivity_radius(n).unwrap();
            let g = grid(2.0 * rad);
            let q = h_symbol(n).unwrap();
            let mut cfg = HypoConfig::new(n as f64 + 0.1, n as f64);
            cfg.positivity_radius = Some(rad);
            cfg.max_order = 0;
            let r = hypoellipticity_check(&q, &g, &cfg).unwrap();
            assert!(r.bounds_pass(), "n={n}: {r:?}");
            let decay = projection_inverse_decay(n, eta_f64(n / 2).unwrap(), &g).unwrap();
            assert!(decay.pass, "{decay:?}");
            cfg.positivity_radius = Some(rad * 10.0);
            assert!(hypoellipticity_check(&q, &g, &cfg).is_err());
        }
    }

    #[test]
    fn normalized_symbol_derivative_constant_grows_like_log() {
        // On ker Φ the inverse is the identity, so the off-diagonal part of
        // ∂Φ scaled by log|ξ| is not damped.
        let q = normalized_symbol(4).unwrap();
        let g = grid(2.0 * positivity_radius(4).unwrap());
        let mut cfg = HypoConfig::new(0.1, 0.0);
        cfg.max_order = 1;
        let r = hypoellipticity_check(&q, &g, &cfg).unwrap();
        let d = &r.derivatives[0];
        assert!(d.slope > 0.01 && d.per_decade.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn square_roots() {
        let q = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 1.0])) * 9.0;
        let s = symbol_sqrt(&q).unwrap();
        assert!((s - DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![6.0, 3.0]))).amax() < 1e-14);
        assert!((symbol_sqrt(&DMatrix::identity(3, 3)).unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = DMatrix::from_fn(6, 6, |_, _| rng.gen_range(-1.0..1.0));
        let q = &a * a.transpose() + DMatrix::identity(6, 6);
        let s = symbol_sqrt(&q).unwrap();
        assert!((&s * &s - &q).amax() < 1e-12);
        // degree halving: sqrt(λ² q) = λ sqrt(q)
        let s2 = symbol_sqrt(&(&q * 100.0)).unwrap();
        assert!((s2 - s * 10.0).amax() < 1e-12);
        assert!(symbol_sqrt(&-DMatrix::<f64>::identity(2, 2)).is_err());
    }
}
