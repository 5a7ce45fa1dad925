use std::collections::BTreeMap;
use std::io::{self, Write};
use std::process::ExitCode;
use std::sync::Arc;

use dirac_hess::clifford::GammaRep;
use dirac_hess::dirac_variation::CoeffTensor;
use dirac_hess::fiber::{Covector, SymTensor};
use dirac_hess::hessian::{c_factor, in_validity_strip, u_assembled, u_closed_form, u_parts};
use dirac_hess::spectral_model::{build_collocation, build_multiplier, spectrum, Embedded, ModelOperator, TrigSymbol};
use dirac_hess::sphere_zeta::pattern_table;
use dirac_hess::stability::{h_symbol, leading_constant};
use dirac_hess::verify::{log_symbol, parse_suites, run_suites, Suite, SuiteReport, VerifyConfig};
use dirac_hess::Exec;
use clap::ValueEnum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::output::{opt, sink, write_csv, write_json};
use crate::{Cli, Command, Format, ModelKind, SpectraArgs, SymbolArgs, TableArgs, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] dirac_hess::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Stream(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub fn suite_name(s: &str) -> Result<String, String> {
    if s == "all" || Suite::from_name(s).is_some() {
        Ok(s.to_string())
    } else {
        let known: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
        Err(format!("unknown suite; expected `all` or one of {}", known.join(", ")))
    }
}

pub fn tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.parse().map_err(|e| format!("bad tolerance value: {e}"))?;
    if !(v > 0.0) || !v.is_finite() {
        return Err(format!("tolerance must be positive and finite, got {v}"));
    }
    Ok((name.to_string(), v))
}

pub fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match &cli.command {
        Command::Verify(a) => verify(a, exec),
        Command::Table(a) => table(a, exec),
        Command::Symbol(a) => symbol(a, exec),
        Command::Spectra(a) => spectra(a, exec),
    }
}

#[derive(Debug, Serialize)]
struct VerifyBody<'a> {
    seed: u64,
    pass: bool,
    suites: &'a [SuiteReport],
}

#[derive(Debug, Serialize)]
struct CheckRow<'a> {
    suite: &'a str,
    check: &'a str,
    measured: Option<f64>,
    tolerance: Option<f64>,
    pass: bool,
    detail: &'a str,
}

fn verify(a: &VerifyArgs, exec: Exec) -> Result<ExitCode, CliError> {
    let suites = parse_suites(&a.suite).map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = VerifyConfig { seed: a.seed, exec, tolerances: a.tolerances.iter().cloned().collect::<BTreeMap<_, _>>() };
    let reports = run_suites(&suites, &cfg)?;
    let pass = reports.iter().all(SuiteReport::pass);
    let mut w = sink(a.out.output.as_deref())?;
    match a.out.format {
        Format::Json => write_json(&mut *w, "verify", VerifyBody { seed: a.seed, pass, suites: &reports })?,
        Format::Csv => {
            let rows: Vec<CheckRow> = reports
                .iter()
                .flat_map(|r| {
                    r.checks.iter().map(|c| CheckRow {
                        suite: r.suite.name(),
                        check: &c.name,
                        measured: c.measured,
                        tolerance: c.tolerance,
                        pass: c.pass,
                        detail: &c.detail,
                    })
                })
                .collect();
            write_csv(&mut *w, &rows)?;
        }
        Format::Text => {
            writeln!(w, "seed {}", a.seed)?;
            for r in &reports {
                writeln!(w, "{} [{}]", r.suite.name(), verdict(r.pass()))?;
                for c in &r.checks {
                    write!(w, "  {:<6} {:<48} measured {:>10}  tol {:>10}", verdict(c.pass), c.name, opt(c.measured), opt(c.tolerance))?;
                    if !c.detail.is_empty() {
                        write!(w, "  {}", c.detail)?;
                    }
                    writeln!(w)?;
                }
            }
            writeln!(w, "overall [{}]", verdict(pass))?;
        }
    }
    w.flush()?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// One row of the sphere determinant table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub extremal_type: String,
    pub sign_logdet: i32,
    pub logdet: f64,
    pub det: f64,
}

#[derive(Debug, Serialize)]
struct TableBody {
    rows: Vec<TableRow>,
}

fn table(a: &TableArgs, exec: Exec) -> Result<ExitCode, CliError> {
    let rows: Vec<TableRow> = pattern_table(a.nmax as usize, exec)?
        .into_iter()
        .map(|r| TableRow { n: r.n, extremal_type: r.extremal_type.label().to_string(), sign_logdet: r.sign_logdet, logdet: r.log_det, det: r.det })
        .collect();
    let mut w = sink(a.out.output.as_deref())?;
    match a.out.format {
        Format::Json => write_json(&mut *w, "table", TableBody { rows })?,
        Format::Csv => write_csv(&mut *w, &rows)?,
        Format::Text => {
            writeln!(w, "{:>3}  {:<10} {:>5} {:>16} {:>16}", "n", "type", "sign", "log det", "det")?;
            for r in &rows {
                writeln!(w, "{:>3}  {:<10} {:>5} {:>16.9e} {:>16.9e}", r.n, r.extremal_type, sign(r.sign_logdet), r.logdet, r.det)?;
            }
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn sign(s: i32) -> &'static str {
    if s >= 0 {
        "+"
    } else {
        "-"
    }
}

#[derive(Debug, Serialize)]
struct SymbolRecord {
    n: usize,
    s_re: f64,
    s_im: f64,
    volume: f64,
    assembled_re: f64,
    assembled_im: f64,
    closed_form_re: f64,
    closed_form_im: f64,
    parts_re: f64,
    parts_im: f64,
    /// |assembled - closed| over the larger of the two values and the
    /// natural size |C(s)| dim_e/4 |ξ|^{n-2 Re s} |k|².
    relative_deviation: f64,
}

fn usage(e: dirac_hess::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn symbol(a: &SymbolArgs, exec: Exec) -> Result<ExitCode, CliError> {
    let n = a.n;
    let s = Complex64::new(a.s, a.s_im);
    if n < 2 {
        return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
    }
    if !in_validity_strip(n, s) {
        return Err(CliError::Usage(format!(
            "s = {s} lies outside the validity strip Re s < n/2 - 1 = {} of the closed form",
            n as f64 / 2.0 - 1.0
        )));
    }
    if a.k.len() != n * n {
        return Err(CliError::Usage(format!("--k needs {} entries (row-major {n}x{n}), got {}", n * n, a.k.len())));
    }
    let xi = Covector::new(a.xi.clone().unwrap_or_else(|| {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    }))
    .map_err(usage)?;
    if xi.n() != n {
        return Err(CliError::Usage(format!("--xi needs {n} entries, got {}", xi.n())));
    }
    let rows: Vec<Vec<f64>> = a.k.chunks(n).map(<[f64]>::to_vec).collect();
    let k = SymTensor::from_rows(&rows).map_err(usage)?;
    if !(a.volume > 0.0) {
        return Err(CliError::Usage(format!("volume must be positive, got {}", a.volume)));
    }
    let rep = GammaRep::new(n).map_err(usage)?;
    let coeffs = CoeffTensor::new(&rep);
    let assembled = u_assembled(&rep, &coeffs, &k, &xi, s, a.volume, exec).map_err(usage)?.value;
    let vol = ((2.0 * s - n as f64) / n as f64 * a.volume.ln()).exp();
    let closed = u_closed_form(n, s, &xi, &k).map_err(usage)? * vol;
    let parts = c_factor(n, s).map_err(usage)? * u_parts(&rep, &k, &xi, s).map_err(usage)?.sum() * vol;
    let scale = c_factor(n, s).map_err(usage)?.norm() * vol.norm() * rep.dim_e() as f64 / 4.0
        * xi.norm().powf(n as f64 - 2.0 * s.re)
        * k.norm().powi(2);
    let denom = assembled.norm().max(closed.norm()).max(scale);
    let dev = if denom > 0.0 { (assembled - closed).norm() / denom } else { 0.0 };
    let rec = SymbolRecord {
        n,
        s_re: s.re,
        s_im: s.im,
        volume: a.volume,
        assembled_re: assembled.re,
        assembled_im: assembled.im,
        closed_form_re: closed.re,
        closed_form_im: closed.im,
        parts_re: parts.re,
        parts_im: parts.im,
        relative_deviation: dev,
    };
    let mut w = sink(a.out.output.as_deref())?;
    match a.out.format {
        Format::Json => write_json(&mut *w, "symbol", &rec)?,
        Format::Csv => write_csv(&mut *w, &[&rec])?,
        Format::Text => {
            writeln!(w, "n = {n}, s = {s}, volume = {}", a.volume)?;
            writeln!(w, "assembled    {:+.15e} {:+.15e}i", assembled.re, assembled.im)?;
            writeln!(w, "closed form  {:+.15e} {:+.15e}i", closed.re, closed.im)?;
            writeln!(w, "four parts   {:+.15e} {:+.15e}i", parts.re, parts.im)?;
            writeln!(w, "relative deviation {dev:.3e}")?;
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    cut: usize,
    size: usize,
    negative_count: usize,
    lower_bound: f64,
    hermitization_residual: f64,
    lowest: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct SpectrumCsvRow {
    cut: usize,
    size: usize,
    negative_count: usize,
    lower_bound: f64,
    hermitization_residual: f64,
    /// Space-separated.
    lowest: String,
}

#[derive(Debug, Serialize)]
struct SpectraBody<'a> {
    model: &'a str,
    rows: Vec<SpectrumRow>,
}

fn model_operator(a: &SpectraArgs, cut: usize) -> Result<(ModelOperator, f64), CliError> {
    Ok(match a.model {
        ModelKind::LogMultiplier => (build_multiplier(&log_symbol(), cut)?, 1.0),
        ModelKind::LogCollocation => {
            let q = TrigSymbol::new(Arc::new(log_symbol()))?.add_cos(1, a.potential, DMatrix::identity(1, 1))?;
            (build_collocation(&q, cut)?, 1.0)
        }
        ModelKind::Stability => {
            let n = a.n;
            let h = h_symbol(n).map_err(usage)?;
            let dir = vec![1.0 / (n as f64).sqrt(); n];
            (build_multiplier(&Embedded { inner: h, frame: vec![dir] }, cut)?, leading_constant(n)?.abs())
        }
    })
}

fn spectra(a: &SpectraArgs, exec: Exec) -> Result<ExitCode, CliError> {
    if a.cuts.is_empty() || a.cuts.contains(&0) {
        return Err(CliError::Usage("--cuts must list positive mode cuts".into()));
    }
    let mut rows = Vec::new();
    for &cut in &a.cuts {
        let (op, scale) = model_operator(a, cut)?;
        let rep = spectrum(&op, exec)?;
        rows.push(SpectrumRow {
            cut,
            size: op.size(),
            negative_count: rep.negative_count,
            lower_bound: rep.lower_bound / scale,
            hermitization_residual: op.hermitization_residual,
            lowest: rep.eigenvalues.iter().take(a.lowest).map(|v| v / scale).collect(),
        });
    }
    let model = a.model.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut w = sink(a.out.output.as_deref())?;
    match a.out.format {
        Format::Json => write_json(&mut *w, "spectra", SpectraBody { model: &model, rows })?,
        Format::Csv => {
            let flat: Vec<SpectrumCsvRow> = rows
                .into_iter()
                .map(|r| SpectrumCsvRow {
                    cut: r.cut,
                    size: r.size,
                    negative_count: r.negative_count,
                    lower_bound: r.lower_bound,
                    hermitization_residual: r.hermitization_residual,
                    lowest: r.lowest.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(" "),
                })
                .collect();
            write_csv(&mut *w, &flat)?;
        }
        Format::Text => {
            writeln!(w, "model {model}")?;
            for r in &rows {
                let low: Vec<String> = r.lowest.iter().map(|v| format!("{v:.6}")).collect();
                writeln!(w, "N = {:>4}  size {:>5}  negative {:>3}  lower bound {:.9}  lowest [{}]", r.cut, r.size, r.negative_count, r.lower_bound, low.join(", "))?;
            }
        }
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}
