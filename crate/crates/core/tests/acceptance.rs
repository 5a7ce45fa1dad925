//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dirac_hess::verify::{run_suite, Check, Suite, SuiteReport, VerifyConfig};

struct Outcome {
    id: usize,
    title: &'static str,
    pass: bool,
    summary: String,
}

fn timed(suite: Suite, cfg: &VerifyConfig) -> (SuiteReport, Duration) {
    let t = Instant::now();
    let r = run_suite(suite, cfg).unwrap_or_else(|e| panic!("suite {} errored: {e}", suite.name()));
    (r, t.elapsed())
}

fn describe(checks: &[&Check]) -> String {
    checks
        .iter()
        .map(|c| match c.measured {
            Some(m) => format!("{}={m:.3e}{}", c.name, if c.pass { "" } else { " (over)" }),
            None => format!("{}={}", c.name, if c.pass { "ok" } else { "failed" }),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn from_checks(id: usize, title: &'static str, checks: Vec<&Check>, extra: Option<(bool, String)>) -> Outcome {
    let mut pass = checks.iter().all(|c| c.pass);
    let mut summary = describe(&checks);
    if let Some((ok, note)) = extra {
        pass &= ok;
        summary = format!("{summary}; {note}");
    }
    Outcome { id, title, pass, summary }
}

fn main() -> ExitCode {
    let cfg = VerifyConfig::default();
    let mut out = Vec::new();

    let (t1, t1_time) = timed(Suite::HessianSymbol, &cfg);
    let c1 = t1.check("assembled-vs-closed-form").expect("check present");
    out.push(from_checks(
        1,
        "closed form of the Hessian symbol",
        vec![c1],
        Some((t1_time < Duration::from_secs(60), format!("runtime {:.1}s (limit 60s)", t1_time.as_secs_f64()))),
    ));

    let (ct, _) = timed(Suite::CliffordTraces, &cfg);
    out.push(from_checks(2, "Clifford trace identities", ct.checks.iter().collect(), None));

    out.push(from_checks(3, "first part of the split vanishes", vec![t1.check("u1-vanishes").expect("check present")], None));

    let (pr, _) = timed(Suite::Projections, &cfg);
    out.push(from_checks(4, "projection symbols", pr.checks.iter().collect(), None));

    let (gl, _) = timed(Suite::Gammalemma, &cfg);
    out.push(from_checks(5, "Gamma-factor constants", gl.checks.iter().collect(), None));

    let (fa, _) = timed(Suite::Factorization, &cfg);
    let (hy, _) = timed(Suite::Hypoellipticity, &cfg);
    let failing: Vec<&Check> = fa.checks.iter().chain(&hy.checks).filter(|c| !c.pass).collect();
    for c in &failing {
        println!("    criterion 6 detail: {} -> {}", c.name, c.detail);
    }
    out.push(from_checks(6, "factorization, positivity and hypoellipticity", fa.checks.iter().chain(&hy.checks).collect(), None));

    let (sm, sm_time) = timed(Suite::SpectrumModel, &cfg);
    out.push(from_checks(
        7,
        "spectra of model operators",
        sm.checks.iter().collect(),
        Some((sm_time < Duration::from_secs(300), format!("runtime {:.1}s (limit 300s)", sm_time.as_secs_f64()))),
    ));

    let (sz, _) = timed(Suite::SphereZeta, &cfg);
    out.push(from_checks(8, "sphere zeta and determinants", sz.checks.iter().collect(), None));

    let (iso, _) = timed(Suite::Isospectral, &cfg);
    out.push(from_checks(9, "torus isospectrality", iso.checks.iter().collect(), None));

    for o in &out {
        println!("criterion {} [{}] {}: {}", o.id, if o.pass { "PASS" } else { "FAIL" }, o.title, o.summary);
    }
    let failed = out.iter().filter(|o| !o.pass).count();
    println!("acceptance: {} of {} criteria pass", out.len() - failed, out.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
