//! One function per subcommand. Each returns the process exit status.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use phasestep::analysis::STEADY_TOL;
use phasestep::output::{fmt_real, sweep_csv, trajectory_csv};
use phasestep::{
    adversarial_u0, classify, critical_step, order_estimate, simulate, sweep, ModelParams, OutcomeClass, SchemeId,
    StepConfig, SweepSpec,
};
use serde::Serialize;

use crate::args::{AdversarialArgs, Format, OrderArgs, ReproduceArgs, SimulateArgs, SweepArgs, TestId, ThresholdArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_REFUSED: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;

const THREADS_VAR: &str = "PHASESTEP_THREADS";

fn params(eps: f64) -> anyhow::Result<ModelParams> {
    let p = ModelParams::new(eps);
    p.validate()?;
    Ok(p)
}

/// Writes to `out`, or standard output when absent.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json(value: &impl Serialize) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Limit rounded to 1e-9, printed in shortest form (`1`, `-1`, `0.5`).
fn rounded(x: f64) -> String {
    let r = (x * 1e9).round() / 1e9;
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

pub fn simulate_cmd(a: &SimulateArgs) -> anyhow::Result<u8> {
    if a.format == Format::Table {
        bail!("simulate writes csv or json");
    }
    let p = params(a.eps)?;
    let c = StepConfig { h: a.h, force_unsafe: a.force.force_unsafe };
    let tr = simulate(a.scheme, a.u0, &p, &c, a.steps)?;
    let text = match a.format {
        Format::Json => json(&tr)?,
        _ => trajectory_csv(&tr),
    };
    emit(Some(&a.out), &text)?;
    let outcome = classify(&tr, STEADY_TOL);
    match outcome.limit {
        Some(l) if outcome.class != OutcomeClass::Diverged => println!("{} limit={}", outcome.class, rounded(l)),
        _ => println!("{}", outcome.class),
    }
    if tr.flags.multiplicity_seen {
        log::warn!("forced steps met several real roots; the nearest to u_prev was taken");
    }
    Ok(if outcome.class == OutcomeClass::Diverged { EXIT_DIVERGED } else { EXIT_OK })
}

fn extended(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.9e}")
    }
}

pub fn threshold_cmd(a: &ThresholdArgs) -> anyhow::Result<u8> {
    let p = params(a.eps)?;
    let reports: Vec<_> = a.scheme.0.iter().map(|&s| critical_step(s, a.u0, &p)).collect();
    let text = match a.format {
        Format::Json => json(&reports)?,
        Format::Csv => {
            let mut t = String::from("scheme,u0,eps,h_star,solvability,binding_case\n");
            for r in &reports {
                let case = serde_json::to_value(r.binding_case)?;
                let _ = writeln!(
                    t,
                    "{},{},{},{},{},{}",
                    r.scheme,
                    fmt_real(r.u0),
                    fmt_real(r.eps),
                    fmt_real(r.h_star),
                    fmt_real(r.solvability),
                    case.as_str().unwrap_or_default()
                );
            }
            t
        }
        Format::Table => {
            let mut t = format!(
                "{:<8} {:>10} {:>6} {:>16} {:>16}  {}\n",
                "scheme", "u0", "eps", "h_star", "solvability", "binding_case"
            );
            for r in &reports {
                let case = serde_json::to_value(r.binding_case)?;
                let _ = writeln!(
                    t,
                    "{:<8} {:>10} {:>6} {:>16} {:>16}  {}",
                    r.scheme.name(),
                    r.u0,
                    r.eps,
                    extended(r.h_star),
                    extended(r.solvability),
                    case.as_str().unwrap_or_default()
                );
            }
            t
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct AdversarialReport {
    scheme: SchemeId,
    eps: f64,
    h: f64,
    target: f64,
    u0: f64,
    first_step: f64,
}

pub fn adversarial_cmd(a: &AdversarialArgs) -> anyhow::Result<u8> {
    let p = params(a.eps)?;
    let c = StepConfig { h: a.h, force_unsafe: a.force.force_unsafe };
    let u0 = adversarial_u0(a.scheme, &p, &c, a.target)?;
    let first_step = a.scheme.step(u0, &p, &c)?.u;
    let r = AdversarialReport { scheme: a.scheme, eps: a.eps, h: a.h, target: a.target, u0, first_step };
    let text = match a.format {
        Format::Json => json(&r)?,
        Format::Csv => format!(
            "scheme,eps,h,target,u0,first_step\n{},{},{},{},{},{}\n",
            r.scheme,
            fmt_real(r.eps),
            fmt_real(r.h),
            fmt_real(r.target),
            fmt_real(r.u0),
            fmt_real(r.first_step)
        ),
        Format::Table => format!("{} u0={} first_step={}\n", r.scheme, fmt_real(u0), fmt_real(first_step)),
    };
    emit(a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

/// Largest `T / 2^k` not above `h*`, so that `T` is a whole number of steps.
fn default_h0(s: SchemeId, u0: f64, p: &ModelParams, t_end: f64) -> f64 {
    let h_star = critical_step(s, u0, p).h_star;
    let mut h = t_end;
    while h > h_star {
        h *= 0.5;
    }
    h
}

#[derive(Serialize)]
struct OrderReport {
    scheme: SchemeId,
    u0: f64,
    eps: f64,
    t_end: f64,
    levels: Vec<phasestep::OrderLevel>,
}

pub fn order_cmd(a: &OrderArgs) -> anyhow::Result<u8> {
    let p = params(a.eps)?;
    let mut reports = Vec::new();
    for &s in &a.scheme.0 {
        let h0 = a.h.unwrap_or_else(|| default_h0(s, a.u0, &p, a.t_end));
        let levels = order_estimate(s, a.u0, &p, a.t_end, h0, a.levels)?;
        reports.push(OrderReport { scheme: s, u0: a.u0, eps: a.eps, t_end: a.t_end, levels });
    }
    let text = match a.format {
        Format::Json => json(&reports)?,
        Format::Csv => {
            let mut t = String::from("scheme,h,steps,error,observed_order\n");
            for r in &reports {
                for l in &r.levels {
                    let order = l.observed_order.map(fmt_real).unwrap_or_default();
                    let _ = writeln!(t, "{},{},{},{},{order}", r.scheme, fmt_real(l.h), l.steps, fmt_real(l.error));
                }
            }
            t
        }
        Format::Table => {
            let mut t = format!("{:<8} {:>14} {:>8} {:>14} {:>8}\n", "scheme", "h", "steps", "error", "order");
            for r in &reports {
                for l in &r.levels {
                    let order = l.observed_order.map(|o| format!("{o:.4}")).unwrap_or_else(|| "-".into());
                    let _ = writeln!(
                        t,
                        "{:<8} {:>14.6e} {:>8} {:>14.6e} {:>8}",
                        r.scheme.name(),
                        l.h,
                        l.steps,
                        l.error,
                        order
                    );
                }
            }
            t
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn threads_from_env() -> Option<usize> {
    let raw = std::env::var(THREADS_VAR).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            log::warn!("ignoring {THREADS_VAR}={raw:?}; expected a positive integer");
            None
        }
    }
}

/// `sweep.csv` becomes `sweep_ee.csv` when several schemes share one `--out`.
fn per_scheme_path(out: &Path, s: SchemeId) -> PathBuf {
    let stem = out.file_stem().and_then(|x| x.to_str()).unwrap_or("sweep");
    let name = match out.extension().and_then(|x| x.to_str()) {
        Some(ext) => format!("{stem}_{s}.{ext}"),
        None => format!("{stem}_{s}"),
    };
    out.with_file_name(name)
}

pub fn sweep_cmd(a: &SweepArgs) -> anyhow::Result<u8> {
    if a.format == Format::Table {
        bail!("sweep writes csv or json");
    }
    let p = params(a.eps)?;
    let mut spec = SweepSpec::new(a.u0_range, a.h_range);
    spec.force_unsafe = a.force.force_unsafe;
    spec.threads = threads_from_env();
    let several = a.scheme.0.len() > 1;
    for &s in &a.scheme.0 {
        let grid = sweep(s, &spec, &p, a.steps)?;
        let text = match a.format {
            Format::Json => json(&grid)?,
            _ => sweep_csv(&grid),
        };
        let path = if several { per_scheme_path(&a.out, s) } else { a.out.clone() };
        emit(Some(&path), &text)?;
        let correct = grid.cells.iter().filter(|c| c.outcome.class.is_correct()).count();
        println!("{s}: {correct}/{} cells correct -> {}", grid.cells.len(), path.display());
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq)]
struct Case {
    scheme: SchemeId,
    u0: f64,
    h: f64,
    regime: &'static str,
    force_unsafe: bool,
}

/// Step sizes per scheme and start: just inside `h*`, between `h*` and the
/// solvability bound, and (forced) beyond a finite bound.
fn regime_cases(s: SchemeId, u0: f64, p: &ModelParams) -> Vec<Case> {
    let r = critical_step(s, u0, p);
    let (h_star, bound) = (r.h_star, r.solvability);
    let case = |h, regime, force_unsafe| Case { scheme: s, u0, h, regime, force_unsafe };
    let mut out = vec![case(0.999 * h_star, "safe", false)];
    if bound.is_infinite() {
        out.push(case(1.5 * h_star, "between", false));
    } else if h_star < bound {
        out.push(case((1.5 * h_star).min(0.5 * (h_star + bound)), "between", false));
    }
    if bound.is_finite() {
        out.push(case(1.5 * bound, "above", true));
    }
    out
}

fn reproduce_cases(test: TestId, p: &ModelParams) -> Vec<Case> {
    let (schemes, starts): (&[SchemeId], [f64; 2]) = match test {
        TestId::Test1 => (&[SchemeId::Ee, SchemeId::Ie], [0.5, 3.0]),
        TestId::Test2 => (&[SchemeId::Cn, SchemeId::ModCn, SchemeId::Im, SchemeId::CsModCn], [0.7, 3.0]),
    };
    let mut cases = Vec::new();
    for &s in schemes {
        for u0 in starts {
            cases.extend(regime_cases(s, u0, p));
        }
    }
    if test == TestId::Test1 {
        for (u0, h) in [(0.5, 0.005), (0.5, 0.0092), (3.0, 0.0015)] {
            cases.push(Case { scheme: SchemeId::Ee, u0, h, regime: "reference", force_unsafe: false });
        }
    }
    cases
}

#[derive(Serialize)]
struct ManifestCase {
    id: String,
    scheme: SchemeId,
    u0: f64,
    h: f64,
    regime: &'static str,
    force_unsafe: bool,
    #[serde(with = "phasestep::extended")]
    h_star: f64,
    #[serde(with = "phasestep::extended")]
    solvability: f64,
    file: Option<String>,
    class: OutcomeClass,
    limit: Option<f64>,
    steps: usize,
    first_crossing: Option<usize>,
    multiplicity_seen: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct Manifest {
    test: &'static str,
    eps: f64,
    max_steps: usize,
    cases: Vec<ManifestCase>,
}

pub fn reproduce_cmd(a: &ReproduceArgs) -> anyhow::Result<u8> {
    let p = params(0.1)?;
    let test = match a.test {
        TestId::Test1 => "test1",
        TestId::Test2 => "test2",
    };
    let dir = a.out.join(test);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut cases = Vec::new();
    for c in reproduce_cases(a.test, &p) {
        let id = match c.regime {
            "reference" => format!("{}_u0_{}_h_{}", c.scheme, c.u0, c.h),
            regime => format!("{}_u0_{}_{regime}", c.scheme, c.u0),
        };
        let r = critical_step(c.scheme, c.u0, &p);
        let cfg = StepConfig { h: c.h, force_unsafe: c.force_unsafe };
        let mut entry = ManifestCase {
            id: id.clone(),
            scheme: c.scheme,
            u0: c.u0,
            h: c.h,
            regime: c.regime,
            force_unsafe: c.force_unsafe,
            h_star: r.h_star,
            solvability: r.solvability,
            file: None,
            class: OutcomeClass::Undecided,
            limit: None,
            steps: 0,
            first_crossing: None,
            multiplicity_seen: false,
            error: None,
        };
        match simulate(c.scheme, c.u0, &p, &cfg, a.steps) {
            Ok(tr) => {
                let file = format!("{id}.csv");
                emit(Some(&dir.join(&file)), &trajectory_csv(&tr))?;
                let o = classify(&tr, STEADY_TOL);
                entry.file = Some(file);
                entry.class = o.class;
                entry.limit = o.limit;
                entry.steps = o.steps;
                entry.first_crossing = o.first_crossing;
                entry.multiplicity_seen = tr.flags.multiplicity_seen;
            }
            Err(e) => {
                entry.class = phasestep::Outcome::from_error(&e).class;
                entry.error = Some(e.to_string());
            }
        }
        println!("{:<28} h={:<12.6e} {}", entry.id, entry.h, entry.class);
        cases.push(entry);
    }
    let manifest = Manifest { test, eps: p.eps, max_steps: a.steps, cases };
    emit(Some(&dir.join("manifest.json")), &json(&manifest)?)?;
    Ok(EXIT_OK)
}
