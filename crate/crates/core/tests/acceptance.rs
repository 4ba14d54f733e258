//! Acceptance criteria for the library, one line per criterion.
//!
//! Run with `cargo test -p phasestep --test acceptance -- --nocapture`
//! (the harness prints regardless of capture since it is a plain binary).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use phasestep::analysis::{simulate, DEFAULT_SWEEP_STEPS, STEADY_TOL};
use phasestep::cubic::solve_monotone_cubic;
use phasestep::thresholds::{inside_well_threshold, outside_well_threshold};
use phasestep::{
    adversarial_u0, audit_energy, audit_monotone, classify, critical_step, order_estimate, sweep, Axis, ModelParams,
    OutcomeClass, SchemeId, StepConfig, SweepSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Independent transcription of the threshold table. Outside the well each
/// entry has the form `num * eps^2 / (a^2 + b a + d)` with `a = |u0|`.
fn table_formula(s: SchemeId, u0: f64, eps: f64) -> f64 {
    let e2 = eps * eps;
    let a = u0.abs();
    if a < 1.0 {
        let c = match s {
            SchemeId::Ee => 0.5,
            SchemeId::CsModCn => 2.0,
            _ => 1.0,
        };
        return c * e2;
    }
    let (num, b, d) = match s {
        SchemeId::Ee => (1.0, 1.0, 0.0),
        SchemeId::Ie => return e2,
        SchemeId::Cn => (2.0, 1.0, 0.0),
        SchemeId::ModCn => (4.0, 2.0, 1.0),
        SchemeId::Im => (8.0, 4.0, 3.0),
        SchemeId::CsModCn => (4.0, 2.0, -1.0),
    };
    num * e2 / (a * a + b * a + d)
}

fn criterion_1() -> Check {
    let mut n = 0;
    for eps in [0.1, 0.25] {
        let p = ModelParams::new(eps);
        for u0 in [0.3, 0.7, 1.5, 3.0, 10.0] {
            for s in SchemeId::ALL {
                let got = critical_step(s, u0, &p).h_star;
                let want = table_formula(s, u0, eps);
                ensure((got - want).abs() <= 1e-15 * want, || format!("{s} u0={u0} eps={eps}: {got:e} vs {want:e}"))?;
                n += 1;
            }
        }
    }
    let ee = critical_step(SchemeId::Ee, 3.0, &ModelParams::new(0.1)).h_star;
    ensure((ee - 0.01 / 12.0).abs() <= 1e-15 * ee, || format!("EE u0=3: {ee:e}"))?;
    ensure(format!("{ee:.4}") == "0.0008", || format!("EE u0=3 rounds to {ee:.4}"))?;
    Ok(format!("{n} formulas exact; EE(u0=3) h* = {ee:.6e}"))
}

fn criterion_2() -> Check {
    let p = ModelParams::new(0.1);
    let mut worst: f64 = 0.0;
    for s in SchemeId::ALL {
        for u0 in [0.5, 0.7, 3.0] {
            let h = 0.999 * critical_step(s, u0, &p).h_star;
            let tr = simulate(s, u0, &p, &StepConfig::new(h), 1_000_000).map_err(|e| e.to_string())?;
            let o = classify(&tr, STEADY_TOL);
            let dev = (o.limit.unwrap_or(f64::NAN) - 1.0).abs();
            ensure(o.class == OutcomeClass::MonotoneCorrect && dev < 1e-6, || {
                format!("{s} u0={u0} h={h:e}: {:?} limit {:?}", o.class, o.limit)
            })?;
            worst = worst.max(dev);
        }
    }
    Ok(format!("18 runs MonotoneCorrect, max |limit - 1| = {worst:.1e}"))
}

fn criterion_3() -> Check {
    let p = ModelParams::new(0.1);
    let tr = simulate(SchemeId::Ee, 3.0, &p, &StepConfig::new(0.0015), 1_000_000).map_err(|e| e.to_string())?;
    let u1 = tr.states[1].u;
    ensure((u1 + 0.6).abs() < 1e-12, || format!("u1 = {u1}"))?;
    let o = classify(&tr, STEADY_TOL);
    ensure(o.class == OutcomeClass::WrongEquilibrium, || format!("class {:?}", o.class))?;
    let lim = o.limit.unwrap_or(f64::NAN);
    ensure((lim + 1.0).abs() < STEADY_TOL, || format!("limit {lim}"))?;
    Ok(format!("u1 = {u1:.15}, WrongEquilibrium limit {lim}"))
}

fn criterion_4() -> Check {
    let p = ModelParams::new(0.1);
    for h in [1e-3, 1e-2, 1e-1] {
        let c = StepConfig::new(h);
        let u0 = adversarial_u0(SchemeId::Ee, &p, &c, -1.0).map_err(|e| e.to_string())?;
        ensure(u0 > 1.0, || format!("h={h}: u0 = {u0}"))?;
        let tr = simulate(SchemeId::Ee, u0, &p, &c, 1000).map_err(|e| e.to_string())?;
        for st in &tr.states[1..] {
            ensure((st.u + 1.0).abs() < 1e-12, || format!("h={h}: u = {} at t = {}", st.u, st.t))?;
        }
        let o = classify(&tr, STEADY_TOL);
        ensure(o.class == OutcomeClass::WrongEquilibrium, || format!("h={h}: {:?}", o.class))?;
    }
    let golden = 0.5 * (1.0 + 5f64.sqrt());
    let u0 = adversarial_u0(SchemeId::Ee, &p, &StepConfig::new(p.eps2()), -1.0).map_err(|e| e.to_string())?;
    ensure((u0 - golden).abs() < 1e-10, || format!("h=eps^2: {u0} vs {golden}"))?;
    Ok(format!("3 step sizes land on -1; h = eps^2 gives u0 = {u0:.12}"))
}

fn criterion_5() -> Check {
    let p = ModelParams::new(0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_917);
    let samples: Vec<f64> = (0..50).map(|_| rng.gen_range(-50.0..=50.0)).collect();
    let c = StepConfig::new(p.eps2());
    for &u0 in &samples {
        let tr = simulate(SchemeId::Ie, u0, &p, &c, 1_000_000).map_err(|e| e.to_string())?;
        let o = classify(&tr, STEADY_TOL);
        ensure(o.class == OutcomeClass::MonotoneCorrect, || format!("IE u0={u0}: {:?}", o.class))?;
    }
    let mut witnesses = Vec::new();
    for s in [SchemeId::Cn, SchemeId::ModCn, SchemeId::Im, SchemeId::CsModCn] {
        let c = StepConfig::new(inside_well_threshold(s, &p));
        let mut found = None;
        for &u0 in &samples {
            let tr = simulate(s, u0, &p, &c, 1_000_000).map_err(|e| e.to_string())?;
            let o = classify(&tr, STEADY_TOL);
            if o.class != OutcomeClass::MonotoneCorrect {
                found = Some((u0, o.class));
                break;
            }
        }
        let (u0, class) = found.ok_or_else(|| format!("{s}: every sample MonotoneCorrect"))?;
        witnesses.push(format!("{s}@{u0:.2}->{class}"));
    }
    Ok(format!("IE 50/50 MonotoneCorrect; counterexamples {}", witnesses.join(", ")))
}

fn criterion_6() -> Check {
    let p = ModelParams::new(0.1);
    for s in [SchemeId::Ee, SchemeId::Cn, SchemeId::Im] {
        for u0 in [0.5, 0.7, 3.0] {
            let h = 0.999 * critical_step(s, u0, &p).h_star;
            let tr = simulate(s, u0, &p, &StepConfig::new(h), 1_000_000).map_err(|e| e.to_string())?;
            let a = audit_energy(&tr);
            ensure(a.original_non_increasing, || {
                format!("{s} u0={u0}: energy rises at step {:?}", a.first_original_violation)
            })?;
        }
    }
    let tr = simulate(SchemeId::Cn, 0.7, &p, &StepConfig::new(0.015), 1_000_000).map_err(|e| e.to_string())?;
    let a = audit_energy(&tr);
    let m = a.modified.as_ref().ok_or("CN has no modified energy")?;
    ensure(m.non_increasing, || format!("CN modified energy rises at step {:?}", m.first_violation))?;
    let mono = audit_monotone(&tr);
    ensure(!mono.is_clean(), || "CN at h = 0.015 unexpectedly monotone".into())?;
    for u0 in [0.5, 0.7, 3.0] {
        let tr = simulate(SchemeId::CsModCn, u0, &p, &StepConfig::new(1.0), 1_000_000).map_err(|e| e.to_string())?;
        ensure(tr.steps() >= 1 && !tr.flags.overflow, || format!("CS-modCN u0={u0} failed to step"))?;
        let a = audit_energy(&tr);
        ensure(a.original_non_increasing, || {
            format!("CS-modCN u0={u0}: energy rises at {:?}", a.first_original_violation)
        })?;
    }
    Ok(format!(
        "9 safe runs energy-stable; CN h=0.015 modified stable, non-monotone at step {:?}; CS-modCN h=1 stable",
        mono.first_violation
    ))
}

/// Checks the finest-level observed order; coarser levels are pre-asymptotic
/// for the first-order schemes at this setup.
fn criterion_7() -> Check {
    let p = ModelParams::new(0.25);
    let mut summary = Vec::new();
    let mut misses = Vec::new();
    for s in SchemeId::ALL {
        let (want, tol) = if s.order() == 1 { (1.0, 0.15) } else { (2.0, 0.2) };
        let levels = order_estimate(s, 0.5, &p, 0.25, 2f64.powi(-6), 4).map_err(|e| e.to_string())?;
        let orders: Vec<f64> = levels.iter().filter_map(|l| l.observed_order).collect();
        ensure(orders.len() == 3, || format!("{s}: {} orders", orders.len()))?;
        let last = orders[2];
        summary.push(format!("{s} {last:.3}"));
        if (last - want).abs() > tol {
            misses.push(format!("{s} observed {last:.3}, expected {want} +- {tol}"));
        }
    }
    if misses.is_empty() {
        Ok(summary.join(", "))
    } else {
        Err(format!("{} (all: {})", misses.join("; "), summary.join(", ")))
    }
}

fn criterion_8() -> Check {
    let p = ModelParams::new(0.1);
    let spec = SweepSpec::new(Axis::linear(1.1, 4.0, 30), Axis::log(1e-4, 1e-2, 40));
    let grid = sweep(SchemeId::Ee, &spec, &p, DEFAULT_SWEEP_STEPS).map_err(|e| e.to_string())?;
    let hs = spec.h.values();
    let u0s = spec.u0.values();
    let mut hits = 0;
    for (i, &u0) in u0s.iter().enumerate() {
        let h_star = outside_well_threshold(SchemeId::Ee, u0, &p);
        let expected = hs.iter().filter(|&&h| h <= h_star).count();
        let observed =
            grid.row(i).iter().position(|c| c.outcome.class != OutcomeClass::MonotoneCorrect).unwrap_or(hs.len());
        if observed.abs_diff(expected) <= 1 {
            hits += 1;
        }
    }
    let frac = hits as f64 / u0s.len() as f64;
    ensure(frac >= 0.9, || format!("{hits}/{} columns within one cell", u0s.len()))?;
    Ok(format!("{hits}/{} u0 columns within one cell of h*(u0)", u0s.len()))
}

fn criterion_9() -> Check {
    let mut checked = 0usize;
    for eps in [0.1, 0.25] {
        let p = ModelParams::new(eps);
        for s in SchemeId::ALL {
            let bound = s.solvability_bound(&p);
            let hs: Vec<f64> = if bound.is_finite() {
                (1..=10).map(|j| bound * j as f64 / 10.0).collect()
            } else {
                vec![1e-4, 1e-3, 0.5 * p.eps2(), p.eps2(), 2.0 * p.eps2(), 0.1, 1.0, 10.0]
            };
            for &h in &hs {
                let c = StepConfig::new(h);
                for fixed in [-1.0, 0.0, 1.0] {
                    let u = s.step(fixed, &p, &c).map_err(|e| e.to_string())?.u;
                    ensure((u - fixed).abs() <= 1e-12, || format!("{s} h={h}: {fixed} -> {u}"))?;
                }
                // Odd symmetry and certificates on u in [-5, 5].
                for k in 0..=100 {
                    let q = -5.0 + 0.1 * k as f64;
                    let up = s.step(q, &p, &c).map_err(|e| e.to_string())?.u;
                    let um = s.step(-q, &p, &c).map_err(|e| e.to_string())?.u;
                    ensure((up + um).abs() <= 1e-12 * up.abs().max(1.0), || format!("{s} h={h} q={q}: {up} vs {um}"))?;
                    let Some(r) = s.residual(q, &p, h) else { continue };
                    let res = r.eval(up).abs();
                    let limit = 1e-12 * q.abs().max(1.0);
                    ensure(res < limit, || format!("{s} h={h} q={q}: residual {res:e}"))?;
                    if h <= bound {
                        let sol = solve_monotone_cubic(&r, q).map_err(|e| e.to_string())?;
                        let lo = sol.bracket.0.min(q).min(up);
                        let hi = sol.bracket.1.max(q).max(up);
                        for j in 0..257 {
                            let x = lo + (hi - lo) * j as f64 / 256.0;
                            let d = r.derivative(x);
                            ensure(d >= -1e-12, || format!("{s} h={h} q={q}: r'({x}) = {d:e}"))?;
                        }
                        ensure(r.derivative(up) >= -1e-12, || format!("{s}: r'(root) < 0"))?;
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} steps: fixed points, odd symmetry, residual and uniqueness certificates"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 threshold table", criterion_1, Duration::from_secs(1)),
        ("2 safe-side monotone convergence", criterion_2, Duration::from_secs(10)),
        ("3 wrong-equilibrium reproduction", criterion_3, Duration::from_secs(1)),
        ("4 adversarial initial values", criterion_4, Duration::from_secs(1)),
        ("5 implicit Euler universality", criterion_5, Duration::from_secs(10)),
        ("6 energy audits", criterion_6, Duration::from_secs(5)),
        ("7 convergence order", criterion_7, Duration::from_secs(5)),
        ("8 sweep boundary tracking", criterion_8, Duration::from_secs(60)),
        ("9 fixed points and symmetry", criterion_9, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(detail) if elapsed <= budget => format!("PASS  {name} ({elapsed:.2?}): {detail}"),
            Ok(detail) => {
                failed += 1;
                format!("FAIL  {name}: over budget {elapsed:.2?} > {budget:?} ({detail})")
            }
            Err(why) => {
                failed += 1;
                format!("FAIL  {name} ({elapsed:.2?}): {why}")
            }
        };
        println!("{verdict}");
    }
    if failed == 0 {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
