//! Trajectories and what can be said about them.
//!
//! [`simulate`] iterates a scheme until it settles on an equilibrium, runs
//! out of steps or overflows. The remaining operations only read the
//! resulting [`Trajectory`].

mod adversarial;
mod audit;
mod classify;
mod order;
mod sweep;

pub use adversarial::adversarial_u0;
pub use audit::{audit_energy, audit_monotone, EnergyAudit, ModifiedEnergyAudit, MonotoneAudit};
pub use classify::{classify, Outcome, OutcomeClass};
pub use order::{order_estimate, OrderLevel};
pub use sweep::{sweep, Axis, Spacing, SweepCell, SweepGrid, SweepSpec};

use serde::{Deserialize, Serialize};

use crate::cubic::SolveError;
use crate::model::{energy, f, EnergyRecord, ModelParams, State};
use crate::schemes::{SchemeId, StepConfig};
use crate::Error;

/// Early-stop tolerance on `|u_n - u_{n-1}| / h` and `|f(u_n)|`.
pub const STOP_TOL: f64 = 1e-10;
/// Distance to an equilibrium accepted as "converged to it".
pub const STEADY_TOL: f64 = 1e-6;
/// Default per-cell step budget for sweeps.
pub const DEFAULT_SWEEP_STEPS: usize = 100_000;

/// Differences at or below a few ulps of the magnitude involved are
/// rounding noise, not increments or crossings.
#[inline]
pub(crate) fn noise_floor(a: f64, b: f64) -> f64 {
    4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryFlags {
    /// Implicit steps were taken beyond the solvability bound.
    pub forced_unsafe: bool,
    /// Some forced step had several real roots to choose from.
    pub multiplicity_seen: bool,
    /// The iteration left the representable range and was truncated.
    pub overflow: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Steady,
    MaxSteps,
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub scheme: SchemeId,
    pub params: ModelParams,
    pub h: f64,
    pub states: Vec<State>,
    pub energies: Vec<EnergyRecord>,
    pub flags: TrajectoryFlags,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn u0(&self) -> f64 {
        self.states[0].u
    }

    pub fn last_u(&self) -> f64 {
        self.states.last().expect("trajectory is never empty").u
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(|s| s.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    pub max_steps: usize,
    pub stop_tol: f64,
}

impl SimulateOptions {
    pub fn new(max_steps: usize) -> Self {
        Self { max_steps, stop_tol: STOP_TOL }
    }
}

/// Runs `s` from `u0` with fixed step `c.h` for at most `max_steps` steps.
pub fn simulate(s: SchemeId, u0: f64, p: &ModelParams, c: &StepConfig, max_steps: usize) -> Result<Trajectory, Error> {
    simulate_with(s, u0, p, c, &SimulateOptions::new(max_steps))
}

pub fn simulate_with(
    s: SchemeId,
    u0: f64,
    p: &ModelParams,
    c: &StepConfig,
    opts: &SimulateOptions,
) -> Result<Trajectory, Error> {
    p.validate()?;
    c.validate()?;
    if opts.max_steps == 0 {
        return Err(Error::InvalidParams("max_steps must be at least 1".into()));
    }
    if !u0.is_finite() {
        return Err(Error::InvalidParams(format!("u0 must be finite, got {u0}")));
    }
    let bound = s.solvability_bound(p);
    if c.h > bound && !c.force_unsafe {
        return Err(Error::SolverRefused { scheme: s, h: c.h, bound });
    }

    let h = c.h;
    let mut flags = TrajectoryFlags { forced_unsafe: c.h > bound, ..Default::default() };
    let mut states = vec![State { u: u0, t: 0.0 }];
    let mut energies = vec![EnergyRecord { original: energy(u0, p), modified: s.modified_energy(u0, None, p, h) }];
    let mut stop = StopReason::MaxSteps;
    let mut prev = u0;

    for n in 1..=opts.max_steps {
        let step = match s.step(prev, p, c) {
            Ok(step) => step,
            Err(Error::Overflow) | Err(Error::Solve(SolveError::NoBracket { .. })) => {
                log::debug!("{s}: overflow at step {n} from u = {prev}");
                flags.overflow = true;
                stop = StopReason::Overflow;
                break;
            }
            Err(e) => return Err(e),
        };
        let u = step.u;
        flags.multiplicity_seen |= step.multiple_roots;
        states.push(State { u, t: n as f64 * h });
        energies.push(EnergyRecord { original: energy(u, p), modified: s.modified_energy(u, Some(prev), p, h) });
        let incr = (u - prev).abs();
        if incr < (opts.stop_tol * h).max(noise_floor(u, prev)) && f(u).abs() < opts.stop_tol {
            stop = StopReason::Steady;
            break;
        }
        prev = u;
    }

    Ok(Trajectory { scheme: s, params: *p, h, states, energies, flags, stop })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: ModelParams = ModelParams { eps: 0.1 };

    #[test]
    fn times_are_exact_multiples() {
        let tr = simulate(SchemeId::Ie, 3.0, &P, &StepConfig::new(0.003), 50).unwrap();
        for (n, st) in tr.states.iter().enumerate() {
            assert_eq!(st.t, n as f64 * 0.003);
        }
        assert_eq!(tr.states.len(), tr.energies.len());
    }

    #[test]
    fn explicit_euler_safe_step_increases_to_one() {
        let tr = simulate(SchemeId::Ee, 0.5, &P, &StepConfig::new(0.005), 10_000).unwrap();
        assert_eq!(tr.stop, StopReason::Steady);
        let u: Vec<f64> = tr.values().collect();
        assert!(u.windows(2).all(|w| w[1] >= w[0]));
        assert!((tr.last_u() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn implicit_euler_decreases_to_one() {
        let tr = simulate(SchemeId::Ie, 3.0, &P, &StepConfig::new(0.01), 10_000).unwrap();
        assert_eq!(tr.stop, StopReason::Steady);
        let u: Vec<f64> = tr.values().collect();
        assert!(u.windows(2).all(|w| w[1] <= w[0]));
        assert!((tr.last_u() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn explicit_euler_large_step_lands_on_wrong_well() {
        let tr = simulate(SchemeId::Ee, 3.0, &P, &StepConfig::new(0.0015), 10_000).unwrap();
        assert!((tr.states[1].u + 0.6).abs() < 1e-12);
        assert!((tr.last_u() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn refusal_and_overflow() {
        let err = simulate(SchemeId::Cn, 0.5, &P, &StepConfig::new(0.03), 10).unwrap_err();
        assert!(matches!(err, Error::SolverRefused { .. }));
        let tr = simulate(SchemeId::Ee, 5.0, &P, &StepConfig::new(0.01), 100).unwrap();
        assert!(tr.flags.overflow);
        assert_eq!(tr.stop, StopReason::Overflow);
        assert!(tr.values().all(f64::is_finite));
    }

    #[test]
    fn forced_run_is_flagged() {
        let tr = simulate(SchemeId::Ie, 0.1, &P, &StepConfig::forced(0.04), 200).unwrap();
        assert!(tr.flags.forced_unsafe);
        assert!(tr.flags.multiplicity_seen);
    }

    #[test]
    fn modified_energy_bookkeeping() {
        let cn = simulate(SchemeId::Cn, 0.7, &P, &StepConfig::new(0.015), 20).unwrap();
        assert!(cn.energies.iter().all(|e| e.modified.is_some()));
        let mcn = simulate(SchemeId::ModCn, 0.7, &P, &StepConfig::new(0.015), 20).unwrap();
        assert!(mcn.energies[0].modified.is_none());
        assert!(mcn.energies[1..].iter().all(|e| e.modified.is_some()));
        let ie = simulate(SchemeId::Ie, 0.7, &P, &StepConfig::new(0.005), 20).unwrap();
        assert!(ie.energies.iter().all(|e| e.modified.is_none()));
    }
}
