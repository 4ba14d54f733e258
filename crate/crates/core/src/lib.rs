//! Time-stepping schemes for the scalar Allen-Cahn ODE `u' + f(u)/eps^2 = 0`
//! and tools to check whether their long-time behaviour is qualitatively
//! correct.
//!
//! * [`model`]: the ODE itself, its energy and its closed-form solution.
//! * [`cubic`]: certified real-root solver for the implicit cubic updates.
//! * [`schemes`]: explicit/implicit Euler, Crank-Nicolson, modified CN,
//!   implicit midpoint and convex-splitting modified CN.
//! * [`thresholds`]: the critical step size `h*(u0, eps)` of every scheme.
//! * [`analysis`]: trajectories, outcome classification, energy and
//!   monotonicity audits, adversarial initial values, convergence order and
//!   `(u0, h)` sweeps.
//! * [`output`]: CSV writers for trajectories and sweeps.

pub mod analysis;
pub mod cubic;
pub mod extended;
pub mod model;
pub mod output;
pub mod schemes;
pub mod thresholds;

pub use analysis::{
    adversarial_u0, audit_energy, audit_monotone, classify, order_estimate, simulate, sweep, Axis, EnergyAudit,
    MonotoneAudit, OrderLevel, Outcome, OutcomeClass, SimulateOptions, SweepGrid, SweepSpec, Trajectory,
    TrajectoryFlags,
};
pub use cubic::{solve_cubic, solve_monotone_cubic, CubicResidual, CubicRoot, SolveError};
pub use model::{correct_steady_state, energy, exact_solution, f, potential_f, EnergyRecord, ModelParams, State};
pub use schemes::{SchemeId, Step, StepConfig};
pub use thresholds::{critical_step, infimum_over_u0, BindingCase, ThresholdReport};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("unknown scheme {0:?} (expected ee, ie, cn, modcn, im or csmodcn)")]
    UnknownScheme(String),
    #[error("{scheme}: h = {h} exceeds the solvability bound {bound}; pass force_unsafe to step anyway")]
    SolverRefused { scheme: SchemeId, h: f64, bound: f64 },
    #[error("numerical solution overflowed")]
    Overflow,
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{operation} is not supported for {scheme}")]
    Unsupported { scheme: SchemeId, operation: &'static str },
    #[error("no backward root found for {scheme} at h = {h}")]
    NoRoot { scheme: SchemeId, h: f64 },
    #[error("target must be -1 or +1, got {0}")]
    InvalidTarget(f64),
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("invalid order study: {0}")]
    InvalidOrderSetup(String),
}
