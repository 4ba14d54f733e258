//! The scalar Allen-Cahn ODE `u' = -f(u)/eps^2` with double-well nonlinearity
//! `f(u) = u^3 - u`.
//!
//! Everything here is a pure function of its arguments. The steady states are
//! `-1, 0, +1`; the exact solution converges to `sign(u0)`.

use serde::{Deserialize, Serialize};

/// Floor applied to the radicand of the closed-form solution.
pub const RADICAND_FLOOR: f64 = 1e-300;

/// The scaling parameter of the ODE (interfacial width).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps: f64,
}

impl ModelParams {
    /// Builds parameters, logging a warning when `eps` lies outside `(0, 1)`.
    ///
    /// Non-positive or non-finite values are accepted here and caught by
    /// [`ModelParams::validate`]; the analysis entry points call it.
    pub fn new(eps: f64) -> Self {
        if eps >= 1.0 {
            log::warn!("eps = {eps} is outside the analysed range (0, 1)");
        }
        Self { eps }
    }

    pub fn validate(&self) -> Result<(), crate::Error> {
        if self.eps.is_finite() && self.eps > 0.0 {
            Ok(())
        } else {
            Err(crate::Error::InvalidParams(format!("eps must be positive and finite, got {}", self.eps)))
        }
    }

    #[inline]
    pub fn eps2(&self) -> f64 {
        self.eps * self.eps
    }
}

/// A point on a trajectory. `t` is always `n * h`, never accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: f64,
    pub t: f64,
}

/// Original energy `E(u)` and, where the scheme defines one, its modified energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub original: f64,
    pub modified: Option<f64>,
}

/// `f(u) = u^3 - u`.
#[inline]
pub fn f(u: f64) -> f64 {
    u * u * u - u
}

/// Double-well potential `F(u) = (u^2 - 1)^2 / 4`, with `F' = f`.
#[inline]
pub fn potential_f(u: f64) -> f64 {
    let w = u * u - 1.0;
    0.25 * w * w
}

/// `E(u) = F(u) / eps^2`.
#[inline]
pub fn energy(u: f64, p: &ModelParams) -> f64 {
    potential_f(u) / p.eps2()
}

/// `sign(u0)` with `sign(0) = 0` exactly.
pub fn correct_steady_state(u0: f64) -> f64 {
    if u0 > 0.0 {
        1.0
    } else if u0 < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Result of evaluating the closed-form solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValue {
    pub u: f64,
    /// Set when the radicand evaluated below [`RADICAND_FLOOR`] and was clamped.
    pub clamped: bool,
}

/// Closed-form solution `u0 / sqrt(e^{-2t/eps^2} + u0^2 (1 - e^{-2t/eps^2}))`.
pub fn exact_solution_checked(u0: f64, p: &ModelParams, t: f64) -> ExactValue {
    if u0 == 0.0 {
        return ExactValue { u: 0.0, clamped: false };
    }
    if t == 0.0 {
        return ExactValue { u: u0, clamped: false };
    }
    let decay = (-2.0 * t / p.eps2()).exp();
    // 1 - e^{-x} computed without cancellation for small x.
    let growth = -(-2.0 * t / p.eps2()).exp_m1();
    let mut radicand = decay + u0 * u0 * growth;
    let mut clamped = false;
    if radicand.is_nan() || radicand <= RADICAND_FLOOR {
        log::warn!("exact solution radicand {radicand:e} clamped (u0 = {u0}, t = {t})");
        radicand = RADICAND_FLOOR;
        clamped = true;
    }
    ExactValue { u: u0 / radicand.sqrt(), clamped }
}

/// Same as [`exact_solution_checked`] without the clamp flag.
pub fn exact_solution(u0: f64, p: &ModelParams, t: f64) -> f64 {
    exact_solution_checked(u0, p, t).u
}
