use serde::{Deserialize, Serialize};

use super::{noise_floor, Trajectory};

/// Per-step energy tolerance, relative to `max(1, E_{n-1})`.
pub const ENERGY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifiedEnergyAudit {
    /// `steps[k]` covers the transition into the state with index `first_index + k`.
    pub first_index: usize,
    pub steps: Vec<bool>,
    pub first_violation: Option<usize>,
    pub non_increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyAudit {
    /// `original_steps[n - 1]` is `E(u_n) <= E(u_{n-1}) + tol`.
    pub original_steps: Vec<bool>,
    /// State index `n` of the first increase.
    pub first_original_violation: Option<usize>,
    pub original_non_increasing: bool,
    pub modified: Option<ModifiedEnergyAudit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneAudit {
    /// Increments never change sign.
    pub monotone: bool,
    /// Some step crossed the well boundary `|u| = 1` or changed the sign of `u`.
    pub crossed: bool,
    /// First state index at which either property failed.
    pub first_violation: Option<usize>,
    /// First state index at which a crossing happened.
    pub first_crossing: Option<usize>,
}

impl MonotoneAudit {
    pub fn is_clean(&self) -> bool {
        self.monotone && !self.crossed
    }
}

#[inline]
fn within_tol(cur: f64, prev: f64) -> bool {
    cur <= prev + ENERGY_TOL * prev.abs().max(1.0)
}

pub fn audit_energy(tr: &Trajectory) -> EnergyAudit {
    let original_steps: Vec<bool> = tr.energies.windows(2).map(|w| within_tol(w[1].original, w[0].original)).collect();
    let first_original_violation = original_steps.iter().position(|ok| !ok).map(|k| k + 1);

    let first_defined = tr.energies.iter().position(|e| e.modified.is_some());
    let modified = first_defined.map(|start| {
        let vals: Vec<f64> = tr.energies[start..].iter().filter_map(|e| e.modified).collect();
        let steps: Vec<bool> = vals.windows(2).map(|w| within_tol(w[1], w[0])).collect();
        let first_violation = steps.iter().position(|ok| !ok).map(|k| k + start + 1);
        ModifiedEnergyAudit {
            first_index: start + 1,
            non_increasing: first_violation.is_none(),
            steps,
            first_violation,
        }
    });

    EnergyAudit {
        original_non_increasing: first_original_violation.is_none(),
        original_steps,
        first_original_violation,
        modified,
    }
}

/// Sign of `|u| - 1`, with values within rounding of the boundary counted as on it.
#[inline]
fn well_side(u: f64) -> i8 {
    let d = u.abs() - 1.0;
    if d.abs() <= noise_floor(u, 1.0) {
        0
    } else if d > 0.0 {
        1
    } else {
        -1
    }
}

pub(crate) fn is_crossing(prev: f64, cur: f64) -> bool {
    let (a, b) = (well_side(prev), well_side(cur));
    a * b < 0 || prev * cur < 0.0
}

pub fn audit_monotone(tr: &Trajectory) -> MonotoneAudit {
    let mut direction = 0i8;
    let mut monotone = true;
    let mut first_violation = None;
    let mut first_crossing = None;

    for (k, w) in tr.states.windows(2).enumerate() {
        let n = k + 1;
        let (prev, cur) = (w[0].u, w[1].u);
        let d = cur - prev;
        let sign = if d.abs() <= noise_floor(prev, cur) {
            0
        } else if d > 0.0 {
            1
        } else {
            -1
        };
        if sign != 0 {
            if direction == 0 {
                direction = sign;
            } else if sign != direction && monotone {
                monotone = false;
                first_violation.get_or_insert(n);
            }
        }
        if first_crossing.is_none() && is_crossing(prev, cur) {
            first_crossing = Some(n);
            first_violation.get_or_insert(n);
        }
    }

    MonotoneAudit { monotone, crossed: first_crossing.is_some(), first_violation, first_crossing }
}
