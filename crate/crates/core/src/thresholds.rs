//! Closed-form critical step sizes `h*(u0, eps)`.
//!
//! For `0 < h <= h*` the scheme is uniquely solvable and its trajectory is
//! monotone, hence converges to `sign(u0)`. Apart from implicit Euler the
//! bound decays like `1/u0^2`, so no fixed step is safe for every start.

use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::schemes::SchemeId;

/// Which branch of the threshold formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingCase {
    /// `u0` in `{0, -1, 1}`: the trajectory is constant, only solvability binds.
    Equilibrium,
    /// `0 < |u0| < 1`.
    InsideWell,
    /// `|u0| > 1`.
    OutsideWell,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub scheme: SchemeId,
    pub u0: f64,
    pub eps: f64,
    #[serde(with = "crate::extended")]
    pub h_star: f64,
    #[serde(with = "crate::extended")]
    pub solvability: f64,
    pub binding_case: BindingCase,
}

pub fn binding_case(u0: f64) -> BindingCase {
    let a = u0.abs();
    if a == 0.0 || a == 1.0 {
        BindingCase::Equilibrium
    } else if a < 1.0 {
        BindingCase::InsideWell
    } else {
        BindingCase::OutsideWell
    }
}

/// Threshold for `0 < |u0| < 1`.
pub fn inside_well_threshold(s: SchemeId, p: &ModelParams) -> f64 {
    let e2 = p.eps2();
    match s {
        SchemeId::Ee => 0.5 * e2,
        SchemeId::CsModCn => 2.0 * e2,
        SchemeId::Ie | SchemeId::Cn | SchemeId::ModCn | SchemeId::Im => e2,
    }
}

/// Threshold for `|u0| > 1` as a function of `a = |u0|`.
pub fn outside_well_threshold(s: SchemeId, a: f64, p: &ModelParams) -> f64 {
    let e2 = p.eps2();
    match s {
        SchemeId::Ee => e2 / (a * a + a),
        SchemeId::Ie => e2,
        SchemeId::Cn => 2.0 * e2 / (a * a + a),
        SchemeId::ModCn => 4.0 * e2 / (a * a + 2.0 * a + 1.0),
        SchemeId::Im => 8.0 * e2 / (a * a + 4.0 * a + 3.0),
        SchemeId::CsModCn => 4.0 * e2 / (a * a + 2.0 * a - 1.0),
    }
}

pub fn critical_step(s: SchemeId, u0: f64, p: &ModelParams) -> ThresholdReport {
    let solvability = s.solvability_bound(p);
    let case = binding_case(u0);
    let h_star = match case {
        BindingCase::Equilibrium => solvability,
        BindingCase::InsideWell => inside_well_threshold(s, p),
        BindingCase::OutsideWell => outside_well_threshold(s, u0.abs(), p),
    };
    ThresholdReport { scheme: s, u0, eps: p.eps, h_star, solvability, binding_case: case }
}

/// `inf over u0 of h*`: `eps^2` for implicit Euler, zero otherwise.
pub fn infimum_over_u0(s: SchemeId, p: &ModelParams) -> f64 {
    match s {
        SchemeId::Ie => p.eps2(),
        _ => 0.0,
    }
}
