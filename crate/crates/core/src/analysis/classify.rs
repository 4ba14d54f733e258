use std::fmt;

use serde::{Deserialize, Serialize};

use super::audit::audit_monotone;
use super::{StopReason, Trajectory};
use crate::model::correct_steady_state;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutcomeClass {
    MonotoneCorrect,
    OscillatoryCorrect,
    WrongEquilibrium,
    Diverged,
    SolverRefused,
    Undecided,
}

impl OutcomeClass {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeClass::MonotoneCorrect => "MonotoneCorrect",
            OutcomeClass::OscillatoryCorrect => "OscillatoryCorrect",
            OutcomeClass::WrongEquilibrium => "WrongEquilibrium",
            OutcomeClass::Diverged => "Diverged",
            OutcomeClass::SolverRefused => "SolverRefused",
            OutcomeClass::Undecided => "Undecided",
        }
    }

    pub fn is_correct(self) -> bool {
        matches!(self, OutcomeClass::MonotoneCorrect | OutcomeClass::OscillatoryCorrect)
    }
}

impl fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub class: OutcomeClass,
    /// Terminal value when the run ended on a finite state.
    pub limit: Option<f64>,
    /// First step that crossed `|u| = 1` or changed the sign of `u`.
    pub first_crossing: Option<usize>,
    pub steps: usize,
}

impl Outcome {
    /// Outcome recorded for a run that could not start or failed mid-way.
    pub fn from_error(e: &Error) -> Self {
        let class = match e {
            Error::Overflow => OutcomeClass::Diverged,
            _ => OutcomeClass::SolverRefused,
        };
        Outcome { class, limit: None, first_crossing: None, steps: 0 }
    }
}

pub fn classify(tr: &Trajectory, steady_tol: f64) -> Outcome {
    let steps = tr.steps();
    let audit = audit_monotone(tr);
    let first_crossing = audit.first_crossing;
    if tr.flags.overflow || tr.stop == StopReason::Overflow {
        return Outcome { class: OutcomeClass::Diverged, limit: None, first_crossing, steps };
    }
    let limit = tr.last_u();
    let class = if tr.stop == StopReason::MaxSteps {
        OutcomeClass::Undecided
    } else {
        let target = correct_steady_state(tr.u0());
        if (limit - target).abs() < steady_tol {
            if audit.is_clean() {
                OutcomeClass::MonotoneCorrect
            } else {
                OutcomeClass::OscillatoryCorrect
            }
        } else if [-1.0, 0.0, 1.0].iter().any(|&v| v != target && (limit - v).abs() < steady_tol) {
            OutcomeClass::WrongEquilibrium
        } else {
            OutcomeClass::Undecided
        }
    };
    Outcome { class, limit: Some(limit), first_crossing, steps }
}
