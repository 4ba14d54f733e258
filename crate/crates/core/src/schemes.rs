//! One-step update rules for the six analysed schemes.
//!
//! Implicit updates are written as a cubic in the new value, scaled so that
//! the residual reads `(u - u_prev) + h * (nonlinear part)`, and solved with
//! [`crate::cubic`]. Under each scheme's solvability bound that cubic is
//! monotone, which is what makes the update well defined.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cubic::{solve_cubic, CubicResidual};
use crate::model::{energy, f, ModelParams};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    /// Explicit Euler.
    Ee,
    /// Implicit Euler.
    Ie,
    /// Crank-Nicolson.
    Cn,
    /// Modified Crank-Nicolson (difference quotient of the potential).
    ModCn,
    /// Implicit midpoint.
    Im,
    /// Convex splitting of modified Crank-Nicolson.
    CsModCn,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] =
        [SchemeId::Ee, SchemeId::Ie, SchemeId::Cn, SchemeId::ModCn, SchemeId::Im, SchemeId::CsModCn];

    /// Stable lowercase identifier used on the command line and in files.
    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Ee => "ee",
            SchemeId::Ie => "ie",
            SchemeId::Cn => "cn",
            SchemeId::ModCn => "modcn",
            SchemeId::Im => "im",
            SchemeId::CsModCn => "csmodcn",
        }
    }

    /// Conventional display label.
    pub fn label(self) -> &'static str {
        match self {
            SchemeId::Ee => "EE",
            SchemeId::Ie => "IE",
            SchemeId::Cn => "CN",
            SchemeId::ModCn => "modCN",
            SchemeId::Im => "IM",
            SchemeId::CsModCn => "CS-modCN",
        }
    }

    /// Classical order of consistency.
    pub fn order(self) -> u32 {
        match self {
            SchemeId::Ee | SchemeId::Ie => 1,
            _ => 2,
        }
    }

    pub fn is_implicit(self) -> bool {
        self != SchemeId::Ee
    }

    /// Largest step for which the update has a unique real solution
    /// (`+inf` for the explicit and convex-splitting schemes).
    pub fn solvability_bound(self, p: &ModelParams) -> f64 {
        match self {
            SchemeId::Ee | SchemeId::CsModCn => f64::INFINITY,
            SchemeId::Ie => p.eps2(),
            SchemeId::Cn | SchemeId::ModCn | SchemeId::Im => 2.0 * p.eps2(),
        }
    }

    /// Cubic in the new value whose root is the implicit update.
    /// `None` for the explicit scheme.
    pub fn residual(self, u_prev: f64, p: &ModelParams, h: f64) -> Option<CubicResidual> {
        let q = u_prev;
        let e2 = p.eps2();
        let r = match self {
            SchemeId::Ee => return None,
            SchemeId::Ie => {
                let l = h / e2;
                CubicResidual::new(l, 1.0 - l, -q)
            }
            SchemeId::Cn => {
                let l = h / (2.0 * e2);
                CubicResidual::new(l, 1.0 - l, l * (q * q * q - q) - q)
            }
            SchemeId::ModCn => {
                // u - q + mu (u + q)(u^2 + q^2 - 2)
                let mu = h / (4.0 * e2);
                CubicResidual::with_quadratic(mu, mu * q, 1.0 + mu * (q * q - 2.0), mu * (q * q * q - 2.0 * q) - q)
            }
            SchemeId::Im => {
                // u - q + l (m^3 - m), m = (u + q) / 2
                let l = h / e2;
                CubicResidual::with_quadratic(
                    l / 8.0,
                    3.0 * l * q / 8.0,
                    1.0 + 3.0 * l * q * q / 8.0 - 0.5 * l,
                    l * q * q * q / 8.0 - 0.5 * l * q - q,
                )
            }
            SchemeId::CsModCn => {
                // u - q + mu (u + q)(u^2 + q^2) - 4 mu q
                let mu = h / (4.0 * e2);
                CubicResidual::with_quadratic(mu, mu * q, 1.0 + mu * q * q, mu * q * q * q - q - 4.0 * mu * q)
            }
        };
        Some(r)
    }

    /// Scheme equation `(u - u_prev) + h * N(u, u_prev) / eps^2` evaluated
    /// in factored form, independent of the expanded cubic.
    pub fn step_residual(self, u: f64, u_prev: f64, p: &ModelParams, h: f64) -> f64 {
        let q = u_prev;
        let m = 0.5 * (u + q);
        let nonlinear = match self {
            SchemeId::Ee => f(q),
            SchemeId::Ie => f(u),
            SchemeId::Cn => 0.5 * (f(u) + f(q)),
            SchemeId::ModCn => m * (0.5 * (u * u + q * q) - 1.0),
            SchemeId::Im => f(m),
            SchemeId::CsModCn => m * 0.5 * (u * u + q * q) - q,
        };
        (u - q) + h * nonlinear / p.eps2()
    }

    /// Advances one step from `u_prev`.
    pub fn step(self, u_prev: f64, p: &ModelParams, c: &StepConfig) -> Result<Step, Error> {
        if !u_prev.is_finite() {
            return Err(Error::Overflow);
        }
        c.validate()?;
        let Some(residual) = self.residual(u_prev, p, c.h) else {
            let u = u_prev - (c.h / p.eps2()) * f(u_prev);
            return if u.is_finite() { Ok(Step { u, multiple_roots: false }) } else { Err(Error::Overflow) };
        };
        let bound = self.solvability_bound(p);
        if c.h > bound && !c.force_unsafe {
            return Err(Error::SolverRefused { scheme: self, h: c.h, bound });
        }
        let root = solve_cubic(&residual, u_prev, c.force_unsafe)?;
        if !root.root.is_finite() {
            return Err(Error::Overflow);
        }
        Ok(Step { u: root.root, multiple_roots: root.multiple_roots })
    }

    /// Scheme-specific modified energy at `u`, given the previous value
    /// where the definition needs one.
    ///
    /// CN: `E(u) + h f(u)^2 / (4 eps^4)`. modCN: `E(u_n) + (u_n - u_{n-1})^2 / h`,
    /// undefined at the first state.
    pub fn modified_energy(self, u: f64, u_prev: Option<f64>, p: &ModelParams, h: f64) -> Option<f64> {
        match self {
            SchemeId::Cn => {
                let fu = f(u);
                Some(energy(u, p) + h * fu * fu / (4.0 * p.eps2() * p.eps2()))
            }
            SchemeId::ModCn => u_prev.map(|q| energy(u, p) + (u - q) * (u - q) / h),
            _ => None,
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == key.to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub h: f64,
    /// Permit implicit steps beyond the solvability bound.
    #[serde(default)]
    pub force_unsafe: bool,
}

impl StepConfig {
    pub fn new(h: f64) -> Self {
        Self { h, force_unsafe: false }
    }

    pub fn forced(h: f64) -> Self {
        Self { h, force_unsafe: true }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.h.is_finite() && self.h > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidStep(self.h))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub u: f64,
    /// Set in force mode when the cubic had several real roots.
    pub multiple_roots: bool,
}

pub fn step_ee(u_prev: f64, p: &ModelParams, c: &StepConfig) -> Result<f64, Error> {
    SchemeId::Ee.step(u_prev, p, c).map(|s| s.u)
}

pub fn step_ie(u_prev: f64, p: &ModelParams, c: &StepConfig) -> Result<f64, Error> {
    SchemeId::Ie.step(u_prev, p, c).map(|s| s.u)
}

pub fn step_cn(u_prev: f64, p: &ModelParams, c: &StepConfig) -> Result<f64, Error> {
    SchemeId::Cn.step(u_prev, p, c).map(|s| s.u)
}

pub fn step_modcn(u_prev: f64, p: &ModelParams, c: &StepConfig) -> Result<f64, Error> {
    SchemeId::ModCn.step(u_prev, p, c).map(|s| s.u)
}

pub fn step_im(u_prev: f64, p: &ModelParams, c: &StepConfig) -> Result<f64, Error> {
    SchemeId::Im.step(u_prev, p, c).map(|s| s.u)
}

pub fn step_csmodcn(u_prev: f64, p: &ModelParams, c: &StepConfig) -> Result<f64, Error> {
    SchemeId::CsModCn.step(u_prev, p, c).map(|s| s.u)
}
