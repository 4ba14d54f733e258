use serde::{Deserialize, Serialize};

use crate::model::{exact_solution, ModelParams};
use crate::schemes::{SchemeId, StepConfig};
use crate::thresholds::critical_step;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderLevel {
    pub h: f64,
    pub steps: usize,
    pub error: f64,
    /// `log2(error_{k-1} / error_k)`; absent on the first level or when an
    /// error vanishes.
    pub observed_order: Option<f64>,
}

/// Errors at `t_end` against the closed-form solution for `h0 / 2^k`,
/// `k = 0..levels`, and the observed orders between successive levels.
pub fn order_estimate(
    s: SchemeId,
    u0: f64,
    p: &ModelParams,
    t_end: f64,
    h0: f64,
    levels: usize,
) -> Result<Vec<OrderLevel>, Error> {
    p.validate()?;
    if levels == 0 {
        return Err(Error::InvalidOrderSetup("levels must be at least 1".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidOrderSetup(format!("T must be positive, got {t_end}")));
    }
    let h_star = critical_step(s, u0, p).h_star;
    if h0 > h_star {
        return Err(Error::InvalidOrderSetup(format!(
            "h0 = {h0} exceeds the critical step {h_star} for {s} at u0 = {u0}"
        )));
    }
    let exact = exact_solution(u0, p, t_end);
    let mut out: Vec<OrderLevel> = Vec::with_capacity(levels);
    for k in 0..levels {
        let h = h0 / f64::powi(2.0, k as i32);
        let steps = (t_end / h).round() as usize;
        if steps == 0 || (steps as f64 * h - t_end).abs() > 1e-9 * t_end {
            return Err(Error::InvalidOrderSetup(format!("T = {t_end} is not a multiple of h = {h}")));
        }
        let c = StepConfig::new(h);
        let mut u = u0;
        for _ in 0..steps {
            u = s.step(u, p, &c)?.u;
        }
        let error = (u - exact).abs();
        let observed_order =
            out.last().filter(|prev| prev.error > 0.0 && error > 0.0).map(|prev| (prev.error / error).log2());
        out.push(OrderLevel { h, steps, error, observed_order });
    }
    Ok(out)
}
