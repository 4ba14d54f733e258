use serde::{Deserialize, Serialize};

use super::classify::{classify, Outcome};
use super::{simulate, STEADY_TOL};
use crate::model::ModelParams;
use crate::schemes::{SchemeId, StepConfig};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points from `min` to `max`, both included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count, spacing: Spacing::Linear }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count, spacing: Spacing::Log }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.count < 2 {
            return Err(Error::InvalidGrid(format!("axis needs at least 2 points, got {}", self.count)));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(Error::InvalidGrid(format!(
                "axis bounds must be finite and increasing, got {}..{}",
                self.min, self.max
            )));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return Err(Error::InvalidGrid(format!("log axis needs min > 0, got {}", self.min)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.count - 1 {
                    return self.max;
                }
                let frac = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * frac,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * frac).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub u0: Axis,
    pub h: Axis,
    #[serde(default)]
    pub force_unsafe: bool,
    /// Cap on worker threads; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl SweepSpec {
    pub fn new(u0: Axis, h: Axis) -> Self {
        Self { u0, h, force_unsafe: false, threads: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub u0: f64,
    pub h: f64,
    pub outcome: Outcome,
}

/// Outcomes over a `(u0, h)` grid, row-major with `u0` outermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub scheme: SchemeId,
    pub eps: f64,
    pub u0_axis: Axis,
    pub h_axis: Axis,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i_u0: usize, i_h: usize) -> &SweepCell {
        &self.cells[i_u0 * self.h_axis.count + i_h]
    }

    /// Cells of one `u0` row, in increasing `h`.
    pub fn row(&self, i_u0: usize) -> &[SweepCell] {
        let n = self.h_axis.count;
        &self.cells[i_u0 * n..(i_u0 + 1) * n]
    }
}

fn run_cell(s: SchemeId, u0: f64, h: f64, p: &ModelParams, force: bool, max_steps: usize) -> SweepCell {
    let c = StepConfig { h, force_unsafe: force };
    let outcome = match simulate(s, u0, p, &c, max_steps) {
        Ok(tr) => classify(&tr, STEADY_TOL),
        Err(e) => Outcome::from_error(&e),
    };
    SweepCell { u0, h, outcome }
}

/// Classifies every cell of the grid. Cells are independent and may run in
/// parallel; results are assembled by index, so the grid is identical for
/// any thread count.
pub fn sweep(s: SchemeId, spec: &SweepSpec, p: &ModelParams, max_steps: usize) -> Result<SweepGrid, Error> {
    p.validate()?;
    spec.u0.validate()?;
    spec.h.validate()?;
    if max_steps == 0 {
        return Err(Error::InvalidGrid("max_steps must be at least 1".into()));
    }
    let u0s = spec.u0.values();
    let hs = spec.h.values();
    let n_h = hs.len();
    let total = u0s.len() * n_h;
    let force = spec.force_unsafe;
    let cell = |k: usize| run_cell(s, u0s[k / n_h], hs[k % n_h], p, force, max_steps);

    let cells = run_cells(total, spec.threads, cell);

    Ok(SweepGrid { scheme: s, eps: p.eps, u0_axis: spec.u0, h_axis: spec.h, cells })
}

#[cfg(feature = "parallel")]
fn run_cells<F>(total: usize, threads: Option<usize>, cell: F) -> Vec<SweepCell>
where
    F: Fn(usize) -> SweepCell + Sync + Send,
{
    use rayon::prelude::*;
    let work = || (0..total).into_par_iter().map(&cell).collect::<Vec<_>>();
    match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the global pool");
                work()
            }
        },
        _ => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_cells<F>(total: usize, _threads: Option<usize>, cell: F) -> Vec<SweepCell>
where
    F: Fn(usize) -> SweepCell,
{
    (0..total).map(cell).collect()
}
