//! Plain-text emitters. Reals are written with 17 significant digits so the
//! files round-trip exactly and are byte-stable.

use std::fmt::Write;

use crate::analysis::{SweepGrid, Trajectory};

pub const TRAJECTORY_HEADER: &str = "n,t,u,energy,energy_modified";
pub const SWEEP_HEADER: &str = "u0,h,class,limit,steps";

/// Scientific notation with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    let mut out = String::with_capacity(80 * (tr.states.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for (n, (st, e)) in tr.states.iter().zip(&tr.energies).enumerate() {
        let modified = e.modified.map(fmt_real).unwrap_or_default();
        let _ = writeln!(out, "{n},{},{},{},{modified}", fmt_real(st.t), fmt_real(st.u), fmt_real(e.original));
    }
    out
}

pub fn sweep_csv(grid: &SweepGrid) -> String {
    let mut out = String::with_capacity(64 * (grid.cells.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for c in &grid.cells {
        let limit = c.outcome.limit.map(fmt_real).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{limit},{}", fmt_real(c.u0), fmt_real(c.h), c.outcome.class, c.outcome.steps);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{simulate, sweep, Axis, SweepSpec};
    use crate::model::ModelParams;
    use crate::schemes::{SchemeId, StepConfig};

    #[test]
    fn real_format_round_trips() {
        assert_eq!(fmt_real(0.5), "5.0000000000000000e-1");
        for x in [0.1, 1.0 / 3.0, -2.085_972_431_270_280_7, 1e-300, 12345.678] {
            let s = fmt_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn trajectory_layout() {
        let p = ModelParams { eps: 0.1 };
        let tr = simulate(SchemeId::ModCn, 0.7, &p, &StepConfig::new(0.01), 3).unwrap();
        let csv = trajectory_csv(&tr);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines.len(), tr.states.len() + 1);
        // No modified energy before the first step.
        assert!(lines[1].ends_with(','));
        assert_eq!(lines[2].split(',').count(), 5);
        assert!(!lines[2].ends_with(','));
    }

    #[test]
    fn sweep_layout() {
        let p = ModelParams { eps: 0.1 };
        let spec = SweepSpec::new(Axis::linear(0.5, 1.0, 2), Axis::log(1e-3, 2e-2, 2));
        let g = sweep(SchemeId::Ie, &spec, &p, 1000).unwrap();
        let csv = sweep_csv(&g);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert!(lines[2].contains(",SolverRefused,,0"));
        assert!(lines[1].contains(",MonotoneCorrect,"));
    }
}
