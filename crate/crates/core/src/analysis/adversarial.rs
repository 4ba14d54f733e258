use crate::cubic::{solve_bracketed, CubicResidual, BRACKET_LIMIT};
use crate::model::ModelParams;
use crate::schemes::{SchemeId, StepConfig};
use crate::Error;

/// Initial value on the far side of zero whose first step lands exactly on
/// `target` (`-1` or `+1`), so the run sits on the wrong equilibrium from
/// step one on.
///
/// Built by solving the update backwards. Only explicit Euler and implicit
/// midpoint have a known construction; other schemes return
/// [`Error::Unsupported`].
pub fn adversarial_u0(s: SchemeId, p: &ModelParams, c: &StepConfig, target: f64) -> Result<f64, Error> {
    p.validate()?;
    c.validate()?;
    if target != 1.0 && target != -1.0 {
        return Err(Error::InvalidTarget(target));
    }
    let l = c.h / p.eps2();
    // Solve for target = -1 and reflect: every update is odd.
    let v = match s {
        SchemeId::Ee => {
            // v - l (v^3 - v) = -1 over v > 0, i.e. l v^3 - (1 + l) v - 1 = 0.
            // The residual is -2 at v = 1, so the positive root exceeds 1.
            let r = CubicResidual::new(l, -(1.0 + l), -1.0);
            positive_root(&r, 1.0).ok_or(Error::NoRoot { scheme: s, h: c.h })?
        }
        SchemeId::Im => {
            let bound = s.solvability_bound(p);
            if c.h > bound && !c.force_unsafe {
                return Err(Error::SolverRefused { scheme: s, h: c.h, bound });
            }
            // With m = (v - 1) / 2 the midpoint equation from v to -1 reads
            // l m^3 - (l + 2) m - 2 = 0, negative at m = 0.
            let r = CubicResidual::new(l, -(l + 2.0), -2.0);
            let m = positive_root(&r, 0.0).ok_or(Error::NoRoot { scheme: s, h: c.h })?;
            2.0 * m + 1.0
        }
        _ => return Err(Error::Unsupported { scheme: s, operation: "adversarial initial value" }),
    };
    Ok(if target < 0.0 { v } else { -v })
}

/// Root to the right of `from`, where `r(from) < 0` and `r -> +inf`.
fn positive_root(r: &CubicResidual, from: f64) -> Option<f64> {
    debug_assert!(r.eval(from) < 0.0);
    let mut hi = from + 1.0;
    while r.eval(hi) <= 0.0 {
        hi = from + 2.0 * (hi - from);
        if hi > BRACKET_LIMIT {
            return None;
        }
    }
    solve_bracketed(r, from, hi).ok().map(|root| root.root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const P: ModelParams = ModelParams { eps: 0.1 };

    #[test]
    fn golden_ratio_at_unit_ratio() {
        let u0 = adversarial_u0(SchemeId::Ee, &P, &StepConfig::new(0.01), -1.0).unwrap();
        assert_abs_diff_eq!(u0, 0.5 * (1.0 + 5f64.sqrt()), epsilon = 1e-12);
        let u0 = adversarial_u0(SchemeId::Ee, &P, &StepConfig::new(0.01), 1.0).unwrap();
        assert_abs_diff_eq!(u0, -0.5 * (1.0 + 5f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn one_step_lands_on_target() {
        for &h in &[1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
            let c = StepConfig::new(h);
            let u0 = adversarial_u0(SchemeId::Ee, &P, &c, -1.0).unwrap();
            assert!(u0 > 1.0);
            let u1 = SchemeId::Ee.step(u0, &P, &c).unwrap().u;
            assert!((u1 + 1.0).abs() < 1e-12 * u0.max(1.0), "h {h}: u1 = {u1}");
        }
    }

    #[test]
    fn implicit_midpoint_construction() {
        for &h in &[0.001, 0.01, 0.02] {
            let c = StepConfig::new(h);
            let u0 = adversarial_u0(SchemeId::Im, &P, &c, -1.0).unwrap();
            assert!(u0 > 1.0);
            assert!(SchemeId::Im.step_residual(-1.0, u0, &P, h).abs() < 1e-12 * u0);
            let u1 = SchemeId::Im.step(u0, &P, &c).unwrap().u;
            assert!((u1 + 1.0).abs() < 1e-10, "h {h}: u1 = {u1}");
            let u0p = adversarial_u0(SchemeId::Im, &P, &c, 1.0).unwrap();
            assert_eq!(u0p, -u0);
        }
        assert!(matches!(
            adversarial_u0(SchemeId::Im, &P, &StepConfig::new(0.05), -1.0),
            Err(Error::SolverRefused { .. })
        ));
    }

    #[test]
    fn unsupported_schemes_and_bad_targets() {
        for s in [SchemeId::Ie, SchemeId::Cn, SchemeId::ModCn, SchemeId::CsModCn] {
            assert!(matches!(adversarial_u0(s, &P, &StepConfig::new(0.01), -1.0), Err(Error::Unsupported { .. })));
        }
        assert!(matches!(adversarial_u0(SchemeId::Ee, &P, &StepConfig::new(0.01), 0.5), Err(Error::InvalidTarget(_))));
    }
}
