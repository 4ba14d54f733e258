//! Error ratios under step halving against the closed-form solution.

use phasestep::{critical_step, order_estimate, ModelParams, SchemeId};

/// The first halvings from `h*/4` are pre-asymptotic (IE starts near 5, EE
/// near 1.3) and second-order errors reach roundoff after about seven, so the
/// ratio is checked on halvings five and six.
const HALVINGS: usize = 6;
const CHECKED: std::ops::Range<usize> = 4..6;

/// Error ratios `e(h) / e(h/2)` at `T = 10 eps^2`, `u0 = 0.5`, from `h*/4`.
fn ratios(s: SchemeId, eps: f64) -> Vec<f64> {
    let p = ModelParams::new(eps);
    let u0 = 0.5;
    let h0 = critical_step(s, u0, &p).h_star / 4.0;
    let levels = order_estimate(s, u0, &p, 10.0 * p.eps2(), h0, HALVINGS + 1).unwrap();
    levels.windows(2).map(|w| w[0].error / w[1].error).collect()
}

fn assert_ratios(s: SchemeId, want: f64, rel: f64) {
    for eps in [0.1, 0.25] {
        let r = ratios(s, eps);
        assert_eq!(r.len(), HALVINGS);
        for k in CHECKED {
            let q = r[k];
            assert!((q / want - 1.0).abs() <= rel, "{s} eps {eps} halving {}: ratio {q:.4}, all {r:?}", k + 1);
        }
    }
}

#[test]
fn first_order_schemes_halve_the_error() {
    for s in [SchemeId::Ee, SchemeId::Ie] {
        assert_ratios(s, 2.0, 0.15);
    }
}

#[test]
fn second_order_schemes_quarter_the_error() {
    for s in [SchemeId::Cn, SchemeId::ModCn, SchemeId::Im] {
        assert_ratios(s, 4.0, 0.2);
    }
}

#[test]
#[ignore = "the lagged concave term makes convex-splitting modCN first order"]
fn convex_splitting_quarters_the_error() {
    assert_ratios(SchemeId::CsModCn, 4.0, 0.2);
}

#[test]
fn convex_splitting_is_first_order() {
    assert_ratios(SchemeId::CsModCn, 2.0, 0.15);
}

#[test]
fn finer_steps_never_increase_the_error() {
    let p = ModelParams::new(0.1);
    for s in SchemeId::ALL {
        for u0 in [-3.0, -0.5, 0.3, 2.0] {
            let h0 = critical_step(s, u0, &p).h_star / 4.0;
            let t_end = h0 * 16.0;
            let lv = order_estimate(s, u0, &p, t_end, h0, 4).unwrap();
            for w in lv.windows(2) {
                assert!(w[1].error <= w[0].error, "{s} u0 {u0}: {:?}", lv);
            }
        }
    }
}
