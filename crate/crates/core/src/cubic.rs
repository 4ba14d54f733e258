//! Real roots of the cubic residuals produced by the implicit schemes.
//!
//! Every implicit update reduces to `r(x) = a3 x^3 + a2 x^2 + a1 x + a0 = 0`
//! with `a3 > 0`. Under the scheme's solvability condition `r` is monotone,
//! so a sign-change bracket around the previous value pins down the unique
//! root and safeguarded Newton converges to it. Outside that regime the
//! caller may ask for all real roots and pick one (`force` mode).

use thiserror::Error;

/// Relative residual accepted at a returned root.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Newton iteration cap.
pub const MAX_ITER: usize = 200;
/// Bracket expansion gives up beyond this magnitude.
pub const BRACKET_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("no sign change found within |x| <= {BRACKET_LIMIT:e} (hint {hint})")]
    NoBracket { hint: f64 },
    #[error("residual has {count} real roots and force mode is off")]
    NotUnique { count: usize },
    #[error("leading coefficient must be positive and all coefficients finite")]
    InvalidResidual,
    #[error("no convergence: residual {residual:e} at x = {x}")]
    NotConverged { x: f64, residual: f64 },
}

/// `r(x) = a3 x^3 + a2 x^2 + a1 x + a0`.
///
/// `a2` is zero for most schemes; the averaged-nonlinearity schemes
/// (modified CN, midpoint, convex splitting) carry a quadratic term
/// proportional to the previous value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicResidual {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl CubicResidual {
    /// Depressed form without a quadratic term.
    pub fn new(a3: f64, a1: f64, a0: f64) -> Self {
        Self { a3, a2: 0.0, a1, a0 }
    }

    pub fn with_quadratic(a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Self { a3, a2, a1, a0 }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        ((self.a3 * x + self.a2) * x + self.a1) * x + self.a0
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        (3.0 * self.a3 * x + 2.0 * self.a2) * x + self.a1
    }

    /// Sum of the magnitudes of the terms at `x`, floored at 1; the
    /// natural yardstick for rounding error in [`CubicResidual::eval`].
    pub fn scale(&self, x: f64) -> f64 {
        let ax = x.abs();
        (self.a3.abs() * ax * ax * ax + self.a2.abs() * ax * ax + self.a1.abs() * ax + self.a0.abs()).max(1.0)
    }

    /// True when `r' >= 0` everywhere, i.e. `a2^2 <= 3 a3 a1`.
    pub fn is_monotone(&self) -> bool {
        self.a3 > 0.0 && self.a2 * self.a2 <= 3.0 * self.a3 * self.a1
    }

    /// Zeros of `r'` in increasing order, if `r'` changes sign.
    pub fn critical_points(&self) -> Option<(f64, f64)> {
        let disc = self.a2 * self.a2 - 3.0 * self.a3 * self.a1;
        if self.is_monotone() || disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        // Stable form of (-a2 -+ s) / (3 a3).
        let sign = if self.a2 < 0.0 { -1.0 } else { 1.0 };
        let q = -(self.a2 + sign * s);
        let (x1, x2) = (q / (3.0 * self.a3), self.a1 / q);
        Some(if x1 < x2 { (x1, x2) } else { (x2, x1) })
    }

    fn is_valid(&self) -> bool {
        self.a3 > 0.0 && self.a3.is_finite() && self.a2.is_finite() && self.a1.is_finite() && self.a0.is_finite()
    }
}

/// A root together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoot {
    pub root: f64,
    /// Final sign-change bracket `[lo, hi]` around the root.
    pub bracket: (f64, f64),
    /// More than one distinct real root exists (only possible in force mode).
    pub multiple_roots: bool,
    pub iterations: usize,
}

/// Unique real root of a residual certified to have exactly one.
///
/// The bracket is grown from `bracket_hint` by doubling until the residual
/// changes sign. Fails with [`SolveError::NotUnique`] if the cubic has
/// several real roots.
pub fn solve_monotone_cubic(r: &CubicResidual, bracket_hint: f64) -> Result<CubicRoot, SolveError> {
    solve_cubic(r, bracket_hint, false)
}

/// Real root of `r` nearest to `bracket_hint`.
///
/// With `force == false` this is [`solve_monotone_cubic`]. With
/// `force == true` all real roots are located and the one nearest the hint
/// is returned, ties going to the smaller magnitude; `multiple_roots` is set
/// whenever the choice was not unique.
pub fn solve_cubic(r: &CubicResidual, bracket_hint: f64, force: bool) -> Result<CubicRoot, SolveError> {
    if !r.is_valid() || !bracket_hint.is_finite() {
        return Err(SolveError::InvalidResidual);
    }
    let roots = match r.critical_points() {
        None => return solve_from_hint(r, bracket_hint),
        Some(cp) => all_real_roots(r, cp)?,
    };
    if roots.len() == 1 {
        // Derivative changes sign but only one crossing exists.
        return solve_from_hint(r, bracket_hint);
    }
    if !force {
        return Err(SolveError::NotUnique { count: roots.len() });
    }
    let best = roots
        .iter()
        .copied()
        .min_by(|a, b| {
            let da = (a.root - bracket_hint).abs();
            let db = (b.root - bracket_hint).abs();
            da.total_cmp(&db).then(a.root.abs().total_cmp(&b.root.abs()))
        })
        .expect("at least two roots");
    Ok(CubicRoot { multiple_roots: true, ..best })
}

/// Root of `r` inside a caller-supplied sign-change bracket.
pub fn solve_bracketed(r: &CubicResidual, lo: f64, hi: f64) -> Result<CubicRoot, SolveError> {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (flo, fhi) = (r.eval(lo), r.eval(hi));
    if flo == 0.0 {
        return Ok(exact(lo));
    }
    if fhi == 0.0 {
        return Ok(exact(hi));
    }
    if flo.signum() == fhi.signum() {
        return Err(SolveError::NoBracket { hint: 0.5 * (lo + hi) });
    }
    newton_in_bracket(r, lo, hi, 0.5 * (lo + hi))
}

fn exact(x: f64) -> CubicRoot {
    CubicRoot { root: x, bracket: (x, x), multiple_roots: false, iterations: 0 }
}

/// Assumes `r` has a single crossing; `a3 > 0` fixes its orientation.
fn solve_from_hint(r: &CubicResidual, hint: f64) -> Result<CubicRoot, SolveError> {
    let fh = r.eval(hint);
    if fh == 0.0 {
        return Ok(exact(hint));
    }
    // r > 0 at the hint: root lies to the left.
    let dir = if fh > 0.0 { -1.0 } else { 1.0 };
    let mut step = 1e-2 * hint.abs().max(1.0);
    let mut far = hint + dir * step;
    while r.eval(far) * fh > 0.0 {
        step *= 2.0;
        far = hint + dir * step;
        if far.abs() > BRACKET_LIMIT {
            return Err(SolveError::NoBracket { hint });
        }
    }
    let (lo, hi) = if dir < 0.0 { (far, hint) } else { (hint, far) };
    newton_in_bracket(r, lo, hi, hint)
}

/// One root per monotone piece that actually crosses zero.
fn all_real_roots(r: &CubicResidual, (c1, c2): (f64, f64)) -> Result<Vec<CubicRoot>, SolveError> {
    let (r1, r2) = (r.eval(c1), r.eval(c2));
    let mut roots = Vec::with_capacity(3);
    // Left piece rises from -inf to r(c1).
    if r1 >= 0.0 {
        if r1 == 0.0 {
            roots.push(exact(c1));
        } else {
            roots.push(expand_and_solve(r, c1, -1.0)?);
        }
    }
    // Middle piece falls from r(c1) to r(c2).
    if r1 > 0.0 && r2 < 0.0 {
        roots.push(newton_in_bracket(r, c1, c2, 0.5 * (c1 + c2))?);
    }
    // Right piece rises from r(c2) to +inf.
    if r2 <= 0.0 {
        if r2 == 0.0 {
            if r1 != 0.0 {
                roots.push(exact(c2));
            }
        } else {
            roots.push(expand_and_solve(r, c2, 1.0)?);
        }
    }
    Ok(roots)
}

fn expand_and_solve(r: &CubicResidual, from: f64, dir: f64) -> Result<CubicRoot, SolveError> {
    let f0 = r.eval(from);
    let mut step = 1e-2 * from.abs().max(1.0);
    let mut far = from + dir * step;
    while r.eval(far) * f0 > 0.0 {
        step *= 2.0;
        far = from + dir * step;
        if far.abs() > BRACKET_LIMIT {
            return Err(SolveError::NoBracket { hint: from });
        }
    }
    let (lo, hi) = if dir < 0.0 { (far, from) } else { (from, far) };
    newton_in_bracket(r, lo, hi, 0.5 * (lo + hi))
}

/// Newton iteration kept inside a sign-change bracket, falling back to
/// bisection when a step leaves the bracket or fails to halve it.
fn newton_in_bracket(r: &CubicResidual, mut lo: f64, mut hi: f64, x0: f64) -> Result<CubicRoot, SolveError> {
    // Orient so that r(lo) < 0 < r(hi).
    let orient = if r.eval(lo) < 0.0 { 1.0 } else { -1.0 };
    let g = |x: f64| orient * r.eval(x);
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut dx_old = hi - lo;
    let mut dx = dx_old;
    let mut iterations = 0;

    while iterations < MAX_ITER {
        iterations += 1;
        let gx = g(x);
        if gx == 0.0 {
            return Ok(CubicRoot { root: x, bracket: (x, x), multiple_roots: false, iterations });
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dg = orient * r.derivative(x);
        let newton = x - gx / dg;
        let bisect = !(newton > lo && newton < hi) || (2.0 * gx).abs() > (dx_old * dg).abs();
        dx_old = dx;
        let next = if bisect {
            dx = 0.5 * (hi - lo);
            lo + dx
        } else {
            dx = gx / dg;
            newton
        };
        let tiny = 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
        if next == x || (hi - lo) <= tiny || dx.abs() <= 0.5 * tiny {
            x = next;
            break;
        }
        x = next;
    }

    // Best of the final iterate and the bracket ends.
    let root = [x, lo, hi]
        .into_iter()
        .filter(|v| *v >= lo && *v <= hi)
        .min_by(|a, b| r.eval(*a).abs().total_cmp(&r.eval(*b).abs()))
        .unwrap_or(x);
    let residual = r.eval(root);
    if residual.abs() > RESIDUAL_TOL * r.scale(root) {
        return Err(SolveError::NotConverged { x: root, residual });
    }
    Ok(CubicRoot { root, bracket: (lo, hi), multiple_roots: false, iterations })
}
