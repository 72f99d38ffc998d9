//! Scalar root finding: bracketing plus a safeguarded secant/bisection
//! iteration. Used for quantile inversion (the survival equation is strictly
//! monotone) and the normal baseline quantile.

use crate::error::{OxgError, Result};

/// Outcome of a root search.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    /// Best abscissa found.
    pub x: f64,
    /// Function value at `x`.
    pub f: f64,
    /// Function evaluations spent.
    pub evaluations: usize,
    /// Whether a tolerance (bracket width or residual) was met.
    pub converged: bool,
}

/// Finds a root of `f` inside the bracket `[a, b]`, which must enclose a
/// sign change. Each step proposes a secant point from the two most recent
/// iterates and falls back to bisection whenever the proposal leaves the
/// bracket or fails to shrink it meaningfully, so convergence is guaranteed
/// while smooth problems still get superlinear steps.
///
/// Stops when the bracket width is at most `x_tol * (1 + |x|)`, when the
/// residual is at most `f_tol`, or after `max_iter` evaluations.
pub fn find_root<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    x_tol: f64,
    f_tol: f64,
    max_iter: usize,
) -> Result<RootResult> {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut evals = 2usize;
    if f_lo == 0.0 {
        return Ok(RootResult { x: lo, f: 0.0, evaluations: evals, converged: true });
    }
    if f_hi == 0.0 {
        return Ok(RootResult { x: hi, f: 0.0, evaluations: evals, converged: true });
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(OxgError::Domain(format!(
            "root bracket [{}, {}] does not enclose a sign change (f: {} .. {})",
            lo, hi, f_lo, f_hi
        )));
    }

    // Two most recent iterates drive the secant proposal.
    let (mut x_prev, mut f_prev) = (lo, f_lo);
    let (mut x_cur, mut f_cur) = (hi, f_hi);

    while evals < max_iter {
        let width = hi - lo;
        let mid = 0.5 * (lo + hi);
        if width <= x_tol * (1.0 + mid.abs()) {
            break;
        }

        // Secant proposal, guarded into the open bracket interior.
        let mut x_new = if f_cur != f_prev {
            x_cur - f_cur * (x_cur - x_prev) / (f_cur - f_prev)
        } else {
            mid
        };
        let margin = 0.01 * width;
        if !x_new.is_finite() || x_new <= lo + margin || x_new >= hi - margin {
            x_new = mid;
        }

        let f_new = f(x_new);
        evals += 1;
        if f_new == 0.0 || f_new.abs() <= f_tol {
            return Ok(RootResult { x: x_new, f: f_new, evaluations: evals, converged: true });
        }
        if !f_new.is_finite() {
            // Retreat to plain bisection on a pathological evaluation.
            let f_mid = f(mid);
            evals += 1;
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
                f_hi = f_mid;
            }
            x_prev = lo;
            f_prev = f_lo;
            x_cur = hi;
            f_cur = f_hi;
            continue;
        }

        if f_new.signum() == f_lo.signum() {
            lo = x_new;
            f_lo = f_new;
        } else {
            hi = x_new;
            f_hi = f_new;
        }
        x_prev = x_cur;
        f_prev = f_cur;
        x_cur = x_new;
        f_cur = f_new;
    }

    // Report the endpoint with the smaller residual.
    let (x, fx) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    let converged = (hi - lo) <= x_tol * (1.0 + (0.5 * (lo + hi)).abs()) || fx.abs() <= f_tol;
    Ok(RootResult { x, f: fx, evaluations: evals, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = find_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 0.0, 200).unwrap();
        assert!(r.converged);
        assert!((r.x - 2f64.sqrt()).abs() < 1e-12);

        let r = find_root(|x| x.cos() - x, 0.0, 1.0, 1e-14, 0.0, 200).unwrap();
        assert!((r.x - 0.7390851332151607).abs() < 1e-12);
    }

    #[test]
    fn rejects_unbracketed_input() {
        assert!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0, 100).is_err());
    }

    #[test]
    fn handles_steep_functions() {
        // Root of e^{50(x-1)} - 1 at x = 1 inside a wide bracket.
        let r = find_root(|x| (50.0 * (x - 1.0)).exp_m1(), 0.0, 3.0, 1e-13, 0.0, 300).unwrap();
        assert!(r.converged);
        assert!((r.x - 1.0).abs() < 1e-11);
    }
}
