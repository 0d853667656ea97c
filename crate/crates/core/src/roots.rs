//! Monotone root finding: geometric bracket growth followed by Newton steps
//! safeguarded by bisection.

use crate::error::{Error, Result};

/// Convergence controls for [`solve_increasing`].
#[derive(Debug, Clone, Copy)]
pub struct RootTolerance {
    /// Stop when `|g(x) - target| <= ftol`.
    pub ftol: f64,
    /// Stop when the bracket is narrower than `xtol * (1 + |x|)`.
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for RootTolerance {
    fn default() -> Self {
        Self {
            ftol: 1e-13,
            xtol: 1e-15,
            max_iter: 200,
        }
    }
}

/// Find an interval `[lo, hi]` with `g(lo) <= target <= g(hi)` for a
/// nondecreasing `g`, starting at `start` and stepping geometrically in the
/// direction indicated by `g(start)`. Steps never leave `[min, max]`.
pub fn grow_bracket<G>(
    mut g: G,
    target: f64,
    start: f64,
    first_step: f64,
    min: f64,
    max: f64,
) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let g0 = g(start)?;
    if g0 == target {
        return Ok((start, start));
    }
    let upward = g0 < target;
    let mut prev = start;
    let mut step = first_step.abs();
    loop {
        let next = if upward {
            (prev + step).min(max)
        } else {
            (prev - step).max(min)
        };
        let gv = g(next)?;
        if upward && gv >= target {
            return Ok((prev, next));
        }
        if !upward && gv <= target {
            return Ok((next, prev));
        }
        if next == max || next == min {
            let (low, high) = if upward { (g0, gv) } else { (gv, g0) };
            return Err(Error::Bracket { target, low, high });
        }
        prev = next;
        step *= 2.0;
    }
}

/// Solve `g(x) = target` for nondecreasing `g` on a bracket.
///
/// `g` returns the value and derivative at `x`. Newton steps are taken when
/// they land strictly inside the current bracket; otherwise the bracket is
/// bisected.
pub fn solve_increasing<G>(
    mut g: G,
    target: f64,
    lo: f64,
    hi: f64,
    tol: RootTolerance,
) -> Result<f64>
where
    G: FnMut(f64) -> Result<(f64, f64)>,
{
    if lo == hi {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut x = 0.5 * (lo + hi);
    for _ in 0..tol.max_iter {
        let (v, dv) = g(x)?;
        let r = v - target;
        if r.abs() <= tol.ftol {
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= tol.xtol * (1.0 + x.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = if dv > 0.0 && dv.is_finite() {
            x - r / dv
        } else {
            f64::NAN
        };
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::Range(format!(
        "root finding exhausted {} iterations in [{lo}, {hi}]",
        tol.max_iter
    )))
}
