//! Bracketed bisection for scalar root finding.
//!
//! Bisection is the workhorse here because every root we chase (break-even
//! concentrations, hydrolysate balance roots, slope thresholds) comes with a
//! guaranteed sign-changing bracket from monotonicity or convexity arguments.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Stopping criteria for [`bisect`].
#[derive(Debug, Clone, Copy)]
pub struct BisectOptions<T> {
    /// Target interval width (absolute).
    pub x_tol: T,
    /// Target residual |f(x)|. Iteration continues past `x_tol` while the
    /// residual still exceeds this, up to `max_iter` or float resolution;
    /// steep roots need the extra halvings.
    pub f_tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for BisectOptions<T> {
    fn default() -> Self {
        Self {
            x_tol: lit(1e-12),
            f_tol: lit(1e-10),
            max_iter: 200,
        }
    }
}

/// Converged (or best-effort) root with its achieved residual.
#[derive(Debug, Clone, Copy)]
pub struct Root<T> {
    pub x: T,
    pub residual: T,
    pub iterations: usize,
    /// Final bracket width.
    pub width: T,
}

/// Finds a root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// Returns the best midpoint with its residual; the caller decides whether
/// the achieved residual is acceptable.
pub fn bisect<T: Scalar, F: Fn(T) -> T>(
    f: F,
    lo: T,
    hi: T,
    opts: &BisectOptions<T>,
) -> Result<Root<T>> {
    let ordered = lo < hi; // false for NaN endpoints too
    if !ordered {
        return Err(Error::RootSolve(format!(
            "bad bracket: lo = {lo} is not below hi = {hi}"
        )));
    }
    let zero = T::zero();
    let f_lo = f(lo);
    if f_lo == zero {
        return Ok(Root {
            x: lo,
            residual: zero,
            iterations: 0,
            width: zero,
        });
    }
    let f_hi = f(hi);
    if f_hi == zero {
        return Ok(Root {
            x: hi,
            residual: zero,
            iterations: 0,
            width: zero,
        });
    }
    if (f_lo > zero) == (f_hi > zero) {
        return Err(Error::RootSolve(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}"
        )));
    }

    let mut a = lo;
    let mut b = hi;
    let mut f_a = f_lo;
    let half = lit::<T>(0.5);
    let mut mid = a + half * (b - a);
    let mut f_mid = f(mid);

    for it in 1..=opts.max_iter {
        if f_mid == zero {
            return Ok(Root {
                x: mid,
                residual: zero,
                iterations: it,
                width: b - a,
            });
        }
        if (f_mid > zero) == (f_a > zero) {
            a = mid;
            f_a = f_mid;
        } else {
            b = mid;
        }
        let width = b - a;
        if width <= opts.x_tol && f_mid.abs() <= opts.f_tol {
            return Ok(Root {
                x: mid,
                residual: f_mid,
                iterations: it,
                width,
            });
        }
        let next = a + half * (b - a);
        if next <= a || next >= b {
            // Bracket has collapsed to adjacent floats.
            return Ok(Root {
                x: mid,
                residual: f_mid,
                iterations: it,
                width,
            });
        }
        mid = next;
        f_mid = f(mid);
    }

    Ok(Root {
        x: mid,
        residual: f_mid,
        iterations: opts.max_iter,
        width: b - a,
    })
}
