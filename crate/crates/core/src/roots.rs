//! Bracketed root finding for monotone scalar maps.

use crate::error::{Error, Result};

/// Finds `x` in `[lo, hi]` with `f(x) = 0`, given `f(lo) <= 0 <= f(hi)` for an
/// increasing `f`. Bisection guarded secant (Illinois variant); stops when the
/// bracket is narrower than `x_tol` or `f` vanishes.
pub fn solve_increasing<F: FnMut(f64) -> Result<f64>>(
    op: &'static str,
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let mut f_hi = f(hi)?;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::NoBracket {
            op,
            message: format!("f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}"),
        });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    // side of the last two updates, for the Illinois weight halving
    let mut last_side = 0i8;
    // width at the last forced bisection, to cap slow secant progress
    let mut checkpoint = hi - lo;
    for i in 0..200 {
        let mid = 0.5 * (lo + hi);
        let width = hi - lo;
        if width <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let mut x = hi - f_hi * width / (f_hi - f_lo);
        if i % 3 == 2 {
            if width > 0.5 * checkpoint {
                x = mid;
            }
            checkpoint = width;
        }
        if !(x > lo && x < hi) {
            x = mid;
        }
        // keep the probe at least half a tolerance inside, so an accurate
        // secant step lands on the far side of the root and closes the bracket
        if width > 2.0 * x_tol {
            x = x.clamp(lo + 0.5 * x_tol, hi - 0.5 * x_tol);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            if last_side == -1 {
                f_hi *= 0.5;
            }
            last_side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if last_side == 1 {
                f_lo *= 0.5;
            }
            last_side = 1;
        }
    }
    Err(Error::NonConvergence {
        op,
        iterations: 200,
        residual: (hi - lo).abs(),
    })
}

/// Root of a continuous function with a sign change on `[a, b]`
/// (either orientation). Returns the bracket midpoint once it is below `x_tol`
/// or spans adjacent floats.
pub fn solve_sign_change<F: FnMut(f64) -> f64>(
    op: &'static str,
    mut f: F,
    a: f64,
    b: f64,
    x_tol: f64,
) -> Result<f64> {
    let fa = f(a);
    let sign = if fa < 0.0 { 1.0 } else { -1.0 };
    solve_increasing(op, |x| Ok(sign * f(x)), a, b, x_tol)
}
