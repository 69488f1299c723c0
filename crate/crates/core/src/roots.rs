//! Bisection for monotone scalar functions.

use crate::error::{Error, Result};

/// Finds `x` in `[lo, hi]` with `f(x) = 0` for nondecreasing `f`. Bisection
/// stops once the bracket is narrower than `x_tol`, or `x_tol · hi` when the
/// bracket lies below 1, so small roots keep their relative accuracy.
/// Returns the midpoint of the final bracket.
///
/// `f(lo) ≤ 0 ≤ f(hi)` must hold, otherwise [`BisectError::NotBracketed`].
pub fn bisect_increasing<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64, BisectError>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(BisectError::NotBracketed);
    }
    // 200 halvings exhaust any f64 interval.
    for _ in 0..200 {
        if hi - lo < x_tol * hi.min(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug)]
pub enum BisectError {
    NotBracketed,
    Eval(Error),
}

impl From<Error> for BisectError {
    fn from(e: Error) -> Self {
        BisectError::Eval(e)
    }
}
