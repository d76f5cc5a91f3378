//! Bracketed bisection.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_ITERATIONS: usize = 500;

/// Finds a sign change of `f` on `[lo, hi]` to absolute tolerance `tol`.
///
/// Returns the midpoint of the final bracket. An exact zero at either end is
/// returned as is.
pub fn bisect<T, F>(mut f: F, mut lo: T, mut hi: T, tol: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    if !(lo < hi) {
        return Err(Error::Numerical(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    let two = T::lit(2.0);
    for _ in 0..MAX_ITERATIONS {
        let mid = lo + (hi - lo) / two;
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / two)
}
