//! Scalar abstraction shared by every analytic module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the engine computes in: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts a literal constant.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest argument accepted by `exp` before results are treated as saturated.
    fn exp_saturation() -> Self {
        let ln_max = Self::max_value().ln();
        ln_max.min(Self::lit(700.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `x^p` for `x >= 0`, with `0^p = 0` for positive exponents.
pub(crate) fn pow_nonneg<T: Scalar>(x: T, p: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        (p * x.ln()).exp()
    }
}

/// Relative tolerance scaled to the precision of `T`: `max(base, factor * eps)`.
pub(crate) fn rel_tol<T: Scalar>(base: f64, factor: f64) -> T {
    T::lit(base).max(T::lit(factor) * T::epsilon())
}
