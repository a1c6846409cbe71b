//! Scalar abstraction shared by every closed-form routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real field the closed-form Gaussian algebra is written against.
///
/// Besides the arithmetic supplied by [`Float`], each implementation carries
/// the two tolerances the algorithms need, scaled to the type's precision:
/// a *default* tolerance for physicality, mean-equality and classification
/// decisions, and a *roundoff* band used to absorb cancellation noise
/// (δ clamping, tangency detection of double roots).
pub trait Scalar: Float + FloatConst + FromPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static {
    /// Tolerance for physicality, mean equality and optimality decisions.
    fn default_tol() -> Self;

    /// Band inside which a quantity is treated as zero up to roundoff.
    fn roundoff_tol() -> Self;

    /// Converts an `f64` literal. Panics only if the literal is not
    /// representable at all, which cannot happen for finite inputs.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }
}

impl Scalar for f64 {
    fn default_tol() -> Self {
        1e-9
    }
    fn roundoff_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn default_tol() -> Self {
        1e-4
    }
    fn roundoff_tol() -> Self {
        1e-5
    }
}

/// Reduces an angle to the half-open interval `[0, period)`.
pub(crate) fn wrap<T: Scalar>(angle: T, period: T) -> T {
    let r = angle % period;
    let r = if r < T::zero() { r + period } else { r };
    // `r + period` can round up to exactly `period`.
    if r >= period {
        T::zero()
    } else {
        r
    }
}
