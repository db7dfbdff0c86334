use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use ndarray::ScalarOperand;
use num_traits::{Float, FloatConst, NumCast};
use rustfft::FftNum;

/// Floating-point sample type accepted by every transform and extractor.
///
/// Implemented for `f32` and `f64`. Numerically delicate stages (the
/// constant-Q prefix sums, metric sweeps) accumulate in `f64` regardless of
/// the scalar so that single precision stays usable for bulk extraction.
pub trait Scalar: Float + FloatConst + FftNum + Sum + Default + Display + LowerExp + ScalarOperand + Debug {
    /// Converts an `f64` constant into the scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn count(v: usize) -> Self {
        Self::lit(v as f64)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Floor applied before every logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

/// `ln(max(x, LOG_FLOOR))`.
#[inline]
pub fn floored_ln<T: Scalar>(x: T) -> T {
    x.max(T::lit(LOG_FLOOR)).ln()
}
