//! Scalar abstraction shared by the numeric routines.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type the inference machinery is generic over (`f32` or `f64`).
///
/// Special functions (log-gamma, discrete samplers) are evaluated in `f64`
/// and converted, so the trait only asks for ordinary float arithmetic.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal or intermediate.
    fn of(x: f64) -> Self;

    fn as_f64(self) -> f64;

    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn of(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Weighted mean; weights need not be normalized.
pub fn weighted_mean<T: Real>(xs: &[T], ws: &[T]) -> T {
    xs.iter().zip(ws).map(|(&x, &w)| x * w).sum::<T>() / ws.iter().copied().sum::<T>()
}

/// Weighted (population) variance with normalized-by-total-weight convention.
pub fn weighted_variance<T: Real>(xs: &[T], ws: &[T]) -> T {
    let mean = weighted_mean(xs, ws);
    let total: T = ws.iter().copied().sum();
    xs.iter()
        .zip(ws)
        .map(|(&x, &w)| w * (x - mean) * (x - mean))
        .sum::<T>()
        / total
}

/// Trapezoidal rule on an ordered, possibly non-uniform grid.
pub fn trapezoid<T: Real>(grid: &[T], values: &[T]) -> T {
    let half = T::of(0.5);
    grid.windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) * half)
        .sum()
}
