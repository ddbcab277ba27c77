//! Scalar abstractions.
//!
//! Numerical routines are written against [`Real`], which covers `f32` and
//! `f64`. The piecewise-constant circle colourings only need ordered field
//! arithmetic plus `floor`, so they are written against [`Exact`], which is
//! also implemented for [`num_rational::Ratio<i64>`] and gives exact answers.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Floating point scalar used by every numerical routine in the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal. Infallible for the supported float types.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// Clamp tolerance for `arccos`/`arcsin` arguments: `1e-9`, or a few ulps
    /// for types where that is below the working precision.
    #[inline]
    fn clamp_tol() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(64.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field with `floor`, enough for piecewise-constant colourings.
pub trait Exact: Copy + PartialOrd + Num + Neg<Output = Self> + Debug {
    fn floor(self) -> Self;
    fn to_i64(self) -> Option<i64>;
    fn from_i64(v: i64) -> Self;
}

macro_rules! exact_float {
    ($t:ty) => {
        impl Exact for $t {
            #[inline]
            fn floor(self) -> Self {
                Float::floor(self)
            }
            #[inline]
            fn to_i64(self) -> Option<i64> {
                ToPrimitive::to_i64(&self)
            }
            #[inline]
            fn from_i64(v: i64) -> Self {
                v as $t
            }
        }
    };
}

exact_float!(f32);
exact_float!(f64);

impl Exact for Ratio<i64> {
    #[inline]
    fn floor(self) -> Self {
        Ratio::floor(&self)
    }
    #[inline]
    fn to_i64(self) -> Option<i64> {
        Some(Ratio::to_integer(&self))
    }
    #[inline]
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v)
    }
}

/// `x` clamped into `[-1, 1]` when it overshoots by at most
/// [`Real::clamp_tol`]; `None` when it is further out.
#[inline]
pub fn clamp_unit<T: Real>(x: T) -> Option<T> {
    let one = T::one();
    if x.abs() <= one {
        Some(x)
    } else if x.abs() <= one + T::clamp_tol() {
        Some(x.signum())
    } else {
        None
    }
}

/// Angle in radians from a multiple of π.
#[inline]
pub fn pi_times<T: Real>(x: T) -> T {
    x * T::PI()
}
