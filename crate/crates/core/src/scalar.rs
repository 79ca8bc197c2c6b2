//! Scalar abstractions.
//!
//! [`Scalar`] is anything the operator assembly can be carried out in,
//! including exact types. [`Real`] adds what the spectral code needs.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, NumAssign, ToPrimitive};

use crate::Rational;

/// A field-like scalar in which operators can be assembled exactly or
/// approximately.
pub trait Scalar:
    Num
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Copy
    + PartialOrd
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute value. Named to stay clear of the `abs` methods that
    /// floating point types inherit from several traits.
    fn magnitude(self) -> Self;

    /// Whether arithmetic in this type is exact.
    const EXACT: bool;

    /// Converts a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Converts an `f64` literal or sample.
    ///
    /// Exact types go through `FromPrimitive`, which is exact for values on
    /// a coarse dyadic grid and approximate otherwise.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("value representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            const EXACT: bool = false;
            #[inline]
            fn magnitude(self) -> Self {
                self.abs()
            }
        }
    )*};
}

impl_float_scalar!(f32, f64);

impl Scalar for i64 {
    const EXACT: bool = true;
    #[inline]
    fn magnitude(self) -> Self {
        self.abs()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    #[inline]
    fn magnitude(self) -> Self {
        if self < Rational::from_integer(0) {
            -self
        } else {
            self
        }
    }
}

/// Real floating point scalar usable with the dense eigensolver.
pub trait Real: Scalar + nalgebra::RealField + Copy {
    /// Machine epsilon of the type.
    fn eps() -> Self;
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}
