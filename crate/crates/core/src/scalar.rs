//! Scalar abstraction: every numeric routine in this crate is generic over
//! [`Real`], instantiated in practice with `f64` (aliases at the crate root)
//! and occasionally `f32` in precision-degradation tests.

use std::fmt::{Debug, Display};

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable throughout the crate.
///
/// The bound set is the smallest one that supports literal lifting via
/// [`cst`], π constants, and error reporting through `f64` payloads.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion for error payloads and reports.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
}

/// Lifts an `f64` literal into the working scalar type.
///
/// Panics only if the target type cannot represent any `f64`, which none of
/// the supported types (f32, f64) do; infinities and NaN pass through.
#[inline]
pub fn cst<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("f64 literal must lift into the scalar type")
}

/// `n` as a scalar; used for quadrature weights and polynomial recurrences.
#[inline]
pub fn cst_usize<R: Real>(n: usize) -> R {
    R::from_usize(n).expect("usize must lift into the scalar type")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_lifting_round_trips() {
        let x: f64 = cst(0.625);
        assert_eq!(x, 0.625);
        let y: f32 = cst(0.625);
        assert_eq!(y, 0.625f32);
        let n: f64 = cst_usize(17);
        assert_eq!(n, 17.0);
    }

    #[test]
    fn as_f64_passes_values_through() {
        assert_eq!(1.5f32.as_f64(), 1.5);
        assert!(f64::NAN.as_f64().is_nan());
    }
}
