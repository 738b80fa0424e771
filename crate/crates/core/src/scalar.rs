//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the probability tables and solvers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances are exposed per type because
/// `1e-9` is below the resolution of single precision.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Allowed deviation of a distribution's total mass from one.
    fn mass_tol() -> Self;

    /// Largest deviation that is silently renormalized on load.
    fn renorm_tol() -> Self;

    /// Convert an `f64` literal; every finite `f64` has a nearest value in `Self`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `x * log2(x)` with `0 log 0 := 0`.
    #[inline]
    fn xlog2x(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            self * self.log2()
        }
    }
}

impl Real for f64 {
    fn mass_tol() -> Self {
        1e-9
    }

    fn renorm_tol() -> Self {
        1e-6
    }
}

impl Real for f32 {
    fn mass_tol() -> Self {
        1e-5
    }

    fn renorm_tol() -> Self {
        1e-4
    }
}
