//! Scalar abstractions shared by the exact and floating-point kernels.
//!
//! [`Coefficient`] is the minimal ring-with-sign interface needed by the
//! Clifford algebra; it is satisfied by `f32`, `f64` and
//! [`BigRational`](num_rational::BigRational). [`Real`] adds the
//! linear-algebra surface (`nalgebra::RealField`) needed by every numeric
//! module downstream of the algebra.

use std::fmt;
use std::str::FromStr;

use nalgebra::RealField;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Coefficient type of a [`MultiVector`](crate::clifford::MultiVector).
pub trait Coefficient:
    Clone + PartialEq + PartialOrd + Signed + fmt::Debug + fmt::Display + FromStr + Send + Sync + 'static
{
}

impl<T> Coefficient for T where
    T: Clone
        + PartialEq
        + PartialOrd
        + Signed
        + fmt::Debug
        + fmt::Display
        + FromStr
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalar used by the representation, fibre, curvature and
/// twistor modules.
pub trait Real: RealField + Coefficient + Copy + FromPrimitive + ToPrimitive {
    /// Tolerance for structural invariants (unit norm, decomposability,
    /// orthonormality) that should hold to near machine precision.
    fn structural_tolerance() -> Self;

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn structural_tolerance() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn structural_tolerance() -> Self {
        1e-4
    }
}
