//! Scalar abstraction shared by every numerical module.
//!
//! All of the simulation and analysis code is written against [`Real`], which
//! is implemented for `f32` and `f64`. Tolerances that only make sense for a
//! particular precision are exposed as associated functions so callers do not
//! hard-code `1e-10` against single precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Complex amplitude over the scalar type `T`.
pub type Cplx<T> = Complex<T>;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute roundoff allowance used when clamping tiny negative
    /// eigenvalues of density matrices.
    fn roundoff() -> Self;

    /// Converts an `f64` literal. Panics only if the target cannot represent
    /// finite `f64` values, which never happens for the provided impls.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits in a float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Real for f32 {
    fn roundoff() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn roundoff() -> Self {
        1e-10
    }
}

/// `e^{iφ}`.
#[inline]
pub fn cis<T: Real>(phi: T) -> Cplx<T> {
    let (s, c) = phi.sin_cos();
    Complex::new(c, s)
}

/// Reduces an angle into `[0, 2π)`.
#[inline]
pub fn wrap_two_pi<T: Real>(phi: T) -> T {
    let tau = T::TAU();
    let r = phi % tau;
    let r = if r < T::zero() { r + tau } else { r };
    if r >= tau {
        r - tau
    } else {
        r
    }
}
