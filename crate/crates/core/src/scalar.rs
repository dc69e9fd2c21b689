//! Scalar abstraction for the numeric core.
//!
//! All heavy math is generic over [`Scalar`], which is any real floating
//! type that nalgebra can factorize and num-traits can convert. In practice
//! this means `f32` and `f64`; the crate-root aliases fix `f64` for
//! production use.

use nalgebra::RealField;
use num_traits::{Float, FromPrimitive};

/// Real scalar type usable throughout the crate.
pub trait Scalar:
    RealField + Float + FromPrimitive + Copy + Default + std::iter::Sum<Self> + 'static
{
}

impl<T> Scalar for T where
    T: RealField + Float + FromPrimitive + Copy + Default + std::iter::Sum<T> + 'static
{
}

/// Convert an `f64` constant into the working scalar type.
#[inline]
pub fn cv<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant must convert")
}
