//! Scalar abstraction shared by the analytic modules.
//!
//! Everything on the analytic path (spectrum, coefficient tensors, reduction,
//! discord kernel) is written against [`Real`], so the same code runs in `f64`
//! (the default, and what every published tolerance assumes) or in `f32` for
//! quick low-precision scans. The exact Fock-space oracle and the experiment
//! drivers are `f64` only.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or tolerance.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_index(i: usize) -> Self {
        <Self as FromPrimitive>::from_usize(i).expect("index representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `2^e` for possibly negative exponents.
#[inline]
pub(crate) fn pow2<T: Real>(e: i32) -> T {
    T::lit(2.0).powi(e)
}
