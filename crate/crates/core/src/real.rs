//! Scalar abstraction: every numeric kernel in this crate is generic over a
//! floating-point type implementing [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar usable by the numeric kernels (f32 or f64).
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
}

/// Shorthand for embedding an f64 literal into the working scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in scalar type")
}

/// Two, as a scalar.
#[inline]
pub fn two<T: Real>() -> T {
    T::one() + T::one()
}

/// Half, as a scalar.
#[inline]
pub fn half<T: Real>() -> T {
    T::one() / two()
}

/// Neumaier compensated accumulator; keeps grid sums deterministic and
/// accurate independently of summation length.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}
