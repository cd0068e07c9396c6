use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real field the numerics are generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Sum
    + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn two_pi() -> Self {
        Self::TAU()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{i t}`.
pub fn cis<T: Real>(t: T) -> Complex<T> {
    Complex::new(t.cos(), t.sin())
}

/// `e^{2 pi i z}` for complex `z`.
pub fn e2pi<T: Real>(z: Complex<T>) -> Complex<T> {
    (Complex::new(T::zero(), T::two_pi()) * z).exp()
}

pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `log|z|` that returns `-inf` for zero.
pub fn ln_abs<T: Real>(z: Complex<T>) -> T {
    z.norm().ln()
}
