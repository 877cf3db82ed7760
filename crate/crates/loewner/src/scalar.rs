//! Scalar types the numerical core can be instantiated with.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use f128::f128;

/// Real field used by every generic routine in the crate.
///
/// Implemented for `f32`, `f64` and IEEE binary128 ([`f128`], backed by libquadmath).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal. Every implementor represents all finite doubles.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}
impl Real for f128 {}

/// Complex numbers over a [`Real`] field.
pub type C<T> = Complex<T>;

pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub(crate) fn cre<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

/// `|re| + |im|`, the cheap magnitude used for pivoting.
pub(crate) fn abs1<T: Real>(z: C<T>) -> T {
    z.re.abs() + z.im.abs()
}

pub(crate) fn cast_c<T: Real, U: Real>(z: C<T>) -> C<U> {
    Complex::new(cast_r(z.re), cast_r(z.im))
}

/// Conversion between scalar types that keeps the bits an `f64` round trip
/// would drop (the tail of a binary128 value).
pub(crate) fn cast_r<T: Real, U: Real>(x: T) -> U {
    if let Some(same) = (&x as &dyn std::any::Any).downcast_ref::<U>() {
        return *same;
    }
    let hi = x.to_f64_lossy();
    U::of(hi) + U::of((x - T::of(hi)).to_f64_lossy())
}

/// `i^k` for any integer power.
pub(crate) fn i_pow<T: Real>(k: i64) -> C<T> {
    match k.rem_euclid(4) {
        0 => c(T::one(), T::zero()),
        1 => c(T::zero(), T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), -T::one()),
    }
}
