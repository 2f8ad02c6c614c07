//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the solvers and kernels are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances quoted throughout the crate
/// are tuned for `f64`; `f32` instantiations work with looser tolerances.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    /// `1 / (2π)`.
    #[inline]
    fn inv_two_pi() -> Self {
        Self::one() / Self::TAU()
    }

    /// Numerically stable `log(1 + e^x)`.
    #[inline]
    fn softplus(self) -> Self {
        if self > Self::zero() {
            self + (-self).exp().ln_1p()
        } else {
            self.exp().ln_1p()
        }
    }

    /// Numerically stable logistic function `e^x / (1 + e^x)`.
    #[inline]
    fn sigmoid(self) -> Self {
        if self >= Self::zero() {
            Self::one() / (Self::one() + (-self).exp())
        } else {
            let e = self.exp();
            e / (Self::one() + e)
        }
    }

    /// Lossy conversion to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A point of the plane, treated as a complex coordinate.
pub type Point<T> = Complex<T>;

/// Shorthand constructor for a planar point.
#[inline]
pub fn pt<T: Real>(x: T, y: T) -> Point<T> {
    Complex::new(x, y)
}

/// Least-squares slope of `ys` against `xs`.
pub(crate) fn ls_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxy = sxy + (x - mx) * (y - my);
        sxx = sxx + (x - mx) * (x - mx);
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_is_stable_at_extremes() {
        assert_eq!(1000.0f64.softplus(), 1000.0);
        assert!((-1000.0f64).softplus() >= 0.0);
        assert!((0.0f64.softplus() - 2f64.ln()).abs() < 1e-15);
        assert!((0.0f32.sigmoid() - 0.5).abs() < 1e-7);
        assert!((800.0f64.sigmoid() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((ls_slope(&xs, &ys) - 2.0f64).abs() < 1e-14);
    }
}
