//! Synthetic two-peak sequence: a log-sum-exp of two standard bubbles,
//! blown down by `u(y) = ũ(r y) + 2 log r`.
//!
//! The superposition is test data, not a solution of the equation. Since
//! `e^{ũ}` is exactly the sum of the two bubble densities, the total mass
//! is close to `16π` whenever both peaks are well inside the unit disk.

use crate::error::{Error, Result};
use crate::pde_solver::{RectGrid, SampledField};
use crate::scalar::{Point, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBubbleSpec<T> {
    /// Separation index `r`; the second peak sits at `1/r`.
    pub separation: T,
    /// Peak levels of `ũ` at its two centres. `m1 = -∞` omits the second
    /// bubble.
    pub m0: T,
    pub m1: T,
}

impl<T: Real> TwoBubbleSpec<T> {
    /// Equal levels `log 8λ²` and separation `√M₀`.
    pub fn symmetric(lambda: T) -> Result<Self> {
        let m = (T::lit(8.0) * lambda * lambda).ln();
        Self::new(m.sqrt(), m, m)
    }

    pub fn new(separation: T, m0: T, m1: T) -> Result<Self> {
        if !(separation > T::one()) || !separation.is_finite() {
            return Err(Error::InvalidParameter(format!("separation must exceed 1, got {separation}")));
        }
        if !m0.is_finite() || m1.is_nan() || m1 == T::infinity() {
            return Err(Error::InvalidParameter("peak levels must be finite (m1 may be -inf)".into()));
        }
        Ok(Self { separation, m0, m1 })
    }

    pub fn z0(&self) -> Point<T> {
        Point::new(T::zero(), T::zero())
    }

    pub fn z1(&self) -> Point<T> {
        Point::new(T::one() / self.separation, T::zero())
    }

    /// `ũ(x) = log(e^{b₀(x)} + e^{b₁(x - 1)})` with `b_k` the bubble of
    /// peak level `M_k`.
    pub fn tilde(&self, x: Point<T>) -> T {
        let b0 = bubble_at_level(self.m0, x.norm_sqr());
        if self.m1 == T::neg_infinity() {
            return b0;
        }
        let b1 = bubble_at_level(self.m1, (x - Point::new(T::one(), T::zero())).norm_sqr());
        let (hi, lo) = if b0 >= b1 { (b0, b1) } else { (b1, b0) };
        hi + (lo - hi).exp().ln_1p()
    }

    /// `u(y) = ũ(r y) + 2 log r`.
    pub fn value(&self, y: Point<T>) -> T {
        self.tilde(y * self.separation) + T::two() * self.separation.ln()
    }
}

/// `log(8λ²/(1+λ²ρ²)²)` with `log 8λ² = level`.
fn bubble_at_level<T: Real>(level: T, rho_sq: T) -> T {
    let lambda_sq = level.exp() / T::lit(8.0);
    level - T::two() * (lambda_sq * rho_sq).ln_1p()
}

/// Samples the synthetic field on `grid`, which must cover the unit disk.
pub fn build_two_bubble<T: Real>(spec: &TwoBubbleSpec<T>, grid: &RectGrid<T>) -> Result<SampledField<T>> {
    let one = T::one();
    if grid.x_min > -one || grid.x_max < one || grid.y_min > -one || grid.y_max < one {
        return Err(Error::InvalidParameter("two-bubble grid must cover the unit disk".into()));
    }
    let meta = format!(
        "two-bubble:separation={:.16e}:m0={:.16e}:m1={:.16e}",
        spec.separation.as_f64(),
        spec.m0.as_f64(),
        spec.m1.as_f64()
    );
    SampledField::from_fn_rect(*grid, |p| spec.value(p), meta)
}
