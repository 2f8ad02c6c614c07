//! The blow-up change of variables `ũ(x) = u(y₀ + x e^{-M/2}) - M` and the
//! identities it satisfies.

use crate::error::{Error, Result};
use crate::green_disk::{disk_integral, log_potential, Density, QuadratureSpec};
use crate::scalar::{Point, Real};

use super::ScalarField;

/// Centre `y₀`, level `M = u(y₀)` and scale `e^{-M/2}` of a blow-up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescalingFrame<T> {
    pub center: Point<T>,
    pub level: T,
    pub scale: T,
    /// Optional cutoff radius `l` in rescaled coordinates; left free.
    pub cutoff: Option<T>,
}

impl<T: Real> RescalingFrame<T> {
    pub fn new(center: Point<T>, level: T) -> Result<Self> {
        if !level.is_finite() {
            return Err(Error::InvalidParameter(format!("frame level must be finite, got {level}")));
        }
        Ok(Self { center, level, scale: (-level * T::half()).exp(), cutoff: None })
    }

    /// Frame at `center` with `M = u(center)`.
    pub fn at<U: ScalarField<T> + ?Sized>(u: &U, center: Point<T>) -> Result<Self> {
        let level = u
            .value(center)
            .ok_or(Error::OutsideDisk { x: center.re.as_f64(), y: center.im.as_f64() })?;
        Self::new(center, level)
    }

    pub fn with_cutoff(mut self, l: T) -> Self {
        self.cutoff = Some(l);
        self
    }

    /// `y₀ + x e^{-M/2}`.
    pub fn map(&self, x: Point<T>) -> Point<T> {
        self.center + x * self.scale
    }

    /// Radius in rescaled coordinates of a ball of radius `rho` about `y₀`.
    pub fn frame_radius(&self, rho: T) -> T {
        rho / self.scale
    }
}

/// A rescaled field `ũ` with its weight `Ṽ`.
pub struct Rescaled<'a, T, U: ?Sized> {
    field: &'a U,
    frame: RescalingFrame<T>,
    radius: T,
}

impl<T: Real, U: ScalarField<T> + ?Sized> Rescaled<'_, T, U> {
    /// `ũ(x)`, or `None` beyond the admissible radius.
    pub fn value(&self, x: Point<T>) -> Option<T> {
        if x.norm() > self.radius {
            return None;
        }
        Some(self.field.value(self.frame.map(x))? - self.frame.level)
    }

    /// `Ṽ(x) = V(y₀ + x e^{-M/2})`.
    pub fn weight(&self, x: Point<T>) -> T {
        self.field.weight(self.frame.map(x))
    }

    pub fn frame(&self) -> &RescalingFrame<T> {
        &self.frame
    }

    /// Radius in rescaled coordinates on which `ũ` is defined.
    pub fn radius(&self) -> T {
        self.radius
    }
}

/// Rescales `u` on the ball of radius `radius` (rescaled coordinates).
pub fn rescale<'a, T: Real, U: ScalarField<T> + ?Sized>(
    u: &'a U,
    frame: RescalingFrame<T>,
    radius: T,
) -> Result<Rescaled<'a, T, U>> {
    if !u.contains_ball(frame.center, radius * frame.scale) {
        return Err(Error::OutsideDisk { x: frame.center.re.as_f64(), y: frame.center.im.as_f64() });
    }
    Ok(Rescaled { field: u, frame, radius })
}

/// `Ṽ(x) = V(y₀ + x e^{-M/2})`.
pub fn rescale_weight<T: Real, V: Fn(Point<T>) -> T>(v: V, frame: RescalingFrame<T>) -> impl Fn(Point<T>) -> T {
    move |x| v(frame.map(x))
}

/// `Ṽ e^{ũ}` from a density `V e^u`: `x ↦ f(y₀ + x e^{-M/2}) e^{-M}`.
pub struct RescaledDensity<'a, T, D: ?Sized> {
    inner: &'a D,
    frame: RescalingFrame<T>,
    factor: T,
}

impl<'a, T: Real, D: Density<T> + ?Sized> RescaledDensity<'a, T, D> {
    pub fn new(inner: &'a D, frame: RescalingFrame<T>) -> Self {
        Self { inner, frame, factor: (-frame.level).exp() }
    }
}

impl<T: Real, D: Density<T> + ?Sized> Density<T> for RescaledDensity<'_, T, D> {
    fn eval(&self, x: Point<T>) -> T {
        self.inner.eval(self.frame.map(x)) * self.factor
    }

    fn is_radial_about(&self, c: Point<T>) -> bool {
        c == Point::new(T::zero(), T::zero()) && self.inner.is_radial_about(self.frame.center)
    }

    fn radial_hints(&self, c: Point<T>, rho: T) -> Vec<T> {
        if c != Point::new(T::zero(), T::zero()) {
            return Vec::new();
        }
        self.inner
            .radial_hints(self.frame.center, rho * self.frame.scale)
            .into_iter()
            .map(|r| r / self.frame.scale)
            .collect()
    }
}

/// `(∫_{B(y₀, ρ)} V e^u dy, ∫_{B(0, ρ e^{M/2})} Ṽ e^{ũ} dx)`, each from its
/// own quadrature. The two agree exactly by the change of variables.
pub fn rescaled_mass_pair<T: Real, D: Density<T> + ?Sized>(
    density: &D,
    frame: &RescalingFrame<T>,
    rho: T,
    q: &QuadratureSpec<T>,
) -> Result<(T, T)> {
    let original = disk_integral(frame.center, rho, density, q)?;
    let scaled = RescaledDensity::new(density, *frame);
    let rescaled = disk_integral(Point::new(T::zero(), T::zero()), frame.frame_radius(rho), &scaled, q)?;
    Ok((original, rescaled))
}

/// Sides of the logarithmic kernel split
/// `∫_{B(y₀,R)} -(1/2π) log|y₀-y| V e^u dy
///   = (M/4π) ∫ Ṽ e^{ũ} dx + ∫ -(1/2π) log|x| Ṽ e^{ũ} dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitTerms<T> {
    pub lhs: T,
    pub term1: T,
    pub term2: T,
}

impl<T: Real> SplitTerms<T> {
    pub fn residual(&self) -> T {
        (self.lhs - self.term1 - self.term2).abs()
    }
}

/// Evaluates the three terms of the split by independent quadratures: the
/// left side in the original variables, both right-side terms in the
/// rescaled ones.
pub fn log_kernel_split<T: Real, D: Density<T> + ?Sized>(
    density: &D,
    frame: &RescalingFrame<T>,
    radius: T,
    q: &QuadratureSpec<T>,
) -> Result<SplitTerms<T>> {
    let lhs = log_potential(frame.center, radius, density, q)?;
    let scaled = RescaledDensity::new(density, *frame);
    let origin = Point::new(T::zero(), T::zero());
    let big = frame.frame_radius(radius);
    let mass = disk_integral(origin, big, &scaled, q)?;
    let term1 = frame.level / (T::lit(4.0) * T::PI()) * mass;
    let term2 = log_potential(origin, big, &scaled, q)?;
    Ok(SplitTerms { lhs, term1, term2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::RadialProfile;
    use crate::green_disk::{ConstantDensity, ProfileDensity};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type P = RadialProfile<f64>;

    fn origin() -> Point<f64> {
        Point::new(0.0, 0.0)
    }

    #[test]
    fn bubble_rescales_to_universal_profile() {
        for i in [1.0, 7.0, 300.0] {
            let b = P::bubble(i).unwrap();
            let frame = RescalingFrame::at(&b, origin()).unwrap();
            assert_eq!(frame.scale, (-frame.level / 2.0).exp());
            let r = rescale(&b, frame, 2.0).unwrap();
            assert_eq!(r.value(origin()).unwrap(), 0.0);
            for x in [0.3, 1.0, 1.9] {
                let expected = -2.0 * (1.0 + x * x / 8.0f64).ln();
                assert_relative_eq!(r.value(Point::new(x, 0.0)).unwrap(), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn escaping_frame_is_refused() {
        let b = P::bubble(1.0).unwrap();
        let frame = RescalingFrame::at(&b, origin()).unwrap();
        assert!(rescale(&b, frame, 100.0).is_err());
    }

    #[test]
    fn split_trivial_cases() {
        let q = QuadratureSpec::default();
        let frame = RescalingFrame::new(origin(), 3.0).unwrap();
        let s = log_kernel_split(&ConstantDensity(0.0), &frame, 0.5, &q).unwrap();
        assert_eq!((s.lhs, s.term1, s.term2), (0.0, 0.0, 0.0));
        let d = ProfileDensity::weighted(P::bubble(2.0).unwrap());
        let frame = RescalingFrame::new(origin(), 0.0).unwrap();
        let s = log_kernel_split(&d, &frame, 0.5, &q).unwrap();
        assert_eq!(s.term1, 0.0);
        assert_relative_eq!(s.lhs, s.term2, epsilon = 1e-12);
    }

    #[test]
    fn split_holds_for_bubble_four() {
        let q = QuadratureSpec::default();
        let b = P::bubble(4.0).unwrap();
        let frame = RescalingFrame::at(&b, origin()).unwrap();
        let s = log_kernel_split(&ProfileDensity::weighted(b), &frame, 0.5, &q).unwrap();
        assert!(s.residual() <= 1e-6, "{s:?}");
        let expected = 128f64.ln() / (4.0 * std::f64::consts::PI) * b.mass(0.5).unwrap();
        assert_relative_eq!(s.term1, expected, max_relative = 1e-9);
    }

    #[test]
    fn off_centre_mass_identity() {
        let q = QuadratureSpec::default();
        let a = P::annulus(5.0).unwrap();
        let c = Point::new(1.5, 0.0);
        let frame = RescalingFrame::at(&a, c).unwrap();
        let (m0, m1) = rescaled_mass_pair(&ProfileDensity::weighted(a), &frame, 0.4, &q).unwrap();
        assert!((m0 - m1).abs() <= 1e-8 * m0.max(1.0), "{m0} vs {m1}");
    }

    proptest! {
        #[test]
        fn rescaled_value_vanishes_at_centre(i in 1.0f64..1e3, x in -0.3f64..0.3, y in -0.3f64..0.3) {
            let b = P::bubble(i).unwrap();
            let c = Point::new(x, y);
            let frame = RescalingFrame::at(&b, c).unwrap();
            let r = rescale(&b, frame, 1e-3 / frame.scale).unwrap();
            prop_assert_eq!(r.value(origin()).unwrap(), 0.0);
        }
    }
}
