//! Dirichlet Green function of a disk, its regular part, the Poisson kernel,
//! the Green representation formula, and quadrature of logarithmic
//! potentials.
//!
//! Disks of radius `R` centred at `c` are handled by mapping to the unit
//! disk, `ξ = (x - c)/R`. On the unit disk
//!
//! ```text
//! G(x, y) = (1/2π) log(|1 - x̄y| / |x - y|)
//!         = (1/4π) log(1 + (1 - |x|²)(1 - |y|²) / |x - y|²)
//! ```
//!
//! and the second form is what is evaluated: it is exactly symmetric in
//! floating point and manifestly positive.

use crate::error::{Error, Result};
use crate::families::RadialProfile;
use crate::quadrature::{adaptive, composite_gauss, gauss_legendre, graded_points, AdaptiveOptions};
use crate::scalar::{Point, Real};

/// Geometric grading ratio for panels approaching a log singularity.
pub const GRADING_RATIO: f64 = 0.5;
/// Number of graded levels.
pub const GRADING_LEVELS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenKernel<T> {
    radius: T,
    center: Point<T>,
}

/// Node counts and tolerance for the disk quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub boundary_nodes: usize,
    /// Gauss–Legendre nodes per graded radial panel.
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub abs_tol: T,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(boundary_nodes: usize, radial_nodes: usize, angular_nodes: usize, abs_tol: T) -> Result<Self> {
        if boundary_nodes < 8 || radial_nodes < 8 || angular_nodes < 8 {
            return Err(Error::InvalidParameter("quadrature node counts must be at least 8".into()));
        }
        if !(abs_tol > T::zero()) {
            return Err(Error::InvalidParameter("abs_tol must be positive".into()));
        }
        Ok(Self { boundary_nodes, radial_nodes, angular_nodes, abs_tol })
    }

    fn adaptive_options(&self) -> AdaptiveOptions<T> {
        AdaptiveOptions { abs_tol: self.abs_tol, rel_tol: T::zero(), max_intervals: 4000 }
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self { boundary_nodes: 256, radial_nodes: 12, angular_nodes: 128, abs_tol: T::lit(1e-8) }
    }
}

/// A planar density `f(y)` integrated against the disk kernels.
pub trait Density<T: Real>: Sync {
    fn eval(&self, y: Point<T>) -> T;

    /// True when the density depends only on `|y - center|`.
    fn is_radial_about(&self, _center: Point<T>) -> bool {
        false
    }

    /// Radii (distances from `center`, below `rho`) where the density has
    /// kinks or scale changes.
    fn radial_hints(&self, _center: Point<T>, _rho: T) -> Vec<T> {
        Vec::new()
    }
}

/// Constant density.
#[derive(Debug, Clone, Copy)]
pub struct ConstantDensity<T>(pub T);

impl<T: Real> Density<T> for ConstantDensity<T> {
    fn eval(&self, _y: Point<T>) -> T {
        self.0
    }

    fn is_radial_about(&self, _center: Point<T>) -> bool {
        true
    }
}

/// Wraps a closure as a density.
pub struct FnDensity<F>(pub F);

impl<T: Real, F: Fn(Point<T>) -> T + Sync> Density<T> for FnDensity<F> {
    fn eval(&self, y: Point<T>) -> T {
        (self.0)(y)
    }
}

/// `V e^u` (or `e^u`) of a profile centred at the origin; zero outside the
/// profile's radial domain.
#[derive(Debug, Clone, Copy)]
pub struct ProfileDensity<T> {
    pub profile: RadialProfile<T>,
    pub weighted: bool,
}

impl<T: Real> ProfileDensity<T> {
    pub fn weighted(profile: RadialProfile<T>) -> Self {
        Self { profile, weighted: true }
    }
}

impl<T: Real> Density<T> for ProfileDensity<T> {
    fn eval(&self, y: Point<T>) -> T {
        let r = y.norm();
        match self.profile.eval_u(r) {
            Ok(u) => {
                let w = if self.weighted { self.profile.weight_unchecked(r) } else { T::one() };
                w * u.exp()
            }
            Err(_) => T::zero(),
        }
    }

    fn is_radial_about(&self, center: Point<T>) -> bool {
        center.re == T::zero() && center.im == T::zero()
    }

    fn radial_hints(&self, center: Point<T>, rho: T) -> Vec<T> {
        if !self.is_radial_about(center) {
            return Vec::new();
        }
        let mut pts = self.profile.quadrature_points(rho.min(self.profile.domain().1));
        pts.retain(|p| *p > T::zero() && *p < rho);
        pts
    }
}

impl<T: Real> GreenKernel<T> {
    pub fn new(radius: T, center: Point<T>) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { radius, center })
    }

    pub fn unit() -> Self {
        Self { radius: T::one(), center: Point::new(T::zero(), T::zero()) }
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn center(&self) -> Point<T> {
        self.center
    }

    fn to_unit(&self, x: Point<T>) -> Result<Point<T>> {
        let xi = (x - self.center) / self.radius;
        if xi.norm_sqr() < T::one() {
            Ok(xi)
        } else {
            Err(Error::OutsideDisk { x: x.re.as_f64(), y: x.im.as_f64() })
        }
    }

    /// Dirichlet Green function `G(x, y)` of `-Δ`.
    pub fn green(&self, x: Point<T>, y: Point<T>) -> Result<T> {
        let a = self.to_unit(x)?;
        let b = self.to_unit(y)?;
        let d2 = (a - b).norm_sqr();
        if d2 == T::zero() {
            return Err(Error::Singular);
        }
        let num = (T::one() - a.norm_sqr()) * (T::one() - b.norm_sqr());
        Ok((num / d2).ln_1p() / (T::lit(4.0) * T::PI()))
    }

    /// `H(x, y) = G(x, y) + (1/2π) log|x - y|`, continuous up to `x = y`.
    pub fn regular_part(&self, x: Point<T>, y: Point<T>) -> Result<T> {
        let a = self.to_unit(x)?;
        let b = self.to_unit(y)?;
        // |1 - ā b|² = |a - b|² + (1 - |a|²)(1 - |b|²)
        let num = (a - b).norm_sqr() + (T::one() - a.norm_sqr()) * (T::one() - b.norm_sqr());
        Ok(num.ln() / (T::lit(4.0) * T::PI()) + self.radius.ln() * T::inv_two_pi())
    }

    /// Positive Poisson kernel `P(x, s) = -∂_ν G(x, s)` (outward normal),
    /// normalised so that `∫ P(x, s) ds = 1` with arc-length `ds`.
    pub fn poisson_kernel(&self, x: Point<T>, s: Point<T>) -> Result<T> {
        let a = self.to_unit(x)?;
        let sigma = (s - self.center) / self.radius;
        if (sigma.norm() - T::one()).abs() > T::lit(1e-10).max(T::epsilon() * T::lit(64.0)) {
            return Err(Error::InvalidParameter("Poisson kernel needs a boundary point".into()));
        }
        let p = (T::one() - a.norm_sqr()) / (a - sigma).norm_sqr() * T::inv_two_pi();
        Ok(p / self.radius)
    }

    /// Boundary point at polar angle `theta`.
    pub fn boundary_point(&self, theta: T) -> Point<T> {
        self.center + Point::from_polar(self.radius, theta)
    }

    /// Distance from interior `x` to the circle along direction `e` (unit).
    fn exit_distance(&self, x: Point<T>, e: Point<T>) -> T {
        let d = x - self.center;
        let b = d.re * e.re + d.im * e.im;
        let c = self.radius * self.radius - d.norm_sqr();
        let disc = (b * b + c).sqrt();
        if b <= T::zero() {
            disc - b
        } else {
            c / (b + disc)
        }
    }

    /// Green representation `∫_B G(x, y) f(y) dy + ∫_∂B P(x, s) g(s) ds`.
    ///
    /// The volume term uses a polar product rule centred at `x` with
    /// geometrically graded radial panels; the boundary term uses the
    /// periodic trapezoidal rule. Each angular rule starts at its configured
    /// node count and is doubled (at most six times) until it agrees with
    /// the previous rule to half of `q.abs_tol`; a remaining discrepancy
    /// above `q.abs_tol` is reported as [`Error::Tolerance`].
    pub fn represent<D, G>(&self, f: &D, g: G, x: Point<T>, q: &QuadratureSpec<T>) -> Result<T>
    where
        D: Density<T> + ?Sized,
        G: Fn(Point<T>) -> T,
    {
        self.to_unit(x)?;
        let (gl_x, gl_w) = gauss_legendre::<T>(q.radial_nodes);
        let tau = T::TAU();

        let half_tol = q.abs_tol * T::half();

        let volume_sum = |m: usize| {
            let mut total = T::zero();
            for k in 0..m {
                let theta = tau * T::from_usize_lossy(k) / T::from_usize_lossy(m);
                let e = Point::from_polar(T::one(), theta);
                let rho_max = self.exit_distance(x, e);
                let pts = graded_points(rho_max, T::lit(GRADING_RATIO), GRADING_LEVELS);
                total = total
                    + composite_gauss(
                        |rho: T| {
                            let y = x + e * rho;
                            match self.green(x, y) {
                                Ok(gv) => rho * gv * f.eval(y),
                                Err(_) => T::zero(),
                            }
                        },
                        &pts,
                        &gl_x,
                        &gl_w,
                    );
            }
            total * tau / T::from_usize_lossy(m)
        };
        let (volume, volume_err) = refine(volume_sum, q.angular_nodes, half_tol);

        // `x` is interior, so the kernel cannot fail; a NaN would surface
        // through the tolerance check below.
        let boundary_sum = |nb: usize| {
            let mut total = T::zero();
            for k in 0..nb {
                let s = self.boundary_point(tau * T::from_usize_lossy(k) / T::from_usize_lossy(nb));
                total = total + self.poisson_kernel(x, s).unwrap_or_else(|_| T::nan()) * g(s);
            }
            total * tau * self.radius / T::from_usize_lossy(nb)
        };
        let (boundary, boundary_err) = refine(boundary_sum, q.boundary_nodes, half_tol);

        let value = volume + boundary;
        let error = volume_err + boundary_err;
        if !(error <= q.abs_tol) {
            return Err(Error::Tolerance { estimate: value.as_f64(), error: error.as_f64(), tol: q.abs_tol.as_f64() });
        }
        Ok(value)
    }
}

/// Doublings allowed beyond the configured node count of a periodic rule.
const MAX_DOUBLINGS: usize = 6;

/// Evaluates a periodic trapezoidal rule at `n, 2n, 4n, …` nodes until two
/// successive values agree to `tol`. Returns the finest value and the last
/// difference.
fn refine<T: Real, F: Fn(usize) -> T>(rule: F, n: usize, tol: T) -> (T, T) {
    let mut coarse = rule(n.div_ceil(2));
    let mut fine = rule(n);
    let mut err = (fine - coarse).abs();
    let mut m = n;
    for _ in 0..MAX_DOUBLINGS {
        if err <= tol {
            break;
        }
        m *= 2;
        coarse = fine;
        fine = rule(m);
        err = (fine - coarse).abs();
    }
    (fine, err)
}

/// `∫_{B(y0, R)} -(1/2π) log|y0 - y| f(y) dy`.
///
/// Polar product quadrature centred at the singularity: trapezoidal in the
/// angle (a single angle when the density is radial about `y0`) and
/// adaptive Gauss–Kronrod on geometrically graded radial panels.
pub fn log_potential<T: Real, D: Density<T> + ?Sized>(
    y0: Point<T>,
    radius: T,
    density: &D,
    q: &QuadratureSpec<T>,
) -> Result<T> {
    if !(radius > T::zero()) {
        return Err(Error::InvalidParameter("log_potential radius must be positive".into()));
    }
    let mut pts = graded_points(radius, T::lit(GRADING_RATIO), GRADING_LEVELS);
    pts.extend(density.radial_hints(y0, radius));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let opts = q.adaptive_options();
    let kernel = |rho: T, e: Point<T>| {
        if rho > T::zero() {
            -rho * rho.ln() * T::inv_two_pi() * density.eval(y0 + e * rho)
        } else {
            T::zero()
        }
    };
    if density.is_radial_about(y0) {
        let e = Point::new(T::one(), T::zero());
        let est = adaptive(|rho| kernel(rho, e), &pts, &opts)?;
        return Ok(est.value * T::TAU());
    }
    let m = q.angular_nodes;
    let per_angle = AdaptiveOptions { abs_tol: opts.abs_tol, ..opts };
    let mut total = T::zero();
    for k in 0..m {
        let e = Point::from_polar(T::one(), T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(m));
        total = total + adaptive(|rho| kernel(rho, e), &pts, &per_angle)?.value;
    }
    Ok(total * T::TAU() / T::from_usize_lossy(m))
}

/// `∫_{B(c, R)} f(y) dy` with the same polar rule as [`log_potential`].
pub fn disk_integral<T: Real, D: Density<T> + ?Sized>(
    c: Point<T>,
    radius: T,
    density: &D,
    q: &QuadratureSpec<T>,
) -> Result<T> {
    let mut pts = vec![T::zero(), radius];
    pts.extend(density.radial_hints(c, radius));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let opts = AdaptiveOptions { abs_tol: q.abs_tol, rel_tol: T::lit(1e-12), max_intervals: 4000 };
    if density.is_radial_about(c) {
        let e = Point::new(T::one(), T::zero());
        let est = adaptive(|rho: T| rho * density.eval(c + e * rho), &pts, &opts)?;
        return Ok(est.value * T::TAU());
    }
    let m = q.angular_nodes;
    let mut total = T::zero();
    for k in 0..m {
        let e = Point::from_polar(T::one(), T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(m));
        total = total + adaptive(|rho: T| rho * density.eval(c + e * rho), &pts, &opts)?.value;
    }
    Ok(total * T::TAU() / T::from_usize_lossy(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    fn pt(x: f64, y: f64) -> Point<f64> {
        Point::new(x, y)
    }
    use approx::assert_relative_eq;

    fn unit() -> GreenKernel<f64> {
        GreenKernel::unit()
    }

    #[test]
    fn green_examples() {
        let g = unit().green(pt(0.0, 0.0), pt(0.5, 0.0)).unwrap();
        assert_relative_eq!(g, 0.110_317_800_076_325_8, epsilon = 1e-15);
        assert!(matches!(unit().green(pt(0.2, 0.1), pt(0.2, 0.1)), Err(Error::Singular)));
        assert!(matches!(unit().green(pt(1.0, 0.0), pt(0.2, 0.1)), Err(Error::OutsideDisk { .. })));
    }

    #[test]
    fn green_matches_textbook_form() {
        let (x, y) = (pt(0.3, -0.2), pt(-0.5, 0.45));
        let direct = ((1.0 - x.conj() * y).norm() / (x - y).norm()).ln() / std::f64::consts::TAU;
        assert_relative_eq!(unit().green(x, y).unwrap(), direct, max_relative = 1e-13);
    }

    #[test]
    fn scaled_disk_is_conformal_image() {
        let k = GreenKernel::new(2.0, pt(1.0, -1.0)).unwrap();
        let (x, y) = (pt(1.5, -0.5), pt(0.2, -1.7));
        let xi = (x - pt(1.0, -1.0)) / 2.0;
        let eta = (y - pt(1.0, -1.0)) / 2.0;
        assert_relative_eq!(k.green(x, y).unwrap(), unit().green(xi, eta).unwrap(), max_relative = 1e-14);
        let h = k.regular_part(x, x).unwrap();
        let r2 = (x - pt(1.0, -1.0)).norm_sqr();
        assert_relative_eq!(h, ((4.0 - r2) / 2.0).ln() / std::f64::consts::TAU, max_relative = 1e-13);
    }

    #[test]
    fn regular_part_examples() {
        assert_eq!(unit().regular_part(pt(0.0, 0.0), pt(0.0, 0.0)).unwrap(), 0.0);
        let h = unit().regular_part(pt(0.6, 0.0), pt(0.6, 0.0)).unwrap();
        assert_relative_eq!(h, -0.071_028_798_421_472_96, epsilon = 1e-15);
    }

    #[test]
    fn regular_part_is_harmonic_in_y() {
        let k = unit();
        let x = pt(0.3, 0.1);
        let h = 1e-3;
        for y in [pt(-0.4, 0.2), pt(0.1, -0.6), pt(0.5, 0.5)] {
            let c = k.regular_part(x, y).unwrap();
            let lap = (k.regular_part(x, y + pt(h, 0.0)).unwrap()
                + k.regular_part(x, y - pt(h, 0.0)).unwrap()
                + k.regular_part(x, y + pt(0.0, h)).unwrap()
                + k.regular_part(x, y - pt(0.0, h)).unwrap()
                - 4.0 * c)
                / (h * h);
            assert!(lap.abs() <= 1e-6, "{lap}");
        }
    }

    #[test]
    fn poisson_kernel_examples() {
        let k = unit();
        for t in [0.0, 1.0, 2.5] {
            assert_relative_eq!(k.poisson_kernel(pt(0.0, 0.0), k.boundary_point(t)).unwrap(), 1.0 / std::f64::consts::TAU, max_relative = 1e-14);
        }
        assert_relative_eq!(k.poisson_kernel(pt(0.5, 0.0), pt(1.0, 0.0)).unwrap(), 0.477_464_829_275_686, max_relative = 1e-14);
        assert!(k.poisson_kernel(pt(0.5, 0.0), pt(0.9, 0.0)).is_err());
    }

    #[test]
    fn represent_examples() {
        let k = unit();
        let q = QuadratureSpec::default();
        let v = k.represent(&ConstantDensity(4.0), |_| 0.0, pt(0.0, 0.0), &q).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
        let v = k.represent(&ConstantDensity(0.0), |s| s.re, pt(0.25, 0.0), &q).unwrap();
        assert!((v - 0.25).abs() < 1e-10);
        let v = k.represent(&ConstantDensity(0.0), |_| 3.5, pt(-0.4, 0.7), &q).unwrap();
        assert!((v - 3.5).abs() < 1e-10);
    }

    #[test]
    fn represent_on_a_shifted_disk() {
        // u = R² - |x - c|² solves -Δu = 4 with zero trace.
        let k = GreenKernel::new(0.5, pt(0.3, 0.2)).unwrap();
        let x = pt(0.4, 0.1);
        let v = k.represent(&ConstantDensity(4.0), |_| 0.0, x, &QuadratureSpec::default()).unwrap();
        assert!((v - (0.25 - (x - pt(0.3, 0.2)).norm_sqr())).abs() < 1e-8);
    }

    #[test]
    fn represent_reports_tolerance_failure() {
        let q = QuadratureSpec { boundary_nodes: 8, radial_nodes: 8, angular_nodes: 8, abs_tol: 1e-14 };
        let err = unit().represent(&ConstantDensity(4.0), |s| s.re * s.re, pt(0.9, 0.0), &q).unwrap_err();
        assert!(matches!(err, Error::Tolerance { .. }));
        assert!(QuadratureSpec::<f64>::new(4, 8, 8, 1e-6).is_err());
    }

    #[test]
    fn log_potential_examples() {
        let q = QuadratureSpec::default();
        let v: f64 = log_potential(pt(0.0, 0.0), 1.0, &ConstantDensity(1.0), &q).unwrap();
        assert!((v - 0.25).abs() < 1e-10);
        let v: f64 = log_potential(pt(0.3, 0.3), std::f64::consts::E.sqrt(), &ConstantDensity(1.0), &q).unwrap();
        assert!(v.abs() < 1e-10);
        let v: f64 = log_potential(pt(0.0, 0.0), 0.7, &ConstantDensity(0.0), &q).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn log_potential_non_radial_density() {
        // f(y) = y₁ about the origin: the angular average vanishes.
        let q = QuadratureSpec::default();
        let v: f64 = log_potential(pt(0.0, 0.0), 0.8, &FnDensity(|y: Point<f64>| y.re), &q).unwrap();
        assert!(v.abs() < 1e-10);
        // f ≡ 1 through the generic angular path.
        let v: f64 = log_potential(pt(0.0, 0.0), 0.8, &FnDensity(|_y: Point<f64>| 1.0), &q).unwrap();
        let r: f64 = 0.8;
        assert!((v - r * r * (1.0 - 2.0 * r.ln()) / 4.0).abs() < 1e-10);
    }

    #[test]
    fn disk_integral_of_bubble_density() {
        let p = RadialProfile::bubble(8.0).unwrap();
        let q = QuadratureSpec::default();
        let m = disk_integral(pt(0.0, 0.0), 1.0, &ProfileDensity::weighted(p), &q).unwrap();
        assert_relative_eq!(m, p.weighted_mass(1.0).unwrap(), max_relative = 1e-9);
    }
}
