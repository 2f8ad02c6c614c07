//! Functionals on profiles and sampled fields: extrema over compact sets,
//! masses of `V e^u`, boundary oscillation, the blow-up rescaling, the
//! logarithmic kernel split, sequence classification and `sup + C inf`
//! statistics.

mod classify;
mod rescale;
mod supinf;

use std::fmt;

use crate::error::{Error, Result};
use crate::families::RadialProfile;
use crate::green_disk::{disk_integral, Density, QuadratureSpec};
use crate::pde_solver::{Geometry, SampledField};
use crate::quadrature::{adaptive, gauss_legendre, graded_points, AdaptiveOptions};
use crate::scalar::{Point, Real};

pub use classify::{classify_sequence, BlowupCase, BlowupClassification, RegionTrend, Thresholds};
pub use rescale::{log_kernel_split, rescale, rescale_weight, rescaled_mass_pair, Rescaled, RescaledDensity, RescalingFrame, SplitTerms};
pub use supinf::{supinf_statistic, SupInfReport};

/// Samples used on circles when extrema of a grid field are refined.
const CIRCLE_SAMPLES: usize = 2048;

/// A compact set on which extrema and masses are taken. Annuli and circles
/// are centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompactRegion<T> {
    ClosedBall { center: Point<T>, radius: T },
    ClosedAnnulus { r_in: T, r_out: T },
    BoundaryCircle { radius: T },
}

impl<T: Real> CompactRegion<T> {
    pub fn ball(center: Point<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self::ClosedBall { center, radius })
    }

    pub fn annulus(r_in: T, r_out: T) -> Result<Self> {
        if !(r_in >= T::zero() && r_out > r_in) || !r_out.is_finite() {
            return Err(Error::InvalidParameter(format!("bad annulus [{r_in}, {r_out}]")));
        }
        Ok(Self::ClosedAnnulus { r_in, r_out })
    }

    pub fn circle(radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self::BoundaryCircle { radius })
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        match *self {
            Self::ClosedBall { center, radius } => (p - center).norm() <= radius,
            Self::ClosedAnnulus { r_in, r_out } => {
                let r = p.norm();
                r >= r_in && r <= r_out
            }
            Self::BoundaryCircle { radius } => p.norm() == radius,
        }
    }

    /// Range of `|x|` over the region.
    fn radial_range(&self) -> (T, T) {
        match *self {
            Self::ClosedBall { center, radius } => {
                let c = center.norm();
                ((c - radius).max(T::zero()), c + radius)
            }
            Self::ClosedAnnulus { r_in, r_out } => (r_in, r_out),
            Self::BoundaryCircle { radius } => (radius, radius),
        }
    }

    /// Points on the region's boundary curves, for refining grid extrema.
    fn boundary_samples(&self) -> Vec<Point<T>> {
        let circle = |c: Point<T>, r: T| {
            (0..CIRCLE_SAMPLES).map(move |k| {
                c + Point::from_polar(r, T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(CIRCLE_SAMPLES))
            })
        };
        let zero = Point::new(T::zero(), T::zero());
        match *self {
            Self::ClosedBall { center, radius } => circle(center, radius).collect(),
            Self::ClosedAnnulus { r_in, r_out } => circle(zero, r_in).chain(circle(zero, r_out)).collect(),
            Self::BoundaryCircle { radius } => circle(zero, radius).collect(),
        }
    }
}

impl<T: Real> fmt::Display for CompactRegion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ClosedBall { center, radius } => write!(f, "ball({},{};{})", center.re, center.im, radius),
            Self::ClosedAnnulus { r_in, r_out } => write!(f, "annulus({};{})", r_in, r_out),
            Self::BoundaryCircle { radius } => write!(f, "circle({})", radius),
        }
    }
}

/// A scalar function on a planar geometry: a closed-form profile or a
/// sampled grid field.
pub trait ScalarField<T: Real>: Sync {
    /// `u(p)`, or `None` outside the geometry.
    fn value(&self, p: Point<T>) -> Option<T>;

    /// The weight `V` that pairs with this field. Grid fields carry none
    /// and use `V ≡ 1`.
    fn weight(&self, _p: Point<T>) -> T {
        T::one()
    }

    /// True when the closed ball lies inside the geometry.
    fn contains_ball(&self, center: Point<T>, radius: T) -> bool;

    /// `(inf, sup)` of `u` over `K ∩ geometry`.
    fn extrema_on(&self, k: &CompactRegion<T>) -> Result<(T, T)>;

    /// Supremum over the whole geometry.
    fn global_sup(&self) -> T;

    /// Local maxima with value above `min_value`, in decreasing value.
    fn peak_candidates(&self, min_value: T) -> Vec<(Point<T>, T)>;

    /// Centre of radial symmetry of both `u` and its weight, if any.
    fn radial_center(&self) -> Option<Point<T>> {
        None
    }

    /// Radial breakpoints for quadrature about `center` within `rho`.
    fn radial_hints(&self, _center: Point<T>, _rho: T) -> Vec<T> {
        Vec::new()
    }

    /// Node spacing for grid fields; `None` for closed forms.
    fn resolution(&self) -> Option<T> {
        None
    }
}

impl<T: Real> ScalarField<T> for RadialProfile<T> {
    fn value(&self, p: Point<T>) -> Option<T> {
        self.eval_u(p.norm()).ok()
    }

    fn weight(&self, p: Point<T>) -> T {
        self.weight_unchecked(p.norm())
    }

    fn contains_ball(&self, center: Point<T>, radius: T) -> bool {
        let (a, b) = self.domain();
        let c = center.norm();
        let inner_ok = if a > T::zero() { c - radius >= a } else { true };
        inner_ok && c + radius <= b
    }

    fn extrema_on(&self, k: &CompactRegion<T>) -> Result<(T, T)> {
        let (lo, hi) = k.radial_range();
        let (a, b) = self.domain();
        let (lo, hi) = (lo.max(a), hi.min(b));
        if lo > hi {
            return Err(Error::EmptyRegion(format!("{k} misses the profile domain [{a}, {b}]")));
        }
        let mut inf = T::infinity();
        let mut sup = T::neg_infinity();
        for r in self.extremal_candidates(lo, hi) {
            let u = self.eval_u(r)?;
            inf = inf.min(u);
            sup = sup.max(u);
        }
        Ok((inf, sup))
    }

    fn global_sup(&self) -> T {
        let (a, b) = self.domain();
        self.extremal_candidates(a, b)
            .into_iter()
            .filter_map(|r| self.eval_u(r).ok())
            .fold(T::neg_infinity(), T::max)
    }

    fn peak_candidates(&self, min_value: T) -> Vec<(Point<T>, T)> {
        if self.domain().0 != T::zero() {
            return Vec::new();
        }
        match self.eval_u(T::zero()) {
            Ok(u) if u > min_value => vec![(Point::new(T::zero(), T::zero()), u)],
            _ => Vec::new(),
        }
    }

    fn radial_center(&self) -> Option<Point<T>> {
        Some(Point::new(T::zero(), T::zero()))
    }

    fn radial_hints(&self, center: Point<T>, rho: T) -> Vec<T> {
        if center != Point::new(T::zero(), T::zero()) {
            return Vec::new();
        }
        let mut pts = self.quadrature_points(rho.min(self.domain().1));
        pts.retain(|p| *p > T::zero() && *p < rho);
        pts
    }
}

impl<T: Real> ScalarField<T> for SampledField<T> {
    fn value(&self, p: Point<T>) -> Option<T> {
        self.value_at(p)
    }

    fn contains_ball(&self, center: Point<T>, radius: T) -> bool {
        match self.geometry() {
            Geometry::Rect(g) => {
                center.re - radius >= g.x_min
                    && center.re + radius <= g.x_max
                    && center.im - radius >= g.y_min
                    && center.im + radius <= g.y_max
            }
            Geometry::Radial(g) => {
                let c = center.norm();
                let inner_ok = if g.r_min > T::zero() { c - radius >= g.r_min } else { true };
                inner_ok && c + radius <= g.r_max
            }
        }
    }

    fn extrema_on(&self, k: &CompactRegion<T>) -> Result<(T, T)> {
        let mut inf = T::infinity();
        let mut sup = T::neg_infinity();
        let mut seen = false;
        let mut take = |v: T| {
            inf = inf.min(v);
            sup = sup.max(v);
            seen = true;
        };
        match self.geometry() {
            Geometry::Radial(g) => {
                let (lo, hi) = k.radial_range();
                let (lo, hi) = (lo.max(g.r_min), hi.min(g.r_max));
                if lo <= hi {
                    for (p, v) in self.nodes() {
                        if p.re >= lo && p.re <= hi {
                            take(v);
                        }
                    }
                    for r in [lo, hi] {
                        if let Some(v) = self.value_at(Point::new(r, T::zero())) {
                            take(v);
                        }
                    }
                }
            }
            Geometry::Rect(_) => {
                if !matches!(k, CompactRegion::BoundaryCircle { .. }) {
                    for (p, v) in self.nodes() {
                        if k.contains(p) {
                            take(v);
                        }
                    }
                }
                for p in k.boundary_samples() {
                    if let Some(v) = self.value_at(p) {
                        take(v);
                    }
                }
            }
        }
        if seen {
            Ok((inf, sup))
        } else {
            Err(Error::EmptyRegion(format!("{k} contains no samples of the field")))
        }
    }

    fn global_sup(&self) -> T {
        self.values().iter().copied().fold(T::neg_infinity(), T::max)
    }

    fn peak_candidates(&self, min_value: T) -> Vec<(Point<T>, T)> {
        let v = self.values();
        let mut out = Vec::new();
        match self.geometry() {
            Geometry::Radial(g) => {
                if g.r_min == T::zero() && v[0] > min_value && v[0] >= v[1] {
                    out.push((Point::new(T::zero(), T::zero()), v[0]));
                }
            }
            Geometry::Rect(g) => {
                for j in 1..g.ny - 1 {
                    for i in 1..g.nx - 1 {
                        let c = v[j * g.nx + i];
                        if c <= min_value {
                            continue;
                        }
                        let mut is_max = true;
                        let mut strict = false;
                        for dj in [-1isize, 0, 1] {
                            for di in [-1isize, 0, 1] {
                                if di == 0 && dj == 0 {
                                    continue;
                                }
                                let n = v[(j as isize + dj) as usize * g.nx + (i as isize + di) as usize];
                                is_max &= c >= n;
                                strict |= c > n;
                            }
                        }
                        if is_max && strict {
                            out.push((g.point(i, j), c));
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        out
    }

    fn resolution(&self) -> Option<T> {
        Some(match self.geometry() {
            Geometry::Radial(g) => g.step(),
            Geometry::Rect(g) => g.hx().max(g.hy()),
        })
    }
}

/// Weight paired with a field in [`mass_on`].
pub enum Weight<'a, T> {
    /// The field's own weight (`V` of a profile, `1` for grids).
    Natural,
    Constant(T),
    /// An arbitrary planar weight.
    General(&'a (dyn Fn(Point<T>) -> T + Sync)),
}

/// `V e^u` as a [`Density`], zero outside the field's geometry.
pub struct MassDensity<'a, T, U: ?Sized> {
    field: &'a U,
    weight: &'a Weight<'a, T>,
}

impl<'a, T: Real, U: ScalarField<T> + ?Sized> MassDensity<'a, T, U> {
    pub fn new(field: &'a U, weight: &'a Weight<'a, T>) -> Self {
        Self { field, weight }
    }
}

impl<T: Real, U: ScalarField<T> + ?Sized> Density<T> for MassDensity<'_, T, U> {
    fn eval(&self, y: Point<T>) -> T {
        match self.field.value(y) {
            Some(u) => {
                let w = match self.weight {
                    Weight::Natural => self.field.weight(y),
                    Weight::Constant(c) => *c,
                    Weight::General(f) => f(y),
                };
                w * u.exp()
            }
            None => T::zero(),
        }
    }

    fn is_radial_about(&self, center: Point<T>) -> bool {
        !matches!(self.weight, Weight::General(_)) && self.field.radial_center() == Some(center)
    }

    fn radial_hints(&self, center: Point<T>, rho: T) -> Vec<T> {
        self.field.radial_hints(center, rho)
    }
}

/// `sup_K u`.
pub fn sup_on<T: Real, U: ScalarField<T> + ?Sized>(u: &U, k: &CompactRegion<T>) -> Result<T> {
    Ok(u.extrema_on(k)?.1)
}

/// `inf_K u`.
pub fn inf_on<T: Real, U: ScalarField<T> + ?Sized>(u: &U, k: &CompactRegion<T>) -> Result<T> {
    Ok(u.extrema_on(k)?.0)
}

/// `sup - inf` of `u` over a circle; zero for every radial profile.
pub fn boundary_oscillation<T: Real, U: ScalarField<T> + ?Sized>(u: &U, circle: &CompactRegion<T>) -> Result<T> {
    if !matches!(circle, CompactRegion::BoundaryCircle { .. }) {
        return Err(Error::InvalidParameter(format!("boundary oscillation needs a circle, got {circle}")));
    }
    let (lo, hi) = u.extrema_on(circle)?;
    Ok(hi - lo)
}

/// `∫_K V e^u dx`.
///
/// Closed forms are integrated adaptively (one radial integral when the
/// integrand is radial about the region's centre); grid fields use a fixed
/// polar product rule whose radial panels do not exceed the grid spacing.
pub fn mass_on<T: Real, U: ScalarField<T> + ?Sized>(
    u: &U,
    weight: &Weight<'_, T>,
    k: &CompactRegion<T>,
    q: &QuadratureSpec<T>,
) -> Result<T> {
    if let Weight::Constant(c) = weight {
        if *c == T::zero() {
            return Ok(T::zero());
        }
    }
    let density = MassDensity::new(u, weight);
    let zero = Point::new(T::zero(), T::zero());
    let (center, r_in, r_out) = match *k {
        CompactRegion::BoundaryCircle { .. } => return Ok(T::zero()),
        CompactRegion::ClosedBall { center, radius } => (center, T::zero(), radius),
        CompactRegion::ClosedAnnulus { r_in, r_out } => (zero, r_in, r_out),
    };
    if let Some(h) = u.resolution() {
        return Ok(polar_rule(&density, center, r_in, r_out, h, q));
    }
    if r_in == T::zero() {
        return disk_integral(center, r_out, &density, q);
    }
    // Annulus about the origin.
    let mut pts = vec![r_in, r_out];
    pts.extend(density.radial_hints(zero, r_out).into_iter().filter(|p| *p > r_in));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let opts = AdaptiveOptions { abs_tol: q.abs_tol, rel_tol: T::lit(1e-12), max_intervals: 4000 };
    let e = Point::new(T::one(), T::zero());
    if density.is_radial_about(zero) {
        return Ok(adaptive(|r: T| r * density.eval(e * r), &pts, &opts)?.value * T::TAU());
    }
    let m = q.angular_nodes;
    let mut total = T::zero();
    for j in 0..m {
        let dir = Point::from_polar(T::one(), T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(m));
        total = total + adaptive(|r: T| r * density.eval(dir * r), &pts, &opts)?.value;
    }
    Ok(total * T::TAU() / T::from_usize_lossy(m))
}

/// Fixed polar Gauss rule over `r_in ≤ |y - c| ≤ r_out` for grid fields.
fn polar_rule<T: Real, D: Density<T>>(density: &D, c: Point<T>, r_in: T, r_out: T, h: T, q: &QuadratureSpec<T>) -> T {
    let (nodes, weights) = gauss_legendre::<T>(4);
    let mut pts = if r_in == T::zero() { graded_points(h, T::half(), 8) } else { vec![r_in] };
    let mut x = *pts.last().unwrap();
    while x < r_out {
        x = (x + h).min(r_out);
        pts.push(x);
    }
    let circumference = (T::TAU() * r_out / h).ceil().to_usize().unwrap_or(0);
    let m = q.angular_nodes.max(2 * circumference);
    let dirs: Vec<Point<T>> = (0..m)
        .map(|j| Point::from_polar(T::one(), T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(m)))
        .collect();
    let mut total = T::zero();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = (b - a) * T::half();
        let mid = (a + b) * T::half();
        for (t, wt) in nodes.iter().zip(&weights) {
            let r = mid + half * *t;
            let ring: T = dirs.iter().fold(T::zero(), |s, d| s + density.eval(c + *d * r));
            total = total + *wt * half * r * ring;
        }
    }
    total * T::TAU() / T::from_usize_lossy(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde_solver::RectGrid;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type P = RadialProfile<f64>;

    fn origin() -> Point<f64> {
        Point::new(0.0, 0.0)
    }

    #[test]
    fn extrema_of_bubbles() {
        let b = P::bubble(2.0).unwrap();
        let ball = CompactRegion::ball(origin(), 0.5).unwrap();
        assert_relative_eq!(sup_on(&b, &ball).unwrap(), 32f64.ln(), epsilon = 1e-14);
        let ann = CompactRegion::annulus(0.5, 1.0).unwrap();
        assert_relative_eq!(sup_on(&b, &ann).unwrap(), 8f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(inf_on(&b, &ann).unwrap(), (32.0f64 / 25.0).ln(), epsilon = 1e-14);
        let far = CompactRegion::annulus(3.0, 4.0).unwrap();
        assert!(matches!(sup_on(&b, &far), Err(Error::EmptyRegion(_))));
    }

    #[test]
    fn extrema_of_constant_field() {
        let g = RectGrid::centered_square(1.0f64, 21).unwrap();
        let f = SampledField::from_fn_rect(g, |_| 3.5, "").unwrap();
        let k = CompactRegion::ball(Point::new(0.1, 0.2), 0.3).unwrap();
        let (lo, hi) = u_extrema(&f, &k);
        assert_relative_eq!(lo, 3.5, epsilon = 1e-14);
        assert_relative_eq!(hi, 3.5, epsilon = 1e-14);
    }

    fn u_extrema(f: &SampledField<f64>, k: &CompactRegion<f64>) -> (f64, f64) {
        (inf_on(f, k).unwrap(), sup_on(f, k).unwrap())
    }

    #[test]
    fn masses() {
        let q = QuadratureSpec::default();
        let b = P::bubble(16.0).unwrap();
        let ball = CompactRegion::ball(origin(), 1.0).unwrap();
        let m = mass_on(&b, &Weight::Natural, &ball, &q).unwrap();
        assert_relative_eq!(m, 25.034_948_461_291_43, max_relative = 1e-9);
        assert_eq!(mass_on(&b, &Weight::Constant(0.0), &ball, &q).unwrap(), 0.0);
        let ann = CompactRegion::annulus(0.25, 0.5).unwrap();
        let m = mass_on(&b, &Weight::Natural, &ann, &q).unwrap();
        assert_relative_eq!(m, b.mass(0.5).unwrap() - b.mass(0.25).unwrap(), max_relative = 1e-9);
    }

    #[test]
    fn shafrir_mass_is_bounded_in_index() {
        let q = QuadratureSpec::default();
        let ball = CompactRegion::ball(origin(), 1.0).unwrap();
        let mut masses = Vec::new();
        for i in [10.0, 100.0, 1000.0] {
            let p = P::shafrir_scaled(i, 2.0).unwrap();
            let m = mass_on(&p, &Weight::Natural, &ball, &q).unwrap();
            assert_relative_eq!(m, p.weighted_mass(1.0).unwrap(), max_relative = 1e-8);
            masses.push(m);
        }
        assert!(masses.iter().all(|m| *m < 24.0 * std::f64::consts::PI));
    }

    #[test]
    fn grid_mass_of_bubble() {
        let b = P::bubble(4.0).unwrap();
        let g = RectGrid::centered_square(1.0f64, 401).unwrap();
        let f = SampledField::from_fn_rect(g, |p| b.eval_u(p.norm().min(1.0)).unwrap(), "").unwrap();
        let ball = CompactRegion::ball(origin(), 0.9).unwrap();
        let m = mass_on(&f, &Weight::Natural, &ball, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(m, b.mass(0.9).unwrap(), max_relative = 1e-3);
    }

    #[test]
    fn oscillation() {
        let circle = CompactRegion::circle(1.0).unwrap();
        for p in [P::bubble(3.0).unwrap(), P::shafrir(2.0).unwrap(), P::remark(5.0).unwrap()] {
            assert_eq!(boundary_oscillation(&p, &circle).unwrap(), 0.0);
        }
        let g = RectGrid::centered_square(1.0f64, 41).unwrap();
        let f = SampledField::from_fn_rect(g, |p| p.re, "").unwrap();
        assert_relative_eq!(boundary_oscillation(&f, &circle).unwrap(), 2.0, epsilon = 1e-12);
        let ball = CompactRegion::ball(origin(), 1.0).unwrap();
        assert!(boundary_oscillation(&f, &ball).is_err());
    }

    #[test]
    fn grid_peaks() {
        let g = RectGrid::centered_square(1.0f64, 81).unwrap();
        let f = SampledField::from_fn_rect(g, |p| {
            let a = -((p - Point::new(0.5, 0.0)).norm_sqr()) * 40.0;
            let b = -((p + Point::new(0.5, 0.0)).norm_sqr()) * 40.0;
            12.0 + a.exp().max(0.5 * b.exp())
        }, "")
        .unwrap();
        let peaks = f.peak_candidates(12.1);
        assert_eq!(peaks.len(), 2);
        assert_relative_eq!(peaks[0].0.re, 0.5, epsilon = 1e-12);
        assert_relative_eq!(peaks[1].0.re, -0.5, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn radial_profiles_have_zero_oscillation(i in 1.0f64..500.0, r in 0.05f64..1.0) {
            let c = CompactRegion::circle(r).unwrap();
            prop_assert_eq!(boundary_oscillation(&P::bubble(i).unwrap(), &c).unwrap(), 0.0);
            prop_assert_eq!(boundary_oscillation(&P::shafrir_scaled(i, 1.5).unwrap(), &c).unwrap(), 0.0);
        }

        #[test]
        fn sup_dominates_inf(i in 1.0f64..100.0, a in 0.0f64..0.5, w in 0.01f64..0.5) {
            let k = CompactRegion::annulus(a, a + w).unwrap();
            let b = P::bubble(i).unwrap();
            prop_assert!(sup_on(&b, &k).unwrap() >= inf_on(&b, &k).unwrap());
        }
    }
}
