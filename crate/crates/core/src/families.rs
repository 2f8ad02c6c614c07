//! Closed-form radial solutions of `-Δu = V e^u` that blow up, collapse, or
//! violate the volume bound, together with their exact derivatives, weights
//! and masses.
//!
//! All families are radial about the origin. Derivatives are hand-written
//! closed forms; the `r^{2β}` terms are evaluated through `softplus` and
//! `sigmoid` of `2β log r` so that large exponents do not overflow.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, AdaptiveOptions, Estimate};
use crate::scalar::Real;

/// Margin around a piecewise joint inside which derivative-based
/// evaluations are refused.
pub const JOINT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `log(8i² / (1 + i²r²)²)`, `V ≡ 1`.
    StandardBubble,
    /// Vanishing bubble with parameter `μ → ∞`.
    RemarkBubble,
    /// Shafrir's piecewise profile with exponent `β`, joint at `r = 1`.
    ShafrirPiecewise,
    /// `u(ir) + 2 log i` for the piecewise profile, joint at `r = 1/i`.
    ShafrirScaled,
    /// `2 log(2i r^{i-1} / (1 + r^{2i}))` on `1 ≤ r ≤ 2`, `V ≡ 2`.
    AnnulusFamily,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::StandardBubble,
        Family::RemarkBubble,
        Family::ShafrirPiecewise,
        Family::ShafrirScaled,
        Family::AnnulusFamily,
    ];
}

/// Which branch to use when evaluating derivatives at a piecewise joint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Inner,
    Outer,
}

/// Piecewise-constant radial weight.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec<T> {
    Constant(T),
    /// `values[k]` applies on `[breaks[k-1], breaks[k])`; `breaks` has one
    /// entry fewer than `values` and the last value extends to infinity.
    PiecewiseRadial { breaks: Vec<T>, values: Vec<T> },
}

impl<T: Real> WeightSpec<T> {
    pub fn piecewise(breaks: Vec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::InvalidParameter("piecewise weight needs one more value than breaks".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("weight breaks must increase".into()));
        }
        if values.iter().any(|v| *v < T::zero() || !v.is_finite()) {
            return Err(Error::InvalidParameter("weights must be finite and nonnegative".into()));
        }
        Ok(Self::PiecewiseRadial { breaks, values })
    }

    pub fn value(&self, r: T) -> T {
        match self {
            Self::Constant(c) => *c,
            Self::PiecewiseRadial { breaks, values } => {
                let k = breaks.iter().take_while(|b| r >= **b).count();
                values[k]
            }
        }
    }

    /// Upper bound `b` of the weight.
    pub fn bound(&self) -> T {
        match self {
            Self::Constant(c) => *c,
            Self::PiecewiseRadial { values, .. } => values.iter().fold(T::zero(), |a, &v| a.max(v)),
        }
    }

    pub fn satisfies_bound(&self, b: T) -> bool {
        match self {
            Self::Constant(c) => *c >= T::zero() && *c <= b,
            Self::PiecewiseRadial { values, .. } => values.iter().all(|v| *v >= T::zero() && *v <= b),
        }
    }
}

/// `(u, u', u'')` at one radius.
#[derive(Debug, Clone, Copy)]
struct Jet<T> {
    u: T,
    du: T,
    d2u: T,
}

/// One member of a closed-form family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProfile<T> {
    family: Family,
    index: T,
    beta: T,
    r_min: T,
    r_max: T,
    literal: bool,
}

impl<T: Real> RadialProfile<T> {
    fn build(family: Family, index: T, beta: T) -> Result<Self> {
        if !(index > T::zero()) || !index.is_finite() {
            return Err(Error::InvalidParameter(format!("index must be positive, got {index}")));
        }
        if matches!(family, Family::ShafrirPiecewise | Family::ShafrirScaled) && !(beta >= T::one()) {
            return Err(Error::InvalidParameter(format!("beta must be >= 1, got {beta}")));
        }
        let (r_min, r_max) = match family {
            Family::AnnulusFamily => (T::one(), T::two()),
            Family::ShafrirPiecewise => (T::zero(), T::lit(4.0)),
            _ => (T::zero(), T::one()),
        };
        Ok(Self { family, index, beta, r_min, r_max, literal: false })
    }

    /// `log(8i²/(1+i²r²)²)` on the unit disk.
    pub fn bubble(i: T) -> Result<Self> {
        Self::build(Family::StandardBubble, i, T::one())
    }

    /// Vanishing bubble `log(8μ²/(μ²+r²)²)`, an exact solution of `-Δu = e^u`.
    pub fn remark(mu: T) -> Result<Self> {
        Self::build(Family::RemarkBubble, mu, T::one())
    }

    /// The unnormalised form `log(1/(μ²+r²)²)`, which solves
    /// `-Δu = 8μ² e^u`; the weight reported is `8μ²`.
    pub fn remark_literal(mu: T) -> Result<Self> {
        let mut p = Self::build(Family::RemarkBubble, mu, T::one())?;
        p.literal = true;
        Ok(p)
    }

    /// Unscaled piecewise profile with exponent `beta`, on `[0, 4]`.
    pub fn shafrir(beta: T) -> Result<Self> {
        Self::build(Family::ShafrirPiecewise, T::one(), beta)
    }

    /// `u(ir) + 2 log i` for the piecewise profile with exponent `beta`.
    pub fn shafrir_scaled(i: T, beta: T) -> Result<Self> {
        Self::build(Family::ShafrirScaled, i, beta)
    }

    /// The scaled profile with `β = i`, for which the volume bound fails.
    pub fn unbounded_volume(i: T) -> Result<Self> {
        Self::build(Family::ShafrirScaled, i, i)
    }

    /// `2 log(2i r^{i-1}/(1+r^{2i}))` on the annulus `1 ≤ r ≤ 2`.
    pub fn annulus(i: T) -> Result<Self> {
        Self::build(Family::AnnulusFamily, i, T::one())
    }

    /// Restricts or extends the radial domain. The annulus family is fixed
    /// to `[1, 2]`.
    pub fn with_domain(mut self, r_min: T, r_max: T) -> Result<Self> {
        if self.family == Family::AnnulusFamily {
            if r_min != T::one() || r_max != T::two() {
                return Err(Error::InvalidParameter("annulus family lives on [1, 2]".into()));
            }
            return Ok(self);
        }
        if !(r_min >= T::zero() && r_max > r_min) || !r_max.is_finite() {
            return Err(Error::InvalidParameter(format!("bad domain [{r_min}, {r_max}]")));
        }
        self.r_min = r_min;
        self.r_max = r_max;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn index(&self) -> T {
        self.index
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn is_literal(&self) -> bool {
        self.literal
    }

    pub fn domain(&self) -> (T, T) {
        (self.r_min, self.r_max)
    }

    /// Radius where the weight jumps, if any.
    pub fn joint(&self) -> Option<T> {
        match self.family {
            Family::ShafrirPiecewise => Some(T::one()),
            Family::ShafrirScaled => Some(T::one() / self.index),
            _ => None,
        }
    }

    /// Radial length scale on which the profile varies.
    pub fn characteristic_scale(&self) -> T {
        match self.family {
            Family::StandardBubble | Family::ShafrirScaled => T::one() / self.index,
            Family::RemarkBubble | Family::ShafrirPiecewise => T::one(),
            Family::AnnulusFamily => T::one() / self.index,
        }
    }

    fn check_domain(&self, r: T) -> Result<()> {
        if r >= self.r_min && r <= self.r_max {
            Ok(())
        } else {
            Err(Error::OutsideDomain { r: r.as_f64(), min: self.r_min.as_f64(), max: self.r_max.as_f64() })
        }
    }

    fn check_joint(&self, r: T) -> Result<()> {
        if let Some(j) = self.joint() {
            if (r - j).abs() <= T::lit(JOINT_MARGIN) {
                return Err(Error::AtJoint { r: r.as_f64(), joint: j.as_f64(), margin: JOINT_MARGIN });
            }
        }
        Ok(())
    }

    fn jet(&self, r: T, side: Side) -> Jet<T> {
        match self.family {
            Family::StandardBubble => bubble_jet(self.index, r),
            Family::RemarkBubble => {
                let mut j = bubble_jet(T::one() / self.index, r);
                if self.literal {
                    j.u = j.u - (T::lit(8.0) * self.index * self.index).ln();
                }
                j
            }
            Family::ShafrirPiecewise => shafrir_jet(self.beta, r, side),
            Family::ShafrirScaled => {
                let i = self.index;
                let j = shafrir_jet(self.beta, i * r, side);
                Jet { u: j.u + T::two() * i.ln(), du: i * j.du, d2u: i * i * j.d2u }
            }
            Family::AnnulusFamily => outer_jet(self.index, r),
        }
    }

    fn natural_side(&self, r: T) -> Side {
        match self.joint() {
            Some(j) if r > j => Side::Outer,
            _ => Side::Inner,
        }
    }

    /// Exact value `u(r)`.
    pub fn eval_u(&self, r: T) -> Result<T> {
        self.check_domain(r)?;
        Ok(self.jet(r, self.natural_side(r)).u)
    }

    /// Exact radial derivative `u'(r)`.
    pub fn eval_du(&self, r: T) -> Result<T> {
        self.check_domain(r)?;
        self.check_joint(r)?;
        if r == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.jet(r, self.natural_side(r)).du)
    }

    /// Derivative from one side, valid also at a joint.
    pub fn eval_du_one_sided(&self, r: T, side: Side) -> Result<T> {
        self.check_domain(r)?;
        if r == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.jet(r, side).du)
    }

    /// Exact second radial derivative `u''(r)`.
    pub fn eval_d2u(&self, r: T) -> Result<T> {
        self.check_domain(r)?;
        self.check_joint(r)?;
        Ok(self.jet(r, self.natural_side(r)).d2u)
    }

    /// Weight `V(r)` making the profile an exact solution. At a joint the
    /// inner value is returned.
    pub fn eval_v(&self, r: T) -> Result<T> {
        self.check_domain(r)?;
        Ok(self.weight_unchecked(r))
    }

    pub(crate) fn weight_unchecked(&self, r: T) -> T {
        match self.family {
            Family::StandardBubble => T::one(),
            Family::RemarkBubble => {
                if self.literal {
                    T::lit(8.0) * self.index * self.index
                } else {
                    T::one()
                }
            }
            Family::ShafrirPiecewise | Family::ShafrirScaled => {
                let rho = if self.family == Family::ShafrirScaled { self.index * r } else { r };
                if rho <= T::one() {
                    T::two() / (self.beta * self.beta)
                } else {
                    T::two()
                }
            }
            Family::AnnulusFamily => T::two(),
        }
    }

    /// Weight as a [`WeightSpec`].
    pub fn weight_spec(&self) -> WeightSpec<T> {
        match self.family {
            Family::ShafrirPiecewise | Family::ShafrirScaled => {
                let j = self.joint().unwrap_or_else(T::one);
                // Inner value applies on [0, j]; the break is nudged so that
                // `value(j)` returns the inner weight.
                let brk = j + j * T::epsilon();
                WeightSpec::PiecewiseRadial {
                    breaks: vec![brk],
                    values: vec![T::two() / (self.beta * self.beta), T::two()],
                }
            }
            _ => WeightSpec::Constant(self.weight_unchecked(self.r_max)),
        }
    }

    /// `-(u'' + u'/r) - V e^u` from closed-form derivatives; at the origin
    /// the Laplacian is `2u''(0)`.
    pub fn residual(&self, r: T) -> Result<T> {
        self.check_domain(r)?;
        self.check_joint(r)?;
        let j = self.jet(r, self.natural_side(r));
        let lap = if r == T::zero() { T::two() * j.d2u } else { j.d2u + j.du / r };
        Ok(-lap - self.weight_unchecked(r) * j.u.exp())
    }

    /// `∫ e^u dx` over `B_R` (or over `1 ≤ |x| ≤ R` for the annulus) from
    /// the closed-form antiderivative.
    pub fn mass(&self, radius: T) -> Result<T> {
        self.check_domain(radius)?;
        Ok(self.closed_mass(radius, false))
    }

    /// `∫ V e^u dx` over the same region as [`Self::mass`].
    pub fn weighted_mass(&self, radius: T) -> Result<T> {
        self.check_domain(radius)?;
        Ok(self.closed_mass(radius, true))
    }

    fn closed_mass(&self, radius: T, weighted: bool) -> T {
        let pi = T::PI();
        let four = T::lit(4.0);
        let eight_pi = T::lit(8.0) * pi;
        match self.family {
            Family::StandardBubble => bubble_mass(self.index, radius),
            Family::RemarkBubble => {
                let m = bubble_mass(T::one() / self.index, radius);
                if self.literal && !weighted {
                    m / (T::lit(8.0) * self.index * self.index)
                } else {
                    m
                }
            }
            Family::ShafrirPiecewise | Family::ShafrirScaled => {
                let rho = if self.family == Family::ShafrirScaled { self.index * radius } else { radius };
                let beta = self.beta;
                let inner = rho.min(T::one());
                let inner_sq = inner * inner;
                let mut m = if weighted {
                    eight_pi * inner_sq / (T::one() + inner_sq)
                } else {
                    four * pi * beta * beta * inner_sq / (T::one() + inner_sq)
                };
                if rho > T::one() {
                    let tail = four * pi * beta * (T::half() - (-T::two() * beta * rho.ln()).sigmoid());
                    m = m + if weighted { T::two() * tail } else { tail };
                }
                m
            }
            Family::AnnulusFamily => {
                let i = self.index;
                let m = four * pi * i * (T::half() - (-T::two() * i * radius.ln()).sigmoid());
                if weighted {
                    T::two() * m
                } else {
                    m
                }
            }
        }
    }

    /// Breakpoints for radial quadrature on `[r_min, radius]`: the joint and
    /// a geometric ladder around the characteristic scale.
    pub fn quadrature_points(&self, radius: T) -> Vec<T> {
        let mut pts = vec![self.r_min, radius];
        if let Some(j) = self.joint() {
            if j > self.r_min && j < radius {
                pts.push(j);
            }
        }
        let s = self.characteristic_scale();
        let mut x = s / T::lit(16.0);
        while x < radius - self.r_min {
            let p = self.r_min + x;
            if p < radius {
                pts.push(p);
            }
            x = x * T::two();
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    /// [`Self::mass`] by adaptive quadrature of `2π ∫ e^{u(r)} r dr`.
    pub fn mass_quadrature(&self, radius: T, opts: &AdaptiveOptions<T>) -> Result<Estimate<T>> {
        self.radial_quadrature(radius, false, opts)
    }

    /// [`Self::weighted_mass`] by adaptive quadrature.
    pub fn weighted_mass_quadrature(&self, radius: T, opts: &AdaptiveOptions<T>) -> Result<Estimate<T>> {
        self.radial_quadrature(radius, true, opts)
    }

    fn radial_quadrature(&self, radius: T, weighted: bool, opts: &AdaptiveOptions<T>) -> Result<Estimate<T>> {
        self.check_domain(radius)?;
        let pts = self.quadrature_points(radius);
        let est = adaptive(
            |r: T| {
                let j = self.jet(r, self.natural_side(r));
                let w = if weighted { self.weight_unchecked(r) } else { T::one() };
                w * j.u.exp() * r
            },
            &pts,
            opts,
        )?;
        Ok(Estimate { value: est.value * T::TAU(), error: est.error * T::TAU() })
    }

    /// Radii in `[a, b]` at which the extrema of `u` over that interval are
    /// attained: the endpoints plus interior critical points. Every family
    /// is non-increasing in `r`, so there are no interior critical points.
    pub fn extremal_candidates(&self, a: T, b: T) -> Vec<T> {
        vec![a, b]
    }
}

fn bubble_jet<T: Real>(lambda: T, r: T) -> Jet<T> {
    let l2 = lambda * lambda;
    let q = T::one() + l2 * r * r;
    let four = T::lit(4.0);
    Jet {
        u: (T::lit(8.0) * l2).ln() - T::two() * (l2 * r * r).ln_1p(),
        du: -four * l2 * r / q,
        d2u: -four * l2 * (T::one() - l2 * r * r) / (q * q),
    }
}

fn bubble_mass<T: Real>(lambda: T, radius: T) -> T {
    let s = lambda * lambda * radius * radius;
    T::lit(8.0) * T::PI() * s / (T::one() + s)
}

/// Inner branch `2 log β + 2 log(2/(1+ρ²))` or the outer branch.
fn shafrir_jet<T: Real>(beta: T, rho: T, side: Side) -> Jet<T> {
    match side {
        Side::Inner => {
            let q = T::one() + rho * rho;
            let four = T::lit(4.0);
            Jet {
                u: T::two() * beta.ln() + four.ln() - T::two() * (rho * rho).ln_1p(),
                du: -four * rho / q,
                d2u: -four * (T::one() - rho * rho) / (q * q),
            }
        }
        Side::Outer => outer_jet(beta, rho),
    }
}

/// `2 log(2β ρ^{β-1}/(1+ρ^{2β}))` for `ρ > 0`.
fn outer_jet<T: Real>(beta: T, rho: T) -> Jet<T> {
    let two = T::two();
    let four = T::lit(4.0);
    let l = rho.ln();
    let t = two * beta * l;
    let s = t.sigmoid();
    let sc = (-t).sigmoid();
    let bm1 = beta - T::one();
    let r2 = rho * rho;
    Jet {
        u: two * (two * beta).ln() + two * bm1 * l - two * t.softplus(),
        du: two * bm1 / rho - four * beta * s / rho,
        d2u: -two * bm1 / r2 - four * beta * ((two * beta - T::one()) * s * sc - s * s) / r2,
    }
}

impl<T: Real> fmt::Display for RadialProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::StandardBubble => write!(f, "bubble:{}", self.index),
            Family::RemarkBubble if self.literal => write!(f, "remark-literal:{}", self.index),
            Family::RemarkBubble => write!(f, "remark:{}", self.index),
            Family::ShafrirPiecewise => write!(f, "shafrir:{}:{}", self.index, self.beta),
            Family::ShafrirScaled => write!(f, "shafrir-scaled:{}:{}", self.index, self.beta),
            Family::AnnulusFamily => write!(f, "annulus:{}", self.index),
        }
    }
}

/// Parses a `family:index[:beta]` descriptor.
///
/// Names: `bubble`, `remark`, `remark-literal`, `shafrir`,
/// `shafrir-scaled`, `annulus`. For `shafrir-scaled` an omitted `beta`
/// means `beta = index`.
impl FromStr for RadialProfile<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |k: usize| -> Result<f64> {
            parts
                .get(k)
                .ok_or_else(|| Error::Parse(format!("descriptor `{s}` is missing field {k}")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("descriptor `{s}`: {e}")))
        };
        if parts.len() > 3 {
            return Err(Error::Parse(format!("descriptor `{s}` has too many fields")));
        }
        match parts[0] {
            "bubble" => Self::bubble(num(1)?),
            "remark" => Self::remark(num(1)?),
            "remark-literal" => Self::remark_literal(num(1)?),
            "shafrir" => {
                let mut p = Self::shafrir(num(2)?)?;
                p.index = num(1)?;
                Ok(p)
            }
            "shafrir-scaled" => {
                let i = num(1)?;
                let beta = if parts.len() == 3 { num(2)? } else { i };
                Self::shafrir_scaled(i, beta)
            }
            "annulus" => Self::annulus(num(1)?),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type P = RadialProfile<f64>;
    #[test]
    fn bubble_values() {
        let b1 = P::bubble(1.0).unwrap();
        assert_relative_eq!(b1.eval_u(0.0).unwrap(), 8f64.ln(), epsilon = 1e-15);
        let b2 = P::bubble(2.0).unwrap();
        // log(32/25) = 0.24686007793152581
        assert_relative_eq!(b2.eval_u(1.0).unwrap(), 0.246_860_077_931_525_8, epsilon = 1e-15);
        assert_relative_eq!(b1.eval_du(1.0).unwrap(), -2.0, epsilon = 1e-15);
        assert_eq!(b2.eval_du(0.0).unwrap(), 0.0);
    }

    #[test]
    fn gradient_spike_at_inverse_index() {
        for i in [1.0, 7.0, 100.0, 1000.0] {
            let b = P::bubble(i).unwrap();
            assert_relative_eq!(b.eval_du(1.0 / i).unwrap().abs(), 2.0 * i, max_relative = 1e-15);
        }
    }

    #[test]
    fn sum_of_center_and_fixed_radius_converges() {
        let k: f64 = 0.5;
        let limit = (64.0 / k.powi(4)).ln();
        let b = P::bubble(1e6).unwrap();
        let s = b.eval_u(0.0).unwrap() + b.eval_u(k).unwrap();
        assert!((s - limit).abs() < 1e-9);
    }

    #[test]
    fn weights() {
        let s = P::shafrir_scaled(10.0, 2.0).unwrap();
        assert_eq!(s.eval_v(0.05).unwrap(), 0.5);
        assert_eq!(s.eval_v(0.5).unwrap(), 2.0);
        assert_eq!(P::bubble(3.0).unwrap().eval_v(0.7).unwrap(), 1.0);
        assert_eq!(P::annulus(5.0).unwrap().eval_v(1.5).unwrap(), 2.0);
        assert_eq!(P::remark_literal(3.0).unwrap().eval_v(0.2).unwrap(), 72.0);
        let w = s.weight_spec();
        assert_eq!(w.value(0.1), 0.5);
        assert_eq!(w.value(0.2), 2.0);
        assert!(w.satisfies_bound(2.0));
    }

    #[test]
    fn residual_examples() {
        let b = P::bubble(7.0).unwrap();
        assert!(b.residual(0.3).unwrap().abs() <= 1e-8);
        assert!(b.residual(0.0).unwrap().abs() <= 1e-8);
        let s = P::shafrir_scaled(10.0, 1.5).unwrap();
        assert!(s.residual(0.02).unwrap().abs() <= 1e-8);
        let r = P::remark(4.0).unwrap();
        assert!(r.residual(0.5).unwrap().abs() <= 1e-8);
        let lit = P::remark_literal(4.0).unwrap();
        assert!(lit.residual(0.5).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn joints_are_refused() {
        let s = P::shafrir_scaled(10.0, 2.0).unwrap();
        assert!(matches!(s.eval_du(0.1), Err(Error::AtJoint { .. })));
        assert!(matches!(s.residual(0.1 + 1e-10), Err(Error::AtJoint { .. })));
        let inner = s.eval_du_one_sided(0.1, Side::Inner).unwrap();
        let outer = s.eval_du_one_sided(0.1, Side::Outer).unwrap();
        // u is C¹ across the joint.
        assert_relative_eq!(inner, outer, max_relative = 1e-12);
        let p = P::shafrir(3.0).unwrap();
        assert!(matches!(p.eval_d2u(1.0), Err(Error::AtJoint { .. })));
        assert_relative_eq!(p.eval_u(1.0).unwrap(), 2.0 * 3f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn domain_errors() {
        let a = P::annulus(4.0).unwrap();
        assert!(matches!(a.eval_u(0.5), Err(Error::OutsideDomain { .. })));
        assert!(P::bubble(2.0).unwrap().eval_u(1.5).is_err());
        assert!(RadialProfile::<f64>::bubble(0.0).is_err());
        assert!(RadialProfile::<f64>::shafrir_scaled(4.0, 0.5).is_err());
        assert!(a.with_domain(0.0, 2.0).is_err());
    }

    #[test]
    fn mass_closed_forms() {
        let pi = std::f64::consts::PI;
        let b = P::bubble(16.0).unwrap();
        assert_relative_eq!(b.mass(1.0).unwrap(), 8.0 * pi * 256.0 / 257.0, max_relative = 1e-14);
        let r = P::remark(4.0).unwrap();
        assert_relative_eq!(r.mass(1.0).unwrap(), 8.0 * pi / 17.0, max_relative = 1e-14);
        let a = P::annulus(5.0).unwrap();
        let expected = 4.0 * pi * 5.0 * (0.5 - 1.0 / (1.0 + 2f64.powi(10)));
        assert_relative_eq!(a.mass(2.0).unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn mass_quadrature_agrees_with_closed_form() {
        let opts = AdaptiveOptions::default();
        let profiles = [
            P::bubble(64.0).unwrap(),
            P::remark(9.0).unwrap(),
            P::remark_literal(2.0).unwrap(),
            P::shafrir(2.5).unwrap(),
            P::shafrir_scaled(20.0, 1.5).unwrap(),
            P::unbounded_volume(12.0).unwrap(),
            P::annulus(30.0).unwrap(),
        ];
        for p in profiles {
            let r = p.domain().1;
            for weighted in [false, true] {
                let (closed, quad) = if weighted {
                    (p.weighted_mass(r).unwrap(), p.weighted_mass_quadrature(r, &opts).unwrap().value)
                } else {
                    (p.mass(r).unwrap(), p.mass_quadrature(r, &opts).unwrap().value)
                };
                assert_relative_eq!(closed, quad, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn descriptors_round_trip() {
        for d in ["bubble:8", "shafrir-scaled:16:2", "annulus:5", "remark:4", "remark-literal:4", "shafrir:1:3"] {
            let p: RadialProfile<f64> = d.parse().unwrap();
            assert_eq!(p.to_string(), d);
        }
        let q: RadialProfile<f64> = "shafrir-scaled:7".parse().unwrap();
        assert_eq!(q.beta(), 7.0);
        assert!("blob:3".parse::<RadialProfile<f64>>().is_err());
        assert!("bubble".parse::<RadialProfile<f64>>().is_err());
    }

    #[test]
    fn single_precision_profile() {
        let b = RadialProfile::<f32>::bubble(4.0).unwrap();
        assert!(b.residual(0.3).unwrap().abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn bubble_decreases_in_index_outside_core(i in 1.0f64..50.0, r in 0.05f64..1.0) {
            prop_assume!(i * r > 1.0);
            let a = P::bubble(i).unwrap().eval_u(r).unwrap();
            let b = P::bubble(i * 1.01).unwrap().eval_u(r).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn profiles_are_radially_nonincreasing(k in 0usize..5, idx in 1.0f64..40.0, t in 0.0f64..1.0) {
            let p = match k {
                0 => P::bubble(idx),
                1 => P::remark(idx),
                2 => P::shafrir(1.0 + idx / 10.0),
                3 => P::shafrir_scaled(idx, 2.0),
                _ => P::annulus(idx),
            }.unwrap();
            let (a, b) = p.domain();
            let r1 = a + (b - a) * t;
            let r2 = (r1 + (b - a) * 0.01).min(b);
            prop_assert!(p.eval_u(r2).unwrap() <= p.eval_u(r1).unwrap() + 1e-12);
        }
    }
}
