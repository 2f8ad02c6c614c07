//! Gauss–Legendre rules, globally adaptive Gauss–Kronrod integration, and
//! geometric grading for integrands with an `r log r` type endpoint.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

/// Controls for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for AdaptiveOptions<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-9),
            max_intervals: 4000,
        }
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod rule on `[a, b]` with the embedded 7-point Gauss rule
/// providing the error estimate (QUADPACK scaling).
pub fn gauss_kronrod_15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Estimate<T> {
    let center = (a + b) * T::half();
    let half = (b - a) * T::half();
    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = res_k * T::half();
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hab = half.abs();
    let value = res_k * half;
    res_abs = res_abs * hab;
    res_asc = res_asc * hab;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    Estimate { value, error: err }
}

/// Globally adaptive integration of `f` over `[points[0], points.last()]`.
///
/// `points` must be increasing; they seed the initial partition, so known
/// kinks, jumps and singular endpoints should be listed there.
pub fn adaptive<T: Real, F: Fn(T) -> T>(
    f: F,
    points: &[T],
    opts: &AdaptiveOptions<T>,
) -> Result<Estimate<T>> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two breakpoints".into()));
    }
    let mut intervals: Vec<(T, T, Estimate<T>)> = Vec::with_capacity(points.len() * 4);
    for w in points.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidParameter("breakpoints must increase".into()));
        }
        if w[1] > w[0] {
            intervals.push((w[0], w[1], gauss_kronrod_15(&f, w[0], w[1])));
        }
    }
    loop {
        let (value, error) = intervals
            .iter()
            .fold((T::zero(), T::zero()), |(v, e), iv| (v + iv.2.value, e + iv.2.error));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(Estimate { value, error });
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .2.error.partial_cmp(&b.1 .2.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(k, _)| k);
        let Some(k) = worst else {
            return Ok(Estimate { value, error });
        };
        let (a, b, _) = intervals[k];
        let mid = (a + b) * T::half();
        let tiny = T::lit(100.0) * T::epsilon() * (a.abs().max(b.abs()).max(T::min_positive_value()));
        if intervals.len() >= opts.max_intervals || b - a <= tiny || !(mid > a && mid < b) {
            return Err(Error::Tolerance {
                estimate: value.as_f64(),
                error: error.as_f64(),
                tol: target.as_f64(),
            });
        }
        let left = gauss_kronrod_15(&f, a, mid);
        let right = gauss_kronrod_15(&f, mid, b);
        intervals[k] = (a, mid, left);
        intervals.push((mid, b, right));
    }
}

/// Breakpoints `0, ρ·q^levels, …, ρ·q, ρ` grading geometrically toward the
/// origin with ratio `q`.
pub fn graded_points<T: Real>(rho: T, ratio: T, levels: usize) -> Vec<T> {
    let mut pts = Vec::with_capacity(levels + 2);
    pts.push(T::zero());
    for k in (0..=levels).rev() {
        pts.push(rho * ratio.powi(k as i32));
    }
    pts
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Newton iteration in f64 from the Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = T::lit(-x);
        nodes[n - 1 - i] = T::lit(x);
        weights[i] = T::lit(w);
        weights[n - 1 - i] = T::lit(w);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre sum of `f` over consecutive breakpoint panels.
pub fn composite_gauss<T: Real, F: Fn(T) -> T>(f: F, points: &[T], nodes: &[T], weights: &[T]) -> T {
    let mut total = T::zero();
    for w in points.windows(2) {
        let c = (w[0] + w[1]) * T::half();
        let h = (w[1] - w[0]) * T::half();
        let mut s = T::zero();
        for (&x, &wt) in nodes.iter().zip(weights) {
            s = s + wt * f(c + h * x);
        }
        total = total + s * h;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_log_endpoint() {
        // ∫_0^1 r log r dr = -1/4
        let pts = graded_points(1.0f64, 0.5, 24);
        let est = adaptive(|r: f64| if r > 0.0 { r * r.ln() } else { 0.0 }, &pts, &AdaptiveOptions::default())
            .unwrap();
        assert!((est.value + 0.25).abs() < 1e-12, "{}", est.value);
    }

    #[test]
    fn adaptive_reports_unreachable_tolerance() {
        let opts = AdaptiveOptions { abs_tol: 0.0f64, rel_tol: 0.0, max_intervals: 8 };
        let err = adaptive(|x: f64| (1.0 / x.max(1e-300)).sqrt(), &[0.0, 1.0], &opts).unwrap_err();
        assert!(matches!(err, Error::Tolerance { .. }));
    }

    #[test]
    fn works_in_single_precision() {
        let opts = AdaptiveOptions { abs_tol: 1e-5f32, rel_tol: 1e-5, max_intervals: 100 };
        let est = adaptive(|x: f32| x.sin(), &[0.0, std::f32::consts::PI], &opts).unwrap();
        assert!((est.value - 2.0).abs() < 1e-5);
    }
}
