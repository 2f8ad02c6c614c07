//! Green function of the coercive operator `-Δ + ε(r)` on the unit disk with
//! pole at the origin.
//!
//! The pole is split off analytically: `G = -(1/2π) log r + h`, where
//! `h(1) = 0`, `h'(0) = 0` and
//!
//! ```text
//! -Δh + ε h = (ε / 2π) log r,
//! ```
//!
//! so that `ε ≡ 0` gives `h ≡ 0`. The remainder is discretised by a
//! cell-centred finite-volume scheme in `r dr` (second order) and solved
//! with the Thomas algorithm.

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::scalar::Real;

use super::field::RadialGrid;

/// `∫ r log r dr` antiderivative.
fn r_log_r<T: Real>(r: T) -> T {
    if r == T::zero() {
        T::zero()
    } else {
        r * r * (T::half() * r.ln() - T::lit(0.25))
    }
}

/// Regular part `h` at every node of a `[0, 1]` grid.
pub(crate) fn coercive_regular_part<T: Real, E: Fn(T) -> T>(eps: &E, grid: &RadialGrid<T>) -> Result<Vec<T>> {
    if grid.r_min != T::zero() || grid.r_max != T::one() {
        return Err(Error::InvalidParameter("coercive Green solve needs a grid on [0, 1]".into()));
    }
    let n = grid.n;
    let d = grid.step();
    let e: Vec<T> = (0..n).map(|k| eps(grid.node(k))).collect();
    if let Some(k) = e.iter().position(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be finite and ≥ 0 (node {k})")));
    }
    let unknowns = n - 1;
    let mut sub = vec![T::zero(); unknowns];
    let mut diag = vec![T::zero(); unknowns];
    let mut sup = vec![T::zero(); unknowns];
    let mut rhs = vec![T::zero(); unknowns];
    let source = T::inv_two_pi();
    let half_d = d * T::half();

    diag[0] = T::half() + e[0] * d * d / T::lit(8.0);
    sup[0] = -T::half();
    rhs[0] = e[0] * source * r_log_r(half_d);
    for j in 1..unknowns {
        let r = grid.node(j);
        let a = (r - half_d) / d;
        let c = (r + half_d) / d;
        sub[j] = -a;
        diag[j] = a + c + e[j] * r * d;
        sup[j] = -c;
        rhs[j] = e[j] * source * (r_log_r(r + half_d) - r_log_r(r - half_d));
    }
    let mut h = solve_tridiagonal(&sub, &diag, &sup, &rhs)?;
    h.push(T::zero());
    Ok(h)
}

/// `G(0, r)` at grid nodes `r > 0`, as `(r, G)` pairs.
pub fn green_coercive_nodes<T: Real, E: Fn(T) -> T>(eps: E, grid: &RadialGrid<T>) -> Result<Vec<(T, T)>> {
    let h = coercive_regular_part(&eps, grid)?;
    Ok((1..grid.n)
        .map(|k| {
            let r = grid.node(k);
            (r, -r.ln() * T::inv_two_pi() + h[k])
        })
        .collect())
}

/// `G(0, r_eval)` for `(-Δ + ε) G = δ_0` on the unit disk with `G = 0` on
/// the boundary. The regular part is interpolated with a cubic through the
/// four nearest nodes.
pub fn green_coercive_radial<T: Real, E: Fn(T) -> T>(eps: E, r_eval: T, grid: &RadialGrid<T>) -> Result<T> {
    if !(r_eval > T::zero() && r_eval < T::one()) {
        return Err(Error::InvalidParameter(format!("r_eval must lie in (0, 1), got {r_eval}")));
    }
    let h = coercive_regular_part(&eps, grid)?;
    let d = grid.step();
    let s = r_eval / d;
    let k = s.floor().to_usize().unwrap_or(0).clamp(1, grid.n - 3);
    let base = k - 1;
    let mut value = T::zero();
    for a in 0..4 {
        let mut w = T::one();
        let xa = T::from_usize_lossy(base + a);
        for b in 0..4 {
            if a != b {
                let xb = T::from_usize_lossy(base + b);
                w = w * (s - xb) / (xa - xb);
            }
        }
        value = value + w * h[base + a];
    }
    Ok(-r_eval.ln() * T::inv_two_pi() + value)
}
