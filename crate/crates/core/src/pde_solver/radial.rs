//! Radial initial- and boundary-value problems for `u'' + u'/r + V e^u = 0`.

use crate::error::{Error, Result};
use crate::families::{RadialProfile, WeightSpec};
use crate::roots::brent;
use crate::scalar::Real;

use super::field::{Geometry, RadialGrid, SampledField};
use super::SolveReport;

/// Values of `u` above this are treated as blow-up.
pub const BLOWUP_CUTOFF: f64 = 700.0;

/// Radial weight `V(r) ≥ 0`.
pub trait RadialWeight<T: Real>: Sync {
    fn value(&self, r: T) -> T;

    /// Upper bound of `V` on the grid.
    fn bound(&self) -> T;

    /// Radii where `V` jumps.
    fn breaks(&self) -> Vec<T> {
        Vec::new()
    }
}

impl<T: Real> RadialWeight<T> for WeightSpec<T> {
    fn value(&self, r: T) -> T {
        WeightSpec::value(self, r)
    }

    fn bound(&self) -> T {
        WeightSpec::bound(self)
    }

    fn breaks(&self) -> Vec<T> {
        match self {
            WeightSpec::Constant(_) => Vec::new(),
            WeightSpec::PiecewiseRadial { breaks, .. } => breaks.clone(),
        }
    }
}

impl<T: Real> RadialWeight<T> for RadialProfile<T> {
    fn value(&self, r: T) -> T {
        self.weight_unchecked(r)
    }

    fn bound(&self) -> T {
        self.weight_spec().bound()
    }

    fn breaks(&self) -> Vec<T> {
        self.joint().into_iter().collect()
    }
}

/// A closure weight with a declared bound.
pub struct FnWeight<F, T> {
    pub f: F,
    pub bound: T,
}

impl<T: Real, F: Fn(T) -> T + Sync> RadialWeight<T> for FnWeight<F, T> {
    fn value(&self, r: T) -> T {
        (self.f)(r)
    }

    fn bound(&self) -> T {
        self.bound
    }
}

/// Options shared by the radial solvers.
#[derive(Debug, Clone, Copy)]
pub struct RadialOptions<T> {
    /// Residual threshold for `SolveReport::converged`.
    pub tol: T,
    /// Shooting scan step in `u0`.
    pub scan_step: T,
    /// `|F|` below which an extremum of the shooting map counts as a
    /// double root.
    pub fold_tol: T,
    /// Upper limit on `V_max e^{u0} h²`; larger starts are not resolved by
    /// the grid and are excluded from the shooting scan.
    pub resolution_limit: T,
}

impl<T: Real> Default for RadialOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-6), scan_step: T::lit(0.25), fold_tol: T::lit(1e-9), resolution_limit: T::lit(0.05) }
    }
}

/// Solution branch of the Dirichlet problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Low,
    High,
}

/// `(u, u', ∂u/∂u0, ∂u'/∂u0)` along the grid.
struct Trajectory<T> {
    u: Vec<T>,
    du: Vec<T>,
    z: Vec<T>,
}

fn integrate<T: Real, W: RadialWeight<T> + ?Sized>(
    u0: T,
    weight: &W,
    grid: &RadialGrid<T>,
    variational: bool,
) -> Result<Trajectory<T>> {
    if grid.r_min != T::zero() {
        return Err(Error::InvalidParameter("radial IVP needs a grid starting at r = 0".into()));
    }
    let n = grid.n;
    let h = grid.step();
    let cutoff = T::lit(BLOWUP_CUTOFF);
    let mut u = Vec::with_capacity(n);
    let mut du = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(if variational { n } else { 0 });
    u.push(u0);
    du.push(T::zero());
    if variational {
        z.push(T::one());
    }

    // Series start: u = u0 + a r² + b r⁴ with a = -V e^{u0}/4, b = V² e^{2u0}/64.
    let v0 = weight.value(T::zero());
    let a = -v0 * u0.exp() / T::lit(4.0);
    let b = v0 * v0 * (T::two() * u0).exp() / T::lit(64.0);
    let h2 = h * h;
    let mut state = [
        u0 + a * h2 + b * h2 * h2,
        T::two() * a * h + T::lit(4.0) * b * h2 * h,
        T::one() + a * h2 + T::two() * b * h2 * h2,
        T::two() * a * h + T::lit(8.0) * b * h2 * h,
    ];
    if !state[0].is_finite() || state[0] > cutoff {
        return Err(Error::BlowUp { radius: 0.0, cutoff: BLOWUP_CUTOFF });
    }
    u.push(state[0]);
    du.push(state[1]);
    if variational {
        z.push(state[2]);
    }

    let rhs = |r: T, y: &[T; 4]| -> [T; 4] {
        let ve = weight.value(r) * y[0].exp();
        [y[1], -ve - y[1] / r, y[3], -ve * y[2] - y[3] / r]
    };
    let half = T::half();
    let sixth = T::one() / T::lit(6.0);
    for k in 1..n - 1 {
        let r = grid.node(k);
        let k1 = rhs(r, &state);
        let s2 = std::array::from_fn(|m| state[m] + half * h * k1[m]);
        let k2 = rhs(r + half * h, &s2);
        let s3 = std::array::from_fn(|m| state[m] + half * h * k2[m]);
        let k3 = rhs(r + half * h, &s3);
        let s4 = std::array::from_fn(|m| state[m] + h * k3[m]);
        let k4 = rhs(r + h, &s4);
        state = std::array::from_fn(|m| state[m] + sixth * h * (k1[m] + T::two() * (k2[m] + k3[m]) + k4[m]));
        if !state[0].is_finite() || state[0] > cutoff {
            return Err(Error::BlowUp { radius: r.as_f64(), cutoff: BLOWUP_CUTOFF });
        }
        u.push(state[0]);
        du.push(state[1]);
        if variational {
            z.push(state[2]);
        }
    }
    Ok(Trajectory { u, du, z })
}

/// Max-norm of `u'' + u'/r + V e^u` with `u''` from fourth-order central
/// differences of the integrated `u'`, skipping stencils across weight
/// jumps and the two nodes nearest each end.
fn radial_residual<T: Real, W: RadialWeight<T> + ?Sized>(traj: &Trajectory<T>, weight: &W, grid: &RadialGrid<T>) -> T {
    let h = grid.step();
    let breaks = weight.breaks();
    let twelve_h = T::lit(12.0) * h;
    let mut worst = T::zero();
    for k in 2..grid.n.saturating_sub(2) {
        let r = grid.node(k);
        if breaks.iter().any(|b| (*b - r).abs() <= T::lit(2.5) * h) {
            continue;
        }
        let p = &traj.du;
        let dp = (-p[k + 2] + T::lit(8.0) * (p[k + 1] - p[k - 1]) + p[k - 2]) / twelve_h;
        let res = dp + p[k] / r + weight.value(r) * traj.u[k].exp();
        worst = worst.max(res.abs());
    }
    worst
}

fn report<T: Real, W: RadialWeight<T> + ?Sized>(
    traj: Trajectory<T>,
    weight: &W,
    grid: &RadialGrid<T>,
    opts: &RadialOptions<T>,
    iterations: usize,
    metadata: String,
) -> Result<SolveReport<T>> {
    let residual_norm = radial_residual(&traj, weight, grid);
    let solution = SampledField::new(Geometry::Radial(*grid), traj.u, metadata)?;
    Ok(SolveReport { converged: residual_norm <= opts.tol, iterations, residual_norm, solution })
}

/// Integrates `u'' + u'/r + V e^u = 0`, `u(0) = u0`, `u'(0) = 0` with RK4
/// after a fourth-order series start.
pub fn solve_radial_ivp<T: Real, W: RadialWeight<T> + ?Sized>(
    u0: T,
    weight: &W,
    grid: &RadialGrid<T>,
    opts: &RadialOptions<T>,
) -> Result<SolveReport<T>> {
    let traj = integrate(u0, weight, grid, false)?;
    report(traj, weight, grid, opts, grid.n - 1, format!("radial-ivp:u0={u0:.16e}"))
}

/// Derivative `u'` at the grid nodes of an IVP solution.
pub fn radial_ivp_derivative<T: Real, W: RadialWeight<T> + ?Sized>(u0: T, weight: &W, grid: &RadialGrid<T>) -> Result<Vec<T>> {
    Ok(integrate(u0, weight, grid, false)?.du)
}

/// Dirichlet solution found by shooting.
#[derive(Debug, Clone)]
pub struct BvpSolution<T> {
    /// Central value `u(0)` of the selected branch.
    pub u0: T,
    /// All central values solving the problem, increasing.
    pub roots: Vec<T>,
    pub report: SolveReport<T>,
}

/// Solves `u(r_max) = g` by shooting on `u0`.
///
/// The shooting map `F(u0) = u(r_max; u0) - g` and its derivative (from the
/// variational equation) are sampled on `[g - 60, g + 120]`, truncated above
/// where the grid no longer resolves the central peak. Extrema of `F` split
/// the range into monotone pieces, each bracketed root is refined with
/// Brent's method, and an extremum with `|F| ≤ fold_tol` counts as a double
/// root. `branch` selects the smallest or largest root.
pub fn solve_radial_bvp<T: Real, W: RadialWeight<T> + ?Sized>(
    g: T,
    weight: &W,
    branch: Branch,
    grid: &RadialGrid<T>,
    opts: &RadialOptions<T>,
) -> Result<BvpSolution<T>> {
    if !g.is_finite() {
        return Err(Error::InvalidParameter("boundary value must be finite".into()));
    }
    let lo = g - T::lit(60.0);
    let mut hi = g + T::lit(120.0);
    let vb = weight.bound();
    let h = grid.step();
    if vb > T::zero() {
        hi = hi.min((opts.resolution_limit / (vb * h * h)).ln());
    }
    let no_solution = || Error::NoSolution { g: g.as_f64(), lo: lo.as_f64(), hi: (g + T::lit(120.0)).as_f64() };
    if hi <= lo {
        return Err(no_solution());
    }

    let last = grid.n - 1;
    let shoot = |u0: T| -> Result<(T, T)> {
        let t = integrate(u0, weight, grid, true)?;
        Ok((t.u[last] - g, t.z[last]))
    };

    let steps = ((hi - lo) / opts.scan_step).ceil().to_usize().unwrap_or(1).max(1);
    let mut samples: Vec<(T, T, T)> = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let u0 = if k == steps { hi } else { lo + opts.scan_step * T::from_usize_lossy(k) };
        match shoot(u0) {
            Ok((f, df)) => samples.push((u0, f, df)),
            Err(Error::BlowUp { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if samples.len() < 2 {
        return Err(no_solution());
    }

    let xtol = T::lit(1e-13);
    // Monotone pieces: sample endpoints plus refined extrema of F.
    let mut knots: Vec<(T, T)> = vec![(samples[0].0, samples[0].1)];
    for w in samples.windows(2) {
        let (a, _, da) = w[0];
        let (b, fb, db) = w[1];
        if da.signum() != db.signum() && da != T::zero() && db != T::zero() {
            let x = brent(|u0| shoot(u0).map(|s| s.1), a, b, xtol, 200)?;
            knots.push((x, shoot(x)?.0));
        }
        knots.push((b, fb));
    }
    let mut roots: Vec<T> = knots.iter().filter(|k| k.1.abs() <= opts.fold_tol).map(|k| k.0).collect();
    for w in knots.windows(2) {
        let (a, fa) = w[0];
        let (b, fb) = w[1];
        if fa.abs() > opts.fold_tol && fb.abs() > opts.fold_tol && fa.signum() != fb.signum() {
            roots.push(brent(|u0| shoot(u0).map(|s| s.0), a, b, xtol, 200)?);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-10));
    let u0 = match branch {
        Branch::Low => roots.first(),
        Branch::High => roots.last(),
    }
    .copied()
    .ok_or_else(no_solution)?;
    let traj = integrate(u0, weight, grid, false)?;
    let report = report(traj, weight, grid, opts, samples.len(), format!("radial-bvp:g={g:.16e}:u0={u0:.16e}"))?;
    Ok(BvpSolution { u0, roots, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::RadialProfile;

    fn grid(n: usize) -> RadialGrid<f64> {
        RadialGrid::new(1.0, n).unwrap()
    }

    #[test]
    fn ivp_reproduces_unit_bubble() {
        let rep = solve_radial_ivp(8f64.ln(), &WeightSpec::Constant(1.0), &grid(1025), &RadialOptions::default()).unwrap();
        let u1 = *rep.solution.values().last().unwrap();
        assert!((u1 - 2f64.ln()).abs() < 1e-6, "{u1}");
        assert!(rep.converged, "{}", rep.residual_norm);
    }

    #[test]
    fn ivp_with_zero_weight_is_constant() {
        let rep = solve_radial_ivp(-3.25, &WeightSpec::Constant(0.0), &grid(64), &RadialOptions::default()).unwrap();
        assert!(rep.solution.values().iter().all(|&v| v == -3.25));
    }

    #[test]
    fn ivp_matches_bubble_family() {
        let b = RadialProfile::bubble(4.0).unwrap();
        let g = grid(2049);
        let rep = solve_radial_ivp(b.eval_u(0.0).unwrap(), &b, &g, &RadialOptions::default()).unwrap();
        for (k, v) in rep.solution.values().iter().enumerate() {
            assert!((v - b.eval_u(g.node(k)).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn ivp_detects_blowup() {
        // Negative weight makes e^u grow without bound.
        let w = FnWeight { f: |_r: f64| -50.0, bound: 0.0 };
        let err = solve_radial_ivp(5.0, &w, &RadialGrid::new(3.0, 256).unwrap(), &RadialOptions::default()).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn ivp_rejects_annulus_grid() {
        let g = RadialGrid::annulus(1.0, 2.0, 64).unwrap();
        assert!(solve_radial_ivp(0.0, &WeightSpec::Constant(1.0), &g, &RadialOptions::default()).is_err());
    }

    #[test]
    fn bvp_fold_point_gives_unit_bubble() {
        let sol = solve_radial_bvp(2f64.ln(), &WeightSpec::Constant(1.0), Branch::Low, &grid(2049), &RadialOptions::default()).unwrap();
        assert!((sol.u0 - 8f64.ln()).abs() < 1e-6, "{}", sol.u0);
    }

    #[test]
    fn bvp_harmonic_case() {
        let sol = solve_radial_bvp(0.7, &WeightSpec::Constant(0.0), Branch::High, &grid(64), &RadialOptions::default()).unwrap();
        assert!((sol.u0 - 0.7).abs() < 1e-10);
        assert!(sol.report.solution.values().iter().all(|v| (v - 0.7).abs() < 1e-10));
    }

    #[test]
    fn bvp_two_branches() {
        let i: f64 = 4.0;
        let g = (8.0 * i * i / ((1.0 + i * i) * (1.0 + i * i))).ln();
        let opts = RadialOptions::default();
        let low = solve_radial_bvp(g, &WeightSpec::Constant(1.0), Branch::Low, &grid(2049), &opts).unwrap();
        let high = solve_radial_bvp(g, &WeightSpec::Constant(1.0), Branch::High, &grid(2049), &opts).unwrap();
        assert!((low.u0 - (8.0 / (i * i)).ln()).abs() < 1e-8, "{}", low.u0);
        assert!((high.u0 - (8.0 * i * i).ln()).abs() < 1e-8, "{}", high.u0);
        assert!(low.u0 < high.u0);
    }

    #[test]
    fn bvp_without_solution() {
        let err = solve_radial_bvp(1.0, &WeightSpec::Constant(1.0), Branch::Low, &grid(256), &RadialOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoSolution { .. }));
    }
}
