//! Five-point finite differences for `-Δu = V e^u` on a rectangle with
//! Dirichlet data, solved by damped Newton iteration.

use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;
use crate::scalar::{Point, Real};

use super::field::{Geometry, RectGrid, SampledField};
use super::SolveReport;

#[derive(Debug, Clone, Copy)]
pub struct Fd2dOptions<T> {
    /// Convergence threshold on the discrete residual max-norm.
    pub tol: T,
    pub max_newton: usize,
    pub max_halvings: usize,
}

impl<T: Real> Default for Fd2dOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-9), max_newton: 50, max_halvings: 30 }
    }
}

struct Stencil<T> {
    nx: usize,
    ny: usize,
    cx: T,
    cy: T,
}

impl<T: Real> Stencil<T> {
    /// Residual `-Δ_h u - V e^u` at interior nodes, in unknown order.
    fn residual(&self, u: &[T], v: &[T], out: &mut [T]) {
        let (nx, ny) = (self.nx, self.ny);
        let m = nx - 2;
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let c = j * nx + i;
                let lap = self.cx * (T::two() * u[c] - u[c - 1] - u[c + 1])
                    + self.cy * (T::two() * u[c] - u[c - nx] - u[c + nx]);
                out[(j - 1) * m + (i - 1)] = lap - v[c] * u[c].exp();
            }
        }
    }

    fn jacobian(&self, u: &[T], v: &[T]) -> BandedMatrix<T> {
        let (nx, ny) = (self.nx, self.ny);
        let m = nx - 2;
        let n = m * (ny - 2);
        let mut a = BandedMatrix::zeros(n, m, m);
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let k = (j - 1) * m + (i - 1);
                let c = j * nx + i;
                a.set(k, k, T::two() * (self.cx + self.cy) - v[c] * u[c].exp());
                if i > 1 {
                    a.set(k, k - 1, -self.cx);
                }
                if i < nx - 2 {
                    a.set(k, k + 1, -self.cx);
                }
                if j > 1 {
                    a.set(k, k - m, -self.cy);
                }
                if j < ny - 2 {
                    a.set(k, k + m, -self.cy);
                }
            }
        }
        a
    }
}

fn max_abs<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |a, &x| a.max(x.abs()))
}

/// Solves `-Δu = V e^u` on `grid` with `u = g` on the boundary.
///
/// The initial iterate is the transfinite (Coons) interpolant of the
/// boundary data. Each Newton step is damped by halving until the residual
/// max-norm decreases. A run that exhausts `max_newton` steps, or cannot
/// decrease the residual, returns a non-converged report carrying the last
/// iterate.
pub fn solve_fd2d<T, V, G>(grid: &RectGrid<T>, weight: V, g: G, opts: &Fd2dOptions<T>) -> Result<SolveReport<T>>
where
    T: Real,
    V: Fn(Point<T>) -> T,
    G: Fn(Point<T>) -> T,
{
    let (nx, ny) = (grid.nx, grid.ny);
    let mut v = vec![T::zero(); nx * ny];
    let mut u = vec![T::zero(); nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let p = grid.point(i, j);
            let w = weight(p);
            if !(w >= T::zero()) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("weight must be finite and ≥ 0, got {w} at ({}, {})", p.re, p.im)));
            }
            v[j * nx + i] = w;
            if grid.is_boundary(i, j) {
                u[j * nx + i] = g(p);
            }
        }
    }
    // Coons patch of the boundary data.
    let last_x = T::from_usize_lossy(nx - 1);
    let last_y = T::from_usize_lossy(ny - 1);
    for j in 1..ny - 1 {
        let t = T::from_usize_lossy(j) / last_y;
        for i in 1..nx - 1 {
            let s = T::from_usize_lossy(i) / last_x;
            let one = T::one();
            let left = u[j * nx];
            let right = u[j * nx + nx - 1];
            let bottom = u[i];
            let top = u[(ny - 1) * nx + i];
            let c00 = u[0];
            let c10 = u[nx - 1];
            let c01 = u[(ny - 1) * nx];
            let c11 = u[(ny - 1) * nx + nx - 1];
            u[j * nx + i] = (one - s) * left + s * right + (one - t) * bottom + t * top
                - ((one - s) * (one - t) * c00 + s * (one - t) * c10 + (one - s) * t * c01 + s * t * c11);
        }
    }

    let st = Stencil { nx, ny, cx: T::one() / (grid.hx() * grid.hx()), cy: T::one() / (grid.hy() * grid.hy()) };
    let m = nx - 2;
    let n = m * (ny - 2);
    let mut res = vec![T::zero(); n];
    st.residual(&u, &v, &mut res);
    let mut norm = max_abs(&res);
    let mut iterations = 0;
    let mut trial = u.clone();
    let mut trial_res = vec![T::zero(); n];
    while norm > opts.tol && iterations < opts.max_newton {
        iterations += 1;
        let delta = st.jacobian(&u, &v).solve(&res)?;
        let mut lambda = T::one();
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            trial.copy_from_slice(&u);
            for j in 1..ny - 1 {
                for i in 1..nx - 1 {
                    let c = j * nx + i;
                    trial[c] = trial[c] - lambda * delta[(j - 1) * m + (i - 1)];
                }
            }
            st.residual(&trial, &v, &mut trial_res);
            let tn = max_abs(&trial_res);
            if tn.is_finite() && tn < norm {
                accepted = true;
                break;
            }
            lambda = lambda * T::half();
        }
        if !accepted {
            break;
        }
        std::mem::swap(&mut u, &mut trial);
        std::mem::swap(&mut res, &mut trial_res);
        norm = max_abs(&res);
    }
    let solution = SampledField::new(Geometry::Rect(*grid), u, "fd2d")?;
    Ok(SolveReport { converged: norm <= opts.tol, iterations, residual_norm: norm, solution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::RadialProfile;
    use std::f64::consts::PI;

    fn unit_square(n: usize) -> RectGrid<f64> {
        RectGrid::new(0.0, 1.0, 0.0, 1.0, n, n).unwrap()
    }

    #[test]
    fn linear_data_is_reproduced_exactly() {
        let rep = solve_fd2d(&unit_square(17), |_| 0.0, |p| p.re, &Fd2dOptions::default()).unwrap();
        assert!(rep.converged);
        for (p, v) in rep.solution.nodes() {
            assert!((v - p.re).abs() < 1e-12);
        }
    }

    fn manufactured_error(n: usize) -> f64 {
        let exact = |p: Point<f64>| (PI * p.re).sin() * (PI * p.im).sin();
        let w = |p: Point<f64>| {
            let e = exact(p).max(0.0);
            2.0 * PI * PI * e * (-e).exp()
        };
        let rep = solve_fd2d(&unit_square(n), w, |_| 0.0, &Fd2dOptions::default()).unwrap();
        assert!(rep.converged, "residual {}", rep.residual_norm);
        rep.solution.nodes().iter().map(|(p, v)| (v - exact(*p)).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn manufactured_solution_is_second_order() {
        let ratio = manufactured_error(17) / manufactured_error(33);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn bubble_trace_on_interior_square() {
        let b = RadialProfile::bubble(2.0).unwrap();
        let grid = RectGrid::centered_square(0.25, 65).unwrap();
        let exact = |p: Point<f64>| b.eval_u(p.norm()).unwrap();
        let rep = solve_fd2d(&grid, |_| 1.0, exact, &Fd2dOptions::default()).unwrap();
        assert!(rep.converged);
        let err = rep.solution.nodes().iter().map(|(p, v)| (v - exact(*p)).abs()).fold(0.0, f64::max);
        assert!(err <= 5e-3, "{err}");
    }

    #[test]
    fn negative_weight_is_rejected() {
        assert!(solve_fd2d(&unit_square(5), |_| -1.0, |_| 0.0, &Fd2dOptions::default()).is_err());
    }

    #[test]
    fn unreachable_tolerance_reports_non_convergence() {
        let opts = Fd2dOptions { tol: 0.0, max_newton: 3, max_halvings: 2 };
        let rep = solve_fd2d(&unit_square(9), |_| 1.0, |_| 0.0, &opts).unwrap();
        assert!(!rep.converged);
        assert!(rep.iterations <= 3);
    }
}
