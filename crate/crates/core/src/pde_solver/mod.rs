//! Numerical solvers: radial shooting, 2D finite differences with damped
//! Newton, and the coercive radial Green function.

mod coercive;
mod fd2d;
mod field;
mod radial;

pub use coercive::{green_coercive_nodes, green_coercive_radial};
pub use fd2d::{solve_fd2d, Fd2dOptions};
pub use field::{Geometry, RadialGrid, RectGrid, SampledField};
pub use radial::{
    radial_ivp_derivative, solve_radial_bvp, solve_radial_ivp, BvpSolution, Branch, FnWeight, RadialOptions,
    RadialWeight, BLOWUP_CUTOFF,
};

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<T> {
    pub converged: bool,
    pub iterations: usize,
    /// Discrete max-norm of `-Δu - V e^u`.
    pub residual_norm: T,
    pub solution: SampledField<T>,
}
