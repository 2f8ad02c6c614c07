//! Numerical laboratory for the planar Liouville equation `-Δu = V e^u`.
//!
//! * [`families`]: closed-form radial solution families.
//! * [`green_disk`]: Dirichlet Green function and Poisson kernel of a disk,
//!   with singular-kernel quadrature.
//! * [`pde_solver`]: radial shooting, 2D finite differences and the
//!   coercive radial Green function.
//! * [`analysis`]: extrema, masses, blow-up rescaling, the kernel split and
//!   sequence classification.
//! * [`experiments`]: scenario runner behind the `liouville-lab` binary.
//!
//! Everything numeric is generic over [`scalar::Real`]; the aliases below
//! fix the scalar to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod families;
pub mod green_disk;
pub mod linalg;
pub mod pde_solver;
pub mod quadrature;
pub mod roots;
pub mod scalar;

pub use error::{Error, Result};

pub type Profile = families::RadialProfile<f64>;
pub type Weight = families::WeightSpec<f64>;
pub type Kernel = green_disk::GreenKernel<f64>;
pub type Quadrature = green_disk::QuadratureSpec<f64>;
pub type Field = pde_solver::SampledField<f64>;
pub type Rect = pde_solver::RectGrid<f64>;
pub type Radial = pde_solver::RadialGrid<f64>;
pub type Region = analysis::CompactRegion<f64>;
pub type Frame = analysis::RescalingFrame<f64>;
pub type Classification = analysis::BlowupClassification<f64>;
pub type SupInf = analysis::SupInfReport<f64>;
pub type TwoBubble = experiments::TwoBubbleSpec<f64>;
pub type Pt = scalar::Point<f64>;
