//! Perelman Gaussian densities of canonical metrics on complex surfaces.
//!
//! Three routes are provided:
//!
//! * [`density::einstein_density`]: closed form from scalar curvature and volume;
//! * [`density::conformal_density`]: Einstein metrics conformal to extremal
//!   Kähler metrics, from χ, σ and the minimal Calabi energy;
//! * [`density::soliton_density`]: toric Kähler-Ricci solitons, from exact
//!   exponential integrals over the moment polygon ([`expint`]).

// `!(x > 0.0)` is used throughout so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod density;
pub mod expint;
pub mod optimize;
pub mod polytope;

pub use density::{DensityError, DensityReport, SolitonProblem, TopologyInvariants};
pub use expint::{ExpIntError, LinearForm, NodeList};
pub use optimize::{MinimizationResult, OptimizeError, RationalFn};
pub use polytope::{Point, Polytope, PolytopeError, Simplex};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    ExpInt(#[from] ExpIntError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Density(#[from] DensityError),
}
