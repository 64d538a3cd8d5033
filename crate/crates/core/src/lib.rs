//! Holonomy analysis and simulation of weighted gossip processes on
//! matrix-weighted graphs.
//!
//! Every pair of agents joined by an edge updates its joint state with a
//! row-stochastic matrix. Whether the weight vector `w` returns to itself after
//! going around each cycle of the graph determines which update schedules are
//! allowable, and those schedules converge to a finite limit set of block
//! matrices: a permutation part plus rank-one consensus blocks.
//!
//! Exact analysis runs over [`Rational`]; long-horizon simulation over `f64`.

pub mod derived;
pub mod engine;
pub mod error;
pub mod scalar;
pub mod graph;
pub mod holonomy;
pub mod stomat;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Exact row-stochastic matrix.
pub type ExactMatrix = stomat::StochasticMatrix<Rational>;
/// Double-precision row-stochastic matrix.
pub type FloatMatrix = stomat::StochasticMatrix<f64>;
/// Single-precision row-stochastic matrix.
pub type Float32Matrix = stomat::StochasticMatrix<f32>;
