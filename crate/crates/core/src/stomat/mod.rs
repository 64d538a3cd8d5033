//! Nonnegative-matrix algebra over exact rationals or floats: norms,
//! ergodicity coefficients, reducibility structure, periods, Perron vectors,
//! permutation detection and composition of matrix graphs.

pub mod index;
pub mod matrix;
pub mod perm;
pub mod perron;
pub mod support;

pub use index::{IndexSet, Partition};
pub use matrix::{Matrix, StochasticMatrix};
pub use perm::{
    as_permutation, finite_order, is_permutation, maximal_permutation_index,
    restricted_permutation, Permutation,
};
pub use perron::perron_row_vector;
pub use support::{
    canonical_form, compose_support_graphs, frobenius_form, is_irreducible, is_primitive, period,
    CanonicalForm, ClassKind, StateClass, SupportDigraph,
};
