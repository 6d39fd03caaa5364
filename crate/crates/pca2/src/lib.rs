//! Probabilistic cellular automata with memory two on the even lattice.
//!
//! A kernel `T(a,b,c;d)` gives the law of the new state `d` at `(i, t+1)`
//! from the west neighbour `a = η_t(i-1)`, the cell below `b = η_{t-1}(i)`
//! and the east neighbour `c = η_t(i+1)`. All algebraic checks are exact
//! over the rationals; floating point only appears in sampling.

pub mod error;
pub mod invariance;
pub mod marginals;
pub mod models;
pub mod primitives;
pub mod reversibility;
pub mod simulator;

pub use error::{Error, Result};
pub use primitives::dihedral::DihedralElement;
pub use primitives::kernel::TransitionKernel;
pub use primitives::matrix::StochasticMatrix;
pub use primitives::prob::ProbVector;
pub use primitives::scalar::Scalar;
