//! Exact scalars, probability vectors, stochastic matrices, kernels and the
//! dihedral group acting on the diamond stencil.

pub mod dihedral;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod matrix;
pub mod prob;
pub mod scalar;
