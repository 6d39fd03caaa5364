//! Applications: the 8-vertex model, directed animals and a TASEP of order two.

pub mod animals;
pub mod eight_vertex;
pub mod tasep;

pub use animals::{animals_density, animals_gf, animals_kernel, DensityEstimate, Lattice};
pub use eight_vertex::{
    coloring_to_orientation, eight_vertex_kernel, eight_vertex_kernel_qr, OrientationField, VertexClass,
    VertexHistogram, VertexWeights,
};
pub use tasep::{tasep_gap_law, tasep_simulate, tasep_simulate_with, GapLaw, LeaderPolicy, TasepConfig, TasepKernel, TasepStats};
