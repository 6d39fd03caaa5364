//! Monte Carlo sampling of space-time diagrams and the exact window chain.

mod ergodicity;
mod lines;
mod render;
mod rng;
mod window;

pub use ergodicity::{ergodicity_tv, ErgodicityPoint, MAX_CHAIN_STATES};
pub use lines::{line_iid_test, line_iid_tests, LineSpec, LineTestReport};
pub use render::{render_pgm, write_pgm};
pub(crate) use rng::CellRng;
pub use window::{sample_diagram, BoundaryPolicy, InitPolicy, SpaceTimeWindow};
