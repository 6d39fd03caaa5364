//! Directed animals and the hard-particle PCA whose density counts them.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::primitives::kernel::TransitionKernel;
use crate::primitives::scalar::Scalar;
use crate::simulator::{sample_diagram, BoundaryPolicy, InitPolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lattice {
    Square,
    Triangular,
}

/// `(G_S(z), G_T(z), |G_T(z/(1+z)) − G_S(z)|)` with
/// `G_S(z) = ½((1 − 4z/(1+z))^{-1/2} − 1)` and `G_T(z) = ½((1 − 4z)^{-1/2} − 1)`.
pub fn animals_gf(z: f64) -> Result<(f64, f64, f64)> {
    let w = z / (1.0 + z);
    if z.is_nan() || 1.0 + z <= 0.0 || 4.0 * z.abs() >= 1.0 || 4.0 * w.abs() >= 1.0 {
        return Err(Error::OutOfDomain);
    }
    let g_t = |x: f64| 0.5 * ((1.0 - 4.0 * x).powf(-0.5) - 1.0);
    let g_s = 0.5 * ((1.0 - 4.0 * w).powf(-0.5) - 1.0);
    Ok((g_s, g_t(z), (g_t(w) - g_s).abs()))
}

/// Binary kernel that creates a particle with probability `p` when the
/// neighbourhood is empty: `a = c = 0` on the square lattice (the `b`
/// argument is ignored), `a = b = c = 0` on the triangular one.
pub fn animals_kernel(lattice: Lattice, p: &Scalar) -> Result<TransitionKernel> {
    if *p <= Scalar::zero() || *p >= Scalar::one() {
        return Err(Error::ParamOutOfRange("p must lie in (0,1)".into()));
    }
    TransitionKernel::from_fn(2, |a, b, c, d| {
        let empty = match lattice {
            Lattice::Square => a == 0 && c == 0,
            Lattice::Triangular => a == 0 && b == 0 && c == 0,
        };
        let one = if empty { p.clone() } else { Scalar::zero() };
        if d == 1 {
            one
        } else {
            Scalar::one() - one
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub mean: f64,
    /// Standard error from batch means over blocks of rows.
    pub std_err: f64,
    pub blocks: usize,
}

/// Stationary density of ones, estimated on a periodic ring started empty.
///
/// Rows `burn_in..height` are split into `blocks` consecutive groups whose
/// means give the error bar.
pub fn animals_density(
    lattice: Lattice,
    p: &Scalar,
    width: usize,
    height: usize,
    burn_in: usize,
    blocks: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    if blocks < 2 || burn_in + blocks > height {
        return Err(Error::Invalid("need at least two blocks of rows after burn-in".into()));
    }
    let t = animals_kernel(lattice, p)?;
    let win = sample_diagram(&t, &InitPolicy::Constant(0), &BoundaryPolicy::Periodic, width, height, seed)?;
    let rows = height - burn_in;
    let per_block = rows / blocks;
    let means: Vec<f64> = (0..blocks)
        .map(|k| {
            let (mut ones, mut total) = (0u64, 0u64);
            for tt in burn_in + k * per_block..burn_in + (k + 1) * per_block {
                for v in win.row(tt) {
                    ones += v as u64;
                    total += 1;
                }
            }
            ones as f64 / total as f64
        })
        .collect();
    let mean = means.iter().sum::<f64>() / blocks as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (blocks - 1) as f64;
    Ok(DensityEstimate { mean, std_err: (var / blocks as f64).sqrt(), blocks })
}
