use rayon::prelude::*;

use super::rng::{cumulative, draw, CellRng};
use crate::error::{Error, Result};
use crate::invariance::HzmcSpec;
use crate::primitives::kernel::TransitionKernel;
use crate::primitives::prob::ProbVector;

const EMPTY: u8 = u8::MAX;

/// States `η_t(i)` for `0 <= i < width`, `0 <= t < height`, populated on the
/// sites with `i + t` even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceTimeWindow {
    n: usize,
    width: usize,
    height: usize,
    cells: Vec<u8>,
}

impl SpaceTimeWindow {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_site(i: usize, t: usize) -> bool {
        (i + t).is_multiple_of(2)
    }

    pub fn get(&self, i: usize, t: usize) -> Option<usize> {
        if i >= self.width || t >= self.height {
            return None;
        }
        match self.cells[t * self.width + i] {
            EMPTY => None,
            v => Some(v as usize),
        }
    }

    /// Populated values of row `t`, left to right.
    pub fn row(&self, t: usize) -> Vec<usize> {
        (0..self.width).filter_map(|i| self.get(i, t)).collect()
    }

    /// Symbol counts over every populated site.
    pub fn counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.n];
        for &v in &self.cells {
            if v != EMPTY {
                c[v as usize] += 1;
            }
        }
        c
    }

    /// Builds a window from explicit rows; entries off the lattice are ignored.
    pub fn from_rows(n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Invalid("rows have different lengths".into()));
        }
        let mut cells = vec![EMPTY; width * height];
        for (t, row) in rows.iter().enumerate() {
            for (i, &v) in row.iter().enumerate() {
                if Self::is_site(i, t) {
                    if v >= n {
                        return Err(Error::Invalid(format!("state {v} outside the alphabet")));
                    }
                    cells[t * width + i] = v as u8;
                }
            }
        }
        Ok(SpaceTimeWindow { n, width, height, cells })
    }
}

/// What the update sees beyond the left and right edges.
#[derive(Clone, Debug)]
pub enum BoundaryPolicy {
    /// The window wraps around; needs an even width.
    Periodic,
    /// A fresh `p`-distributed symbol for every read outside the window.
    IidP(ProbVector),
    /// Constant symbols on the left and right.
    Fixed(usize, usize),
}

/// Law of the two seed rows `η_0, η_1`.
#[derive(Clone, Debug)]
pub enum InitPolicy {
    Hzpm(ProbVector),
    /// Markov chain along the horizontal zigzag, `F` upwards and `B` downwards.
    Hzmc(HzmcSpec),
    Constant(usize),
    /// Zigzag values `η_{i mod 2}(i)` for `i = 0..width`.
    Explicit(Vec<usize>),
}

/// Samples a window of the PCA with kernel `t`.
///
/// Each cell `(i, t)` with `t >= 2` is drawn from
/// `T(η_{t-1}(i-1), η_{t-2}(i), η_{t-1}(i+1); ·)` using randomness that depends
/// only on `(seed, i, t)`, so rows are filled in parallel without changing the
/// result.
pub fn sample_diagram(
    t: &TransitionKernel,
    init: &InitPolicy,
    boundary: &BoundaryPolicy,
    width: usize,
    height: usize,
    seed: u64,
) -> Result<SpaceTimeWindow> {
    let n = t.n();
    if width < 2 || height < 2 {
        return Err(Error::Invalid("window must be at least 2x2".into()));
    }
    if n > EMPTY as usize {
        return Err(Error::Invalid("alphabet too large for window storage".into()));
    }
    if matches!(boundary, BoundaryPolicy::Periodic) && width % 2 == 1 {
        return Err(Error::OddWidthPeriodic(width));
    }
    let boundary_cum = match boundary {
        BoundaryPolicy::IidP(p) => {
            if p.n() != n {
                return Err(Error::AlphabetMismatch(p.n(), n));
            }
            Some(cumulative(&p.to_f64()))
        }
        BoundaryPolicy::Fixed(l, r) => {
            if *l >= n || *r >= n {
                return Err(Error::Invalid("boundary symbol outside the alphabet".into()));
            }
            None
        }
        BoundaryPolicy::Periodic => None,
    };
    let rng = CellRng::new(seed);
    let mut cells = vec![EMPTY; width * height];
    seed_rows(n, init, width, &rng, &mut cells)?;

    let cum = t.cumulative_f64();
    for tt in 2..height {
        let (done, rest) = cells.split_at_mut(tt * width);
        let prev = &done[(tt - 1) * width..tt * width];
        let prev2 = &done[(tt - 2) * width..(tt - 1) * width];
        let row = &mut rest[..width];
        row.par_iter_mut().enumerate().for_each(|(i, slot)| {
            if !SpaceTimeWindow::is_site(i, tt) {
                return;
            }
            let mut r = rng.cell(i, tt);
            let outside = |side: usize, r: &mut rand_chacha::ChaCha8Rng| -> usize {
                match boundary {
                    BoundaryPolicy::Periodic => unreachable!(),
                    BoundaryPolicy::IidP(_) => draw(boundary_cum.as_ref().unwrap(), r),
                    BoundaryPolicy::Fixed(l, rr) => {
                        if side == 0 {
                            *l
                        } else {
                            *rr
                        }
                    }
                }
            };
            let west = if i > 0 {
                prev[i - 1] as usize
            } else if matches!(boundary, BoundaryPolicy::Periodic) {
                prev[width - 1] as usize
            } else {
                outside(0, &mut r)
            };
            let east = if i + 1 < width {
                prev[i + 1] as usize
            } else if matches!(boundary, BoundaryPolicy::Periodic) {
                prev[0] as usize
            } else {
                outside(1, &mut r)
            };
            let south = prev2[i] as usize;
            let base = ((west * n + south) * n + east) * n;
            *slot = draw(&cum[base..base + n], &mut r) as u8;
        });
    }
    Ok(SpaceTimeWindow { n, width, height, cells })
}

fn seed_rows(n: usize, init: &InitPolicy, width: usize, rng: &CellRng, cells: &mut [u8]) -> Result<()> {
    // Zigzag position i lives on row i mod 2.
    let put = |cells: &mut [u8], i: usize, v: usize| cells[(i % 2) * width + i] = v as u8;
    match init {
        InitPolicy::Hzpm(p) => {
            if p.n() != n {
                return Err(Error::AlphabetMismatch(p.n(), n));
            }
            let cum = cumulative(&p.to_f64());
            for i in 0..width {
                let mut r = rng.cell(i, i % 2);
                put(cells, i, draw(&cum, &mut r));
            }
        }
        InitPolicy::Hzmc(spec) => {
            if spec.n() != n {
                return Err(Error::AlphabetMismatch(spec.n(), n));
            }
            let to_cum = |rows: &[Vec<crate::Scalar>]| -> Vec<Vec<f64>> {
                rows.iter()
                    .map(|row| cumulative(&row.iter().map(crate::primitives::scalar::to_f64).collect::<Vec<_>>()))
                    .collect()
            };
            let f = to_cum(spec.f().rows());
            let b = to_cum(spec.b().rows());
            let rho = cumulative(&spec.rho().to_f64());
            let mut r = rng.sequential();
            let mut prev = draw(&rho, &mut r);
            put(cells, 0, prev);
            for i in 1..width {
                // Row 0 to row 1 is an up-step.
                let m = if i % 2 == 1 { &f } else { &b };
                prev = draw(&m[prev], &mut r);
                put(cells, i, prev);
            }
        }
        InitPolicy::Constant(s) => {
            if *s >= n {
                return Err(Error::Invalid(format!("state {s} outside the alphabet")));
            }
            for i in 0..width {
                put(cells, i, *s);
            }
        }
        InitPolicy::Explicit(values) => {
            if values.len() != width {
                return Err(Error::WrongLength { expected: width, got: values.len() });
            }
            for (i, &v) in values.iter().enumerate() {
                if v >= n {
                    return Err(Error::Invalid(format!("state {v} outside the alphabet")));
                }
                put(cells, i, v);
            }
        }
    }
    Ok(())
}
