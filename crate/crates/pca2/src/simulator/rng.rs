use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words reserved for each cell; a cell consumes at most three `f64` draws.
const WORDS_PER_CELL: u128 = 8;

/// Counter-based randomness: the stream of cell `(i, t)` depends only on
/// `(seed, t, i)`, so cells can be drawn in any order.
#[derive(Clone)]
pub(crate) struct CellRng {
    base: ChaCha8Rng,
}

impl CellRng {
    pub fn new(seed: u64) -> Self {
        CellRng { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn cell(&self, i: usize, t: usize) -> ChaCha8Rng {
        let mut r = self.base.clone();
        r.set_stream(t as u64);
        r.set_word_pos(i as u128 * WORDS_PER_CELL);
        r
    }

    /// A sequential generator on a stream no cell uses.
    pub fn sequential(&self) -> ChaCha8Rng {
        let mut r = self.base.clone();
        r.set_stream(u64::MAX);
        r
    }
}

/// Inverse-CDF draw from a cumulative table.
pub(crate) fn draw(cum: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

pub(crate) fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = probs
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}
