use num_traits::{One, Signed, Zero};

use super::prob::ProbVector;
use super::scalar::{to_f64, Scalar};
use crate::error::{Error, Result};

/// Exact transition kernel `T(a,b,c;d)` on `{0,..,n-1}`.
///
/// Storage is `(a,b,c)` row-major with `d` contiguous.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionKernel {
    n: usize,
    entries: Vec<Scalar>,
    positive_rates: bool,
}

impl TransitionKernel {
    pub fn new(n: usize, entries: Vec<Scalar>) -> Result<Self> {
        if n < 2 {
            return Err(Error::AlphabetTooSmall(n));
        }
        let expected = n * n * n * n;
        if entries.len() != expected {
            return Err(Error::WrongLength { expected, got: entries.len() });
        }
        if let Some(i) = entries.iter().position(|x| x.is_negative()) {
            return Err(Error::NegativeEntry(i));
        }
        for (r, row) in entries.chunks(n).enumerate() {
            if !row.iter().sum::<Scalar>().is_one() {
                return Err(Error::RowNotStochastic(r / (n * n), (r / n) % n, r % n));
            }
        }
        let positive_rates = entries.iter().all(|x| !x.is_zero());
        Ok(TransitionKernel { n, entries, positive_rates })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Scalar) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        entries.push(f(a, b, c, d));
                    }
                }
            }
        }
        TransitionKernel::new(n, entries)
    }

    /// The memoryless kernel `T(a,b,c;·) = p`.
    pub fn constant(p: &ProbVector) -> Self {
        TransitionKernel::from_fn(p.n(), |_, _, _, d| p.get(d).clone()).expect("constant kernel")
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &Scalar {
        &self.entries[self.index(a, b, c, d)]
    }

    /// `T` evaluated on the tuple `x = (a,b,c,d)`.
    #[inline]
    pub fn at(&self, x: &[usize]) -> &Scalar {
        self.get(x[0], x[1], x[2], x[3])
    }

    pub fn row(&self, a: usize, b: usize, c: usize) -> &[Scalar] {
        let start = self.index(a, b, c, 0);
        &self.entries[start..start + self.n]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn positive_rates(&self) -> bool {
        self.positive_rates
    }

    pub fn require_positive_rates(&self) -> Result<()> {
        if self.positive_rates {
            Ok(())
        } else {
            Err(Error::NonPositiveRates)
        }
    }

    pub fn min_entry(&self) -> Scalar {
        self.entries.iter().min().cloned().unwrap_or_else(Scalar::zero)
    }

    /// Rows as floating point cumulative distributions, for sampling.
    pub fn cumulative_f64(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.entries.len());
        for row in self.entries.chunks(self.n) {
            let mut acc = 0.0;
            for x in row {
                acc += to_f64(x);
                out.push(acc);
            }
            *out.last_mut().unwrap() = 1.0;
        }
        out
    }
}

/// All `k`-tuples over `{0,..,n-1}` in lexicographic order.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(k as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        t
    })
}
