use num_traits::{One, Signed, Zero};

use super::scalar::{fmt_scalar, parse_scalar, rat, to_f64, Scalar};
use crate::error::{Error, Result};

/// A probability vector on the alphabet `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProbVector {
    entries: Vec<Scalar>,
    positive: bool,
}

impl ProbVector {
    /// Validates non-negativity and exact normalisation. Zero entries are
    /// allowed and clear the `positive` flag.
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::AlphabetTooSmall(entries.len()));
        }
        if let Some(i) = entries.iter().position(|x| x.is_negative()) {
            return Err(Error::NegativeEntry(i));
        }
        let total: Scalar = entries.iter().sum();
        if !total.is_one() {
            return Err(Error::NotNormalized(fmt_scalar(&total)));
        }
        let positive = entries.iter().all(|x| !x.is_zero());
        Ok(ProbVector { entries, positive })
    }

    pub fn uniform(n: usize) -> Self {
        ProbVector::new(vec![rat(1, n as i64); n]).expect("uniform vector")
    }

    /// Parses a comma separated list such as `"1/3,2/3"`.
    pub fn parse_csv(s: &str) -> Result<Self> {
        let entries = s.split(',').map(parse_scalar).collect::<Result<Vec<_>>>()?;
        ProbVector::new(entries)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.entries[i]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.entries.iter().map(to_f64).collect()
    }

    pub fn to_csv(&self) -> String {
        self.entries.iter().map(fmt_scalar).collect::<Vec<_>>().join(",")
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        if self.positive {
            Ok(())
        } else {
            Err(Error::NotPositive)
        }
    }
}
