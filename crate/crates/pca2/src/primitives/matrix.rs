use num_traits::{One, Signed, Zero};

use super::linalg;
use super::prob::ProbVector;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Exact row-stochastic `n × n` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StochasticMatrix {
    rows: Vec<Vec<Scalar>>,
    positive: bool,
}

impl StochasticMatrix {
    pub fn new(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::AlphabetTooSmall(n));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::WrongLength { expected: n, got: row.len() });
            }
            if let Some(j) = row.iter().position(|x| x.is_negative()) {
                return Err(Error::NegativeEntry(i * n + j));
            }
            if !row.iter().sum::<Scalar>().is_one() {
                return Err(Error::MatrixRowNotStochastic(i));
            }
        }
        let positive = rows.iter().flatten().all(|x| !x.is_zero());
        Ok(StochasticMatrix { rows, positive })
    }

    /// The matrix whose every row is `p`.
    pub fn constant_rows(p: &ProbVector) -> Self {
        StochasticMatrix::new(vec![p.entries().to_vec(); p.n()]).expect("rows of a probability vector")
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
            .collect();
        StochasticMatrix::new(rows).expect("identity")
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn mul(&self, other: &StochasticMatrix) -> StochasticMatrix {
        StochasticMatrix::new(linalg::mat_mul(&self.rows, &other.rows)).expect("product of stochastic matrices")
    }

    /// Convex combination `Σ w_k M_k` with non-negative weights summing to 1.
    pub fn mixture(parts: &[(Scalar, &StochasticMatrix)]) -> Result<Self> {
        let n = parts.first().map_or(0, |(_, m)| m.n());
        let mut rows = vec![vec![Scalar::zero(); n]; n];
        for (w, m) in parts {
            for i in 0..n {
                for j in 0..n {
                    rows[i][j] += w * m.get(i, j);
                }
            }
        }
        StochasticMatrix::new(rows)
    }

    /// Left fixed vectors `x M = x`, as a basis.
    pub fn left_fixed_space(&self) -> Vec<Vec<Scalar>> {
        linalg::left_fixed_space(&self.rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::scalar::rat;

    #[test]
    fn rejects_non_stochastic_rows() {
        let m = StochasticMatrix::new(vec![vec![rat(3, 5), rat(1, 2)], vec![rat(1, 2), rat(1, 2)]]);
        assert_eq!(m, Err(Error::MatrixRowNotStochastic(0)));
    }

    #[test]
    fn product_stays_stochastic() {
        let f = StochasticMatrix::new(vec![vec![rat(1, 2), rat(1, 2)], vec![rat(1, 4), rat(3, 4)]]).unwrap();
        let g = f.mul(&f);
        assert_eq!(g.get(0, 0), &rat(3, 8));
        assert!(g.is_positive());
    }
}
