#![allow(dead_code)]

use num_traits::One;
use pca2::invariance::{commuting_partner, HzmcSpec};
use pca2::primitives::scalar::rat;
use pca2::reversibility::{binary_family, gen_member, FamilyId};
use pca2::{Error, ProbVector, Scalar, StochasticMatrix, TransitionKernel};

/// The binary r-quasi-reversible kernel with `q = (3/4, 4/5)` and
/// `p = (1/3, 2/3)`.
pub fn example() -> (TransitionKernel, ProbVector) {
    binary_family(FamilyId::BinR, &rat(1, 2), &[rat(3, 4), rat(4, 5)]).unwrap()
}

/// Normalises positive integer weights.
pub fn prob(weights: &[i64]) -> ProbVector {
    let total: i64 = weights.iter().sum();
    ProbVector::new(weights.iter().map(|&w| rat(w, total)).collect()).unwrap()
}

/// A family member at the largest `eps = 2^{-j}/4` that keeps every entry in
/// `(0,1)`.
pub fn member(kind: FamilyId, p: &ProbVector, raw: &[i64]) -> TransitionKernel {
    let params: Vec<Scalar> = raw.iter().map(|&x| rat(x, 1)).collect();
    let mut eps = rat(1, 4);
    loop {
        match gen_member(kind, p, &params, &eps) {
            Ok(t) => return t,
            Err(Error::EpsilonTooLarge(..)) => eps /= Scalar::from_integer(2.into()),
            Err(e) => panic!("{kind}: {e}"),
        }
    }
}

/// A stochastic matrix with rows proportional to the given weights.
pub fn stochastic(rows: &[Vec<i64>]) -> StochasticMatrix {
    StochasticMatrix::new(rows.iter().map(|r| prob(r).entries().to_vec()).collect()).unwrap()
}

/// The pair `(F, w0 I + w1 F + w2 F²)` for positive weights summing to one.
pub fn commuting_spec(f: &[Vec<i64>], w: [i64; 3]) -> HzmcSpec {
    let f = stochastic(f);
    let total: i64 = w.iter().sum();
    let b = commuting_partner(&f, w.map(|x| rat(x, total))).unwrap();
    HzmcSpec::new(f, b).unwrap()
}

/// A kernel whose rows are proportional to the given weights.
pub fn weighted_kernel(n: usize, weights: &[i64]) -> TransitionKernel {
    assert_eq!(weights.len(), n.pow(4));
    let mut entries = Vec::with_capacity(weights.len());
    for row in weights.chunks(n) {
        let total: i64 = row.iter().sum();
        entries.extend(row.iter().map(|&w| rat(w, total)));
    }
    TransitionKernel::new(n, entries).unwrap()
}

pub fn is_stochastic(t: &TransitionKernel) -> bool {
    let n = t.n();
    t.entries().chunks(n).all(|row| row.iter().sum::<Scalar>() == Scalar::one())
}
