//! Families of kernels in Triang(S,p) with prescribed (quasi-)reversibility,
//! their dimensions and a generator for members.
//!
//! Every family is described in the coordinates
//! `J(a,b,c,d) = p(a)p(b)p(c) T(a,b,c;d)`. With `D = J - p(a)p(b)p(c)p(d)`,
//! stochasticity and the HZPM condition say that `D` sums to zero along `d`
//! and along `b`; the `R` and `RINV` conditions add the `c` and `a` axes; and
//! `g`-reversibility says that `D` is invariant under the vertex permutation
//! `σ_g`. A family is therefore a set of zero-sum axes plus a subgroup `G`
//! of D4, and its members are parametrised by one value of `D` per
//! `G`-orbit on the box where the summed axes avoid the last symbol.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::reversibility_witness;
use crate::error::{Error, Result};
use crate::invariance::{check_condition, ConditionId};
use crate::primitives::dihedral::DihedralElement;
use crate::primitives::kernel::{tuples, TransitionKernel};
use crate::primitives::linalg::zero_sum_completion;
use crate::primitives::prob::ProbVector;
use crate::primitives::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyId {
    Triang,
    QrR,
    QrRinv,
    QrD4,
    RevV,
    RevR2,
    RevH,
    RevR2V,
    RevR,
    RevRV,
    RevD4,
    BinHzpm,
    BinR,
    BinRinv,
    BinD4,
}

use DihedralElement as G;
use FamilyId::*;

impl FamilyId {
    pub const GENERAL: [FamilyId; 11] = [Triang, QrR, QrRinv, QrD4, RevV, RevR2, RevH, RevR2V, RevR, RevRV, RevD4];
    pub const BINARY: [FamilyId; 4] = [BinHzpm, BinR, BinRinv, BinD4];

    pub fn name(self) -> &'static str {
        match self {
            Triang => "TRIANG",
            QrR => "QR_R",
            QrRinv => "QR_RINV",
            QrD4 => "QR_D4",
            RevV => "REV_V",
            RevR2 => "REV_R2",
            RevH => "REV_H",
            RevR2V => "REV_R2V",
            RevR => "REV_R",
            RevRV => "REV_RV",
            RevD4 => "REV_D4",
            BinHzpm => "BIN_HZPM",
            BinR => "BIN_R",
            BinRinv => "BIN_RINV",
            BinD4 => "BIN_D4",
        }
    }

    /// The general family a binary one specialises.
    pub fn general(self) -> FamilyId {
        match self {
            BinHzpm => Triang,
            BinR => QrR,
            BinRinv => QrRinv,
            BinD4 => QrD4,
            other => other,
        }
    }

    /// Zero-sum axes among `(a,b,c,d)` and generators of the symmetry group.
    fn structure(self) -> ([bool; 4], Vec<DihedralElement>) {
        const BD: [bool; 4] = [false, true, false, true];
        const BCD: [bool; 4] = [false, true, true, true];
        const ABD: [bool; 4] = [true, true, false, true];
        const ALL: [bool; 4] = [true; 4];
        match self.general() {
            Triang => (BD, vec![]),
            QrR => (BCD, vec![]),
            QrRinv => (ABD, vec![]),
            QrD4 => (ALL, vec![]),
            RevV => (BD, vec![G::V]),
            RevR2 => (BD, vec![G::R2]),
            RevH => (BD, vec![G::H]),
            RevR2V => (BD, vec![G::R2, G::V]),
            RevR => (ALL, vec![G::R]),
            RevRV => (ALL, vec![G::RV]),
            RevD4 => (ALL, vec![G::R, G::V]),
            _ => unreachable!(),
        }
    }

    /// Conditions beyond HZPM that members satisfy by definition.
    fn extra_conditions(self) -> Vec<ConditionId> {
        match self.general() {
            QrR => vec![ConditionId::R],
            QrRinv => vec![ConditionId::Rinv],
            QrD4 => vec![ConditionId::R, ConditionId::Rinv],
            _ => vec![],
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        FamilyId::GENERAL
            .iter()
            .chain(FamilyId::BINARY.iter())
            .copied()
            .find(|f| f.name() == up)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// Closed-form dimension polynomials of the families (binary families use
/// the polynomial of the general family they specialise).
pub fn family_dimension(kind: FamilyId, n: usize) -> usize {
    let n = n as i64;
    let m = n - 1;
    let d = match kind.general() {
        Triang => n * n * m * m,
        QrR | QrRinv => n * m * m * m,
        QrD4 => m * m * m * m,
        RevV | RevR2 => m * m * n * (n + 1) / 2,
        RevH => n * n * n * m / 2,
        RevR2V => m * n * n * (n + 1) / 4,
        RevR => n * m * (n * n - 3 * n + 4) / 4,
        RevRV => m * m * (n * n - 2 * n + 2) / 2,
        RevD4 => n * m * (n * n - n + 2) / 8,
        _ => unreachable!(),
    };
    d as usize
}

/// Dimension of the union over all positive `p` of Triang(S,p).
pub fn triang_union_dimension(n: usize) -> usize {
    (n * n * n - n * n + 1) * (n - 1)
}

/// Dimension of the set of kernels with a given invariant HZMC.
pub fn hzmc_dimension(n: usize) -> usize {
    n * n * (n - 1) * (n - 1)
}

fn free_box(n: usize, summed: &[bool; 4]) -> impl Iterator<Item = [usize; 4]> + '_ {
    tuples(n, 4)
        .map(|x| [x[0], x[1], x[2], x[3]])
        .filter(move |x| (0..4).all(|k| !summed[k] || x[k] < n - 1))
}

/// Lexicographically smallest element of every orbit of the family's
/// symmetry group on the free box, in increasing order.
pub fn orbit_representatives(kind: FamilyId, n: usize) -> Vec<[usize; 4]> {
    let (summed, gens) = kind.structure();
    let group = DihedralElement::closure(&gens);
    let mut reps: Vec<[usize; 4]> = free_box(n, &summed)
        .map(|x| group.iter().map(|g| g.apply(x)).min().unwrap())
        .collect();
    reps.sort();
    reps.dedup();
    reps
}

/// Number of free parameters of the generator, which is the exact
/// dimension of the family.
pub fn parameter_count(kind: FamilyId, n: usize) -> usize {
    orbit_representatives(kind, n).len()
}

/// A member of the family obtained by moving from the memoryless kernel
/// `T(a,b,c;d) = p(d)` by `eps · free_params` along the family's
/// coordinates (one parameter per orbit, ordered as
/// [`orbit_representatives`]).
pub fn gen_member(kind: FamilyId, p: &ProbVector, free_params: &[Scalar], eps: &Scalar) -> Result<TransitionKernel> {
    p.require_positive()?;
    let n = p.n();
    let reps = orbit_representatives(kind, n);
    if free_params.len() != reps.len() {
        return Err(Error::DimensionMismatch { expected: reps.len(), got: free_params.len() });
    }
    let (summed, gens) = kind.structure();
    let group = DihedralElement::closure(&gens);
    let index: HashMap<[usize; 4], usize> = reps.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let delta = zero_sum_completion(n, &summed, |y| {
        let x = [y[0], y[1], y[2], y[3]];
        let rep = group.iter().map(|g| g.apply(x)).min().unwrap();
        eps * &free_params[index[&rep]]
    });
    let mut entries = Vec::with_capacity(n.pow(4));
    for (x, dx) in tuples(n, 4).zip(delta) {
        let w = p.get(x[0]) * p.get(x[1]) * p.get(x[2]);
        let value = p.get(x[3]) + dx / w;
        if !value.is_positive() || value >= Scalar::one() {
            return Err(Error::EpsilonTooLarge(x[0], x[1], x[2], x[3]));
        }
        entries.push(value);
    }
    let t = TransitionKernel::new(n, entries)?;
    debug_assert!(is_member(kind, &t, p)?);
    Ok(t)
}

/// Exact membership: positive rates, HZPM for `p`, the family's row
/// conditions and its reversibility identities.
pub fn is_member(kind: FamilyId, t: &TransitionKernel, p: &ProbVector) -> Result<bool> {
    if !t.positive_rates() || check_condition(t, p, ConditionId::Hzpm)?.is_some() {
        return Ok(false);
    }
    if kind != kind.general() && t.n() != 2 {
        return Ok(false);
    }
    for c in kind.extra_conditions() {
        if check_condition(t, p, c)?.is_some() {
            return Ok(false);
        }
    }
    let (_, gens) = kind.structure();
    Ok(gens.iter().all(|&g| reversibility_witness(t, p, g).is_none()))
}

/// The linear parts of all constraints defining the family, as rows over the
/// `n⁴` kernel entries. The family is an open subset of an affine space
/// whose dimension is `n⁴` minus the rank of these rows.
pub fn linear_constraints(kind: FamilyId, p: &ProbVector) -> Vec<Vec<Scalar>> {
    let n = p.n();
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * n + b) * n + c) * n + d;
    let zero_row = || vec![Scalar::zero(); n.pow(4)];
    let mut rows = Vec::new();
    for t in tuples(n, 3) {
        let mut r = zero_row();
        for d in 0..n {
            r[idx(t[0], t[1], t[2], d)] = Scalar::one();
        }
        rows.push(r);
    }
    let mut weighted_sums = vec![1usize];
    for c in kind.extra_conditions() {
        weighted_sums.push(if c == ConditionId::R { 2 } else { 0 });
    }
    for axis in weighted_sums {
        for t in tuples(n, 3) {
            let mut r = zero_row();
            let others: Vec<usize> = (0..4).filter(|&k| k != axis).collect();
            for v in 0..n {
                let mut x = [0usize; 4];
                x[axis] = v;
                for (k, val) in others.iter().zip(&t) {
                    x[*k] = *val;
                }
                r[idx(x[0], x[1], x[2], x[3])] += p.get(v);
            }
            rows.push(r);
        }
    }
    let (_, gens) = kind.structure();
    for g in gens {
        let src = g.output_source();
        for x in tuples(n, 4) {
            let y = g.apply([x[0], x[1], x[2], x[3]]);
            let mut r = zero_row();
            r[idx(y[0], y[1], y[2], y[3])] += Scalar::one();
            r[idx(x[0], x[1], x[2], x[3])] -= p.get(x[src]) / p.get(x[3]);
            rows.push(r);
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::scalar::rat;

    #[test]
    fn binary_dimensions() {
        let got: Vec<usize> = [Triang, RevH, RevV, RevR2, QrR, QrD4, RevD4]
            .iter()
            .map(|&k| family_dimension(k, 2))
            .collect();
        assert_eq!(got, vec![4, 4, 3, 3, 2, 1, 1]);
        assert_eq!(family_dimension(QrD4, 3), 16);
        assert_eq!(family_dimension(RevR, 2), 1);
    }

    #[test]
    fn baseline_is_in_every_family() {
        let p = ProbVector::new(vec![rat(1, 6), rat(1, 3), rat(1, 2)]).unwrap();
        for kind in FamilyId::GENERAL {
            let zeros = vec![Scalar::zero(); parameter_count(kind, 3)];
            let t = gen_member(kind, &p, &zeros, &Scalar::one()).unwrap();
            assert_eq!(t, TransitionKernel::constant(&p));
        }
    }

    #[test]
    fn wrong_parameter_count_is_rejected() {
        let p = ProbVector::uniform(2);
        assert_eq!(
            gen_member(Triang, &p, &[Scalar::zero()], &Scalar::one()),
            Err(Error::DimensionMismatch { expected: 4, got: 1 })
        );
    }
}
