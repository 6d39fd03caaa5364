//! Explicit parametrisations on `S = {0,1}` with `k = p(0)/p(1)`.

use num_traits::{One, Zero};

use super::families::FamilyId;
use crate::error::{Error, Result};
use crate::invariance::{check_condition, ConditionId};
use crate::primitives::kernel::TransitionKernel;
use crate::primitives::prob::ProbVector;
use crate::primitives::scalar::{fmt_scalar, Scalar};

/// Open interval of admissible values for every `q` parameter.
pub fn admissible_interval(kind: FamilyId, k: &Scalar) -> Result<(Scalar, Scalar)> {
    let one = Scalar::one();
    if *k <= one {
        return Ok((Scalar::zero(), one));
    }
    let ik = &one / k;
    let ik2 = &ik * &ik;
    let ik3 = &ik2 * &ik;
    Ok(match kind {
        FamilyId::BinHzpm => (&one - &ik, one),
        FamilyId::BinR | FamilyId::BinRinv => (&one - &ik, &one - &ik + &ik2),
        FamilyId::BinD4 => (&one - &ik + &ik2 - &ik3, &one - &ik + &ik2),
        other => return Err(Error::Invalid(format!("{other} is not a binary family"))),
    })
}

fn expected_params(kind: FamilyId) -> usize {
    match kind {
        FamilyId::BinHzpm => 4,
        FamilyId::BinR | FamilyId::BinRinv => 2,
        _ => 1,
    }
}

/// The kernel with parameters `q` and its HZPM `p = (k/(1+k), 1/(1+k))`.
///
/// * `BIN_HZPM`: `q = (q00, q01, q10, q11)`, `T(a,0,c;0) = q_ac`,
///   `T(a,1,c;0) = k(1-q_ac)`.
/// * `BIN_R`: `q = (q0, q1)` indexed by `a`, `T(a,0,0;0) = q_a`,
///   `T(a,0,1;0) = T(a,1,0;0) = k(1-q_a)`, `T(a,1,1;0) = k(1-k(1-q_a))`.
/// * `BIN_RINV`: the mirror image, indexed by `c`.
/// * `BIN_D4`: a single `q0`, with `T(·;0)` depending on the number of ones
///   among `(a,b,c)`.
pub fn binary_family(kind: FamilyId, k: &Scalar, params: &[Scalar]) -> Result<(TransitionKernel, ProbVector)> {
    if *k <= Scalar::zero() {
        return Err(Error::ParamOutOfRange("k must be positive".into()));
    }
    let expected = expected_params(kind);
    let (lo, hi) = admissible_interval(kind, k)?;
    if params.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: params.len() });
    }
    for q in params {
        if *q <= lo || *q >= hi {
            return Err(Error::ParamOutOfRange(format!(
                "{} not in ({}, {})",
                fmt_scalar(q),
                fmt_scalar(&lo),
                fmt_scalar(&hi)
            )));
        }
    }
    let one = Scalar::one();
    let step = |x: &Scalar| k * (&one - x);
    let zero_prob = |a: usize, b: usize, c: usize| -> Scalar {
        match kind {
            FamilyId::BinHzpm => {
                let q = &params[2 * a + c];
                if b == 0 {
                    q.clone()
                } else {
                    step(q)
                }
            }
            FamilyId::BinR | FamilyId::BinRinv => {
                let (idx, u, w) = if kind == FamilyId::BinR { (a, b, c) } else { (c, a, b) };
                let q = &params[idx];
                match u + w {
                    0 => q.clone(),
                    1 => step(q),
                    _ => step(&step(q)),
                }
            }
            _ => {
                let mut v = params[0].clone();
                for _ in 0..(a + b + c) {
                    v = step(&v);
                }
                v
            }
        }
    };
    let t = TransitionKernel::from_fn(2, |a, b, c, d| {
        let z = zero_prob(a, b, c);
        if d == 0 {
            z
        } else {
            Scalar::one() - z
        }
    })?;
    let p = ProbVector::new(vec![k / (k + &one), &one / (k + &one)])?;
    let mut required = vec![ConditionId::Hzpm];
    match kind {
        FamilyId::BinR => required.push(ConditionId::R),
        FamilyId::BinRinv => required.push(ConditionId::Rinv),
        FamilyId::BinD4 => required.extend([ConditionId::R, ConditionId::Rinv]),
        _ => {}
    }
    for c in required {
        if let Some(w) = check_condition(&t, &p, c)? {
            return Err(Error::Invalid(format!("generated kernel fails {c}: {w}")));
        }
    }
    Ok((t, p))
}
