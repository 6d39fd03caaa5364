//! Invariant horizontal zigzag product measures (HZPM) and Markov chains
//! (HZMC): exact checks, extraction from a kernel, and generators.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primitives::kernel::{tuples, TransitionKernel};
use crate::primitives::linalg::{self, zero_sum_completion};
use crate::primitives::matrix::StochasticMatrix;
use crate::primitives::prob::ProbVector;
use crate::primitives::scalar::{fmt_scalar, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionId {
    /// `p(d) = Σ_b p(b) T(a,b,c;d)`.
    Hzpm,
    /// `Σ_c p(c) T(a,b,c;d) = p(d)`.
    R,
    /// `Σ_a p(a) T(a,b,c;d) = p(d)`.
    Rinv,
    /// `F(a;d) B(d;c) = Σ_b B(a;b) F(b;c) T(a,b,c;d)`.
    Hzmc,
    /// `F(a;d) = Σ_c F(b;c) T(a,b,c;d)`.
    HzmcR,
    /// `ρ(d)/ρ(c) B(d;c) = Σ_a ρ(a)/ρ(b) B(a;b) T(a,b,c;d)`.
    HzmcRinv,
    /// `F(b;c) = Σ_d F(a;d) T(d,a,b;c)`.
    EigF,
    /// `B(d;c) = Σ_b B(a;b) T(d,a,b;c)`.
    EigB,
}

impl ConditionId {
    pub const ALL: [ConditionId; 8] = [
        ConditionId::Hzpm,
        ConditionId::R,
        ConditionId::Rinv,
        ConditionId::Hzmc,
        ConditionId::HzmcR,
        ConditionId::HzmcRinv,
        ConditionId::EigF,
        ConditionId::EigB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::Hzpm => "HZPM",
            ConditionId::R => "R",
            ConditionId::Rinv => "RINV",
            ConditionId::Hzmc => "HZMC",
            ConditionId::HzmcR => "HZMC_R",
            ConditionId::HzmcRinv => "HZMC_RINV",
            ConditionId::EigF => "EIG_F",
            ConditionId::EigB => "EIG_B",
        }
    }

    /// Names of the quantified variables, in witness order.
    pub fn variables(self) -> &'static str {
        match self {
            ConditionId::Hzpm | ConditionId::Hzmc => "a,c,d",
            ConditionId::R | ConditionId::HzmcR => "a,b,d",
            ConditionId::Rinv | ConditionId::HzmcRinv => "b,c,d",
            ConditionId::EigF => "a,b,c",
            ConditionId::EigB => "a,c,d",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.to_ascii_uppercase();
        ConditionId::ALL
            .iter()
            .copied()
            .find(|c| c.name() == up)
            .ok_or_else(|| Error::Parse(format!("unknown condition {s:?}")))
    }
}

/// A violating index tuple with both sides of the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub condition: ConditionId,
    pub tuple: Vec<usize>,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.tuple.iter().map(usize::to_string).collect();
        write!(
            f,
            "({})=({}): lhs={} rhs={}",
            self.condition.variables(),
            t.join(","),
            fmt_scalar(&self.lhs),
            fmt_scalar(&self.rhs)
        )
    }
}

/// Outcome of an exact identity check: `None` means the identity holds.
pub type Verdict = Option<Witness>;

fn first_violation(
    condition: ConditionId,
    n: usize,
    mut sides: impl FnMut(usize, usize, usize) -> (Scalar, Scalar),
) -> Verdict {
    for t in tuples(n, 3) {
        let (lhs, rhs) = sides(t[0], t[1], t[2]);
        if lhs != rhs {
            return Some(Witness { condition, tuple: t, lhs, rhs });
        }
    }
    None
}

fn same_alphabet(t: &TransitionKernel, n: usize) -> Result<()> {
    if t.n() == n {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(t.n(), n))
    }
}

/// Exact check of the product-measure conditions `HZPM`, `R` or `RINV`.
pub fn check_condition(t: &TransitionKernel, p: &ProbVector, which: ConditionId) -> Result<Verdict> {
    same_alphabet(t, p.n())?;
    p.require_positive()?;
    let n = t.n();
    let pv = |i: usize| p.get(i);
    let verdict = match which {
        ConditionId::Hzpm => first_violation(which, n, |a, c, d| {
            let s: Scalar = (0..n).map(|b| pv(b) * t.get(a, b, c, d)).sum();
            (pv(d).clone(), s)
        }),
        ConditionId::R => first_violation(which, n, |a, b, d| {
            let s: Scalar = (0..n).map(|c| pv(c) * t.get(a, b, c, d)).sum();
            (s, pv(d).clone())
        }),
        ConditionId::Rinv => first_violation(which, n, |b, c, d| {
            let s: Scalar = (0..n).map(|a| pv(a) * t.get(a, b, c, d)).sum();
            (s, pv(d).clone())
        }),
        other => {
            return Err(Error::Invalid(format!("{other} is not a product-measure condition")));
        }
    };
    Ok(verdict)
}

pub fn holds(t: &TransitionKernel, p: &ProbVector, which: ConditionId) -> Result<bool> {
    Ok(check_condition(t, p, which)?.is_none())
}

fn normalise(v: &[Scalar]) -> Option<Vec<Scalar>> {
    let s: Scalar = v.iter().sum();
    if s.is_zero() {
        return None;
    }
    let out: Vec<Scalar> = v.iter().map(|x| x / &s).collect();
    if out.iter().any(|x| x.is_negative()) {
        None
    } else {
        Some(out)
    }
}

/// The unique `p` that is a common left fixed vector of all matrices
/// `(T(a,b,c;d))_{b,d}`, if any.
pub fn find_hzpm(t: &TransitionKernel) -> Result<Option<ProbVector>> {
    t.require_positive_rates()?;
    let n = t.n();
    let mut rows = Vec::new();
    for a in 0..n {
        for c in 0..n {
            for d in 0..n {
                let row: Vec<Scalar> = (0..n)
                    .map(|b| {
                        let mut v = t.get(a, b, c, d).clone();
                        if b == d {
                            v -= Scalar::one();
                        }
                        v
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    let basis = linalg::nullspace(&rows, n);
    if basis.len() != 1 {
        return Ok(None);
    }
    let Some(v) = normalise(&basis[0]) else {
        return Ok(None);
    };
    let p = ProbVector::new(v)?;
    if !p.is_positive() || !holds(t, &p, ConditionId::Hzpm)? {
        return Ok(None);
    }
    Ok(Some(p))
}

/// The unique common invariant probability vector of two commuting
/// positive stochastic matrices.
pub fn commuting_invariant_vector(f: &StochasticMatrix, b: &StochasticMatrix) -> Result<ProbVector> {
    if f.n() != b.n() {
        return Err(Error::AlphabetMismatch(f.n(), b.n()));
    }
    if !f.is_positive() || !b.is_positive() {
        return Err(Error::NotPositive);
    }
    if f.mul(b) != b.mul(f) {
        return Err(Error::NotCommuting);
    }
    let n = f.n();
    let mut rows = Vec::new();
    for m in [f, b] {
        for j in 0..n {
            rows.push(
                (0..n)
                    .map(|i| {
                        let mut v = m.get(i, j).clone();
                        if i == j {
                            v -= Scalar::one();
                        }
                        v
                    })
                    .collect(),
            );
        }
    }
    let basis = linalg::nullspace(&rows, n);
    if basis.len() != 1 {
        return Err(Error::EigenvectorNotUnique(basis.len()));
    }
    let v = normalise(&basis[0]).ok_or(Error::NotPositive)?;
    ProbVector::new(v)
}

/// A commuting pair `(F, B)` with its common invariant vector `ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HzmcSpec {
    f: StochasticMatrix,
    b: StochasticMatrix,
    rho: ProbVector,
}

impl HzmcSpec {
    pub fn new(f: StochasticMatrix, b: StochasticMatrix) -> Result<Self> {
        let rho = commuting_invariant_vector(&f, &b)?;
        Ok(HzmcSpec { f, b, rho })
    }

    /// The product case `F = B = rows(p)`.
    pub fn product(p: &ProbVector) -> Result<Self> {
        let m = StochasticMatrix::constant_rows(p);
        HzmcSpec::new(m.clone(), m)
    }

    pub fn f(&self) -> &StochasticMatrix {
        &self.f
    }

    pub fn b(&self) -> &StochasticMatrix {
        &self.b
    }

    pub fn rho(&self) -> &ProbVector {
        &self.rho
    }

    pub fn n(&self) -> usize {
        self.rho.n()
    }

    /// `(B_h, F_h)` with `B_h(b;a) = ρ(a)/ρ(b) B(a;b)` and likewise for `F`:
    /// the pair describing the same chain read right to left.
    pub fn time_reversed(&self) -> Result<HzmcSpec> {
        let n = self.n();
        let rev = |m: &StochasticMatrix| {
            let rows = (0..n)
                .map(|b| (0..n).map(|a| self.rho.get(a) / self.rho.get(b) * m.get(a, b)).collect())
                .collect();
            StochasticMatrix::new(rows)
        };
        HzmcSpec::new(rev(&self.b)?, rev(&self.f)?)
    }
}

/// `w0 I + w1 F + w2 F²`, which commutes with `F`.
pub fn commuting_partner(f: &StochasticMatrix, w: [Scalar; 3]) -> Result<StochasticMatrix> {
    let id = StochasticMatrix::identity(f.n());
    let f2 = f.mul(f);
    StochasticMatrix::mixture(&[(w[0].clone(), &id), (w[1].clone(), f), (w[2].clone(), &f2)])
}

pub fn check_hzmc(t: &TransitionKernel, spec: &HzmcSpec) -> Result<Verdict> {
    same_alphabet(t, spec.n())?;
    let n = t.n();
    let (f, b) = (&spec.f, &spec.b);
    Ok(first_violation(ConditionId::Hzmc, n, |a, c, d| {
        let lhs = f.get(a, d) * b.get(d, c);
        let rhs: Scalar = (0..n).map(|x| b.get(a, x) * f.get(x, c) * t.get(a, x, c, d)).sum();
        (lhs, rhs)
    }))
}

/// Direction of an HZMC quasi-reversibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    R,
    Rinv,
}

/// The `HZMC_R` identity over all `(a,b,d)` or the `HZMC_RINV` identity over
/// all `(b,c,d)`, after checking the `HZMC` condition itself.
pub fn check_hzmc_quasirev(t: &TransitionKernel, spec: &HzmcSpec, dir: Direction) -> Result<Verdict> {
    if let Some(w) = check_hzmc(t, spec)? {
        return Ok(Some(w));
    }
    let n = t.n();
    let (f, b, rho) = (&spec.f, &spec.b, &spec.rho);
    Ok(match dir {
        Direction::R => first_violation(ConditionId::HzmcR, n, |a, x, d| {
            let rhs: Scalar = (0..n).map(|c| f.get(x, c) * t.get(a, x, c, d)).sum();
            (f.get(a, d).clone(), rhs)
        }),
        Direction::Rinv => first_violation(ConditionId::HzmcRinv, n, |x, c, d| {
            let lhs = rho.get(d) / rho.get(c) * b.get(d, c);
            let rhs: Scalar =
                (0..n).map(|a| rho.get(a) / rho.get(x) * b.get(a, x) * t.get(a, x, c, d)).sum();
            (lhs, rhs)
        }),
    })
}

/// Result of recognising a kernel as the rotation of an HZMC-invariant one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HzmcRotation {
    pub spec: HzmcSpec,
    /// `T_{r⁻¹}(a,b,c;d) = F(a;d)/F(b;c) C(d,a,b;c)`.
    pub t_rinv: TransitionKernel,
    /// `T_r(a,b,c;d) = B(c;d)/B(b;a) C(b,c,d;a)`.
    pub t_r: TransitionKernel,
}

fn unique_fixed_row(m: Vec<Vec<Scalar>>) -> Result<Vec<Scalar>> {
    let basis = linalg::left_fixed_space(&m);
    if basis.len() != 1 {
        return Err(Error::EigenvectorNotUnique(basis.len()));
    }
    normalise(&basis[0]).ok_or(Error::NotPositive)
}

/// Reads `F(a;·)` off `(C(d,a,a;c))_{d,c}` and `B(a;·)` off
/// `(C(a,a,b;c))_{b,c}`; returns the HZMC data and both reverse kernels when
/// `EIG_F` and `EIG_B` hold exactly.
pub fn hzmc_from_kernel(c: &TransitionKernel) -> Result<Option<HzmcRotation>> {
    c.require_positive_rates()?;
    let n = c.n();
    let mut f_rows = Vec::with_capacity(n);
    let mut b_rows = Vec::with_capacity(n);
    for a in 0..n {
        let mf = (0..n).map(|d| (0..n).map(|x| c.get(d, a, a, x).clone()).collect()).collect();
        let mb = (0..n).map(|b| (0..n).map(|x| c.get(a, a, b, x).clone()).collect()).collect();
        f_rows.push(unique_fixed_row(mf)?);
        b_rows.push(unique_fixed_row(mb)?);
    }
    let f = StochasticMatrix::new(f_rows)?;
    let b = StochasticMatrix::new(b_rows)?;
    let eig_f = first_violation(ConditionId::EigF, n, |a, x, y| {
        let rhs: Scalar = (0..n).map(|d| f.get(a, d) * c.get(d, a, x, y)).sum();
        (f.get(x, y).clone(), rhs)
    });
    let eig_b = first_violation(ConditionId::EigB, n, |a, x, d| {
        let rhs: Scalar = (0..n).map(|y| b.get(a, y) * c.get(d, a, y, x)).sum();
        (b.get(d, x).clone(), rhs)
    });
    if eig_f.is_some() || eig_b.is_some() {
        return Ok(None);
    }
    let t_rinv = TransitionKernel::from_fn(n, |a, x, y, d| f.get(a, d) / f.get(x, y) * c.get(d, a, x, y))?;
    let t_r = TransitionKernel::from_fn(n, |a, x, y, d| b.get(y, d) / b.get(x, a) * c.get(x, y, d, a))?;
    let spec = HzmcSpec::new(f, b)?;
    Ok(Some(HzmcRotation { spec, t_rinv, t_r }))
}

/// `T_r(d,a,b;c) = F(b;c)/F(a;d) T(a,b,c;d)` for a kernel satisfying `HZMC`
/// and `HZMC_R`.
pub fn hzmc_reverse_r(t: &TransitionKernel, spec: &HzmcSpec) -> Result<TransitionKernel> {
    t.require_positive_rates()?;
    if let Some(w) = check_hzmc_quasirev(t, spec, Direction::R)? {
        return Err(Error::Invalid(format!("not r-quasi-reversible for this HZMC: {w}")));
    }
    let f = spec.f();
    TransitionKernel::from_fn(t.n(), |d, a, b, c| f.get(b, c) / f.get(a, d) * t.get(a, b, c, d))
}

/// Which HZMC family a generated kernel should belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HzmcFamily {
    /// `HZMC` only: `n²(n-1)²` free parameters.
    Invariant,
    /// `HZMC` and `HZMC_R`: `n(n-1)³` free parameters.
    RQuasiReversible,
}

impl HzmcFamily {
    pub fn parameter_count(self, n: usize) -> usize {
        match self {
            HzmcFamily::Invariant => n * n * (n - 1) * (n - 1),
            HzmcFamily::RQuasiReversible => n * (n - 1).pow(3),
        }
    }
}

/// Builds a kernel with the given invariant HZMC by perturbing an explicit
/// solution of the required two-dimensional marginal constraints.
///
/// For each `a` the table `X(b,c,d) = B(a;b) F(b;c) T(a,b,c;d)` must have the
/// `(b,c)` marginal `B(a;b)F(b;c)` and `(c,d)` marginal `F(a;d)B(d;c)`; the
/// `r`-family additionally fixes the `(b,d)` marginal `B(a;b)F(a;d)`.
/// When the explicit solution itself has an entry outside `(0,1)` every
/// parameter vector fails with [`Error::EpsilonTooLarge`].
pub fn gen_hzmc_member(spec: &HzmcSpec, family: HzmcFamily, params: &[Scalar]) -> Result<TransitionKernel> {
    let n = spec.n();
    let expected = family.parameter_count(n);
    if params.len() != expected {
        return Err(Error::DimensionMismatch { expected, got: params.len() });
    }
    let (f, b) = (spec.f(), spec.b());
    let bf = b.mul(f);
    let per_a = expected / n;
    let mut entries = vec![Scalar::zero(); n.pow(4)];
    for a in 0..n {
        let theta = &params[a * per_a..(a + 1) * per_a];
        let (summed, shape): ([bool; 3], [usize; 3]) = match family {
            HzmcFamily::Invariant => ([true, false, true], [n - 1, n, n - 1]),
            HzmcFamily::RQuasiReversible => ([true, true, true], [n - 1, n - 1, n - 1]),
        };
        let delta = zero_sum_completion(n, &summed, |y| {
            theta[(y[0] * shape[1] + y[1]) * shape[2] + y[2]].clone()
        });
        for x in 0..n {
            for c in 0..n {
                let m_bc = b.get(a, x) * f.get(x, c);
                for d in 0..n {
                    let m_cd = f.get(a, d) * b.get(d, c);
                    let base = match family {
                        HzmcFamily::Invariant => &m_bc * &m_cd / bf.get(a, c),
                        HzmcFamily::RQuasiReversible => {
                            let (m_b, m_c, m_d) = (b.get(a, x), bf.get(a, c), f.get(a, d));
                            let m_bd = m_b * m_d;
                            &m_bc * m_d + m_bd * m_c + &m_cd * m_b - Scalar::from_integer(2.into()) * m_b * m_c * m_d
                        }
                    };
                    let value = (base + &delta[(x * n + c) * n + d]) / &m_bc;
                    if !value.is_positive() || value >= Scalar::one() {
                        return Err(Error::EpsilonTooLarge(a, x, c, d));
                    }
                    entries[((a * n + x) * n + c) * n + d] = value;
                }
            }
        }
    }
    TransitionKernel::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::scalar::rat;

    fn two_state(f00: Scalar) -> StochasticMatrix {
        StochasticMatrix::new(vec![
            vec![f00.clone(), Scalar::one() - f00],
            vec![rat(1, 4), rat(3, 4)],
        ])
        .unwrap()
    }

    #[test]
    fn commuting_vector_of_equal_pair() {
        let f = two_state(rat(1, 2));
        let rho = commuting_invariant_vector(&f, &f).unwrap();
        assert_eq!(rho.entries(), &[rat(1, 3), rat(2, 3)]);
    }

    #[test]
    fn non_commuting_pair_is_rejected() {
        let f = two_state(rat(1, 2));
        let b = StochasticMatrix::new(vec![vec![rat(9, 10), rat(1, 10)], vec![rat(1, 2), rat(1, 2)]]).unwrap();
        assert_eq!(commuting_invariant_vector(&f, &b), Err(Error::NotCommuting));
    }

    #[test]
    fn constant_kernel_has_every_product_condition() {
        let p = ProbVector::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        let t = TransitionKernel::constant(&p);
        for c in [ConditionId::Hzpm, ConditionId::R, ConditionId::Rinv] {
            assert!(holds(&t, &p, c).unwrap());
        }
        assert_eq!(find_hzpm(&t).unwrap(), Some(p.clone()));
        let spec = HzmcSpec::product(&p).unwrap();
        assert!(check_hzmc(&t, &spec).unwrap().is_none());
    }

    #[test]
    fn generated_members_satisfy_their_conditions() {
        let f = two_state(rat(1, 2));
        let b = commuting_partner(&f, [rat(1, 5), rat(1, 2), rat(3, 10)]).unwrap();
        let spec = HzmcSpec::new(f, b).unwrap();
        for family in [HzmcFamily::Invariant, HzmcFamily::RQuasiReversible] {
            let k = family.parameter_count(2);
            let params: Vec<Scalar> = (0..k).map(|i| rat(i as i64 % 3 - 1, 97)).collect();
            let t = gen_hzmc_member(&spec, family, &params).unwrap();
            assert!(check_hzmc(&t, &spec).unwrap().is_none());
            if family == HzmcFamily::RQuasiReversible {
                assert!(check_hzmc_quasirev(&t, &spec, Direction::R).unwrap().is_none());
            }
        }
    }

    #[test]
    fn condition_names_parse() {
        for c in ConditionId::ALL {
            assert_eq!(c.name().parse::<ConditionId>().unwrap(), c);
        }
    }
}
