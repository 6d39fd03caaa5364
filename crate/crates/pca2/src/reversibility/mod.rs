//! The D4 action on kernels: reverses, quasi-reversibility and reversibility
//! reports, the binary parametrisations, and family generators with their
//! dimensions.

pub mod binary;
pub mod families;

pub use binary::{admissible_interval, binary_family};
pub use families::{family_dimension, gen_member, is_member, parameter_count, FamilyId};

use crate::error::{Error, Result};
use crate::invariance::{check_condition, ConditionId};
use crate::primitives::dihedral::DihedralElement;
use crate::primitives::kernel::{tuples, TransitionKernel};
use crate::primitives::prob::ProbVector;
use crate::primitives::scalar::Scalar;

/// The row-sum condition a `g`-reverse needs beyond membership in
/// Triang(S,p): the transformed output is drawn from position
/// `g.output_source()`, whose `p`-weighted sum must equal `p(d)`.
pub fn required_condition(g: DihedralElement) -> Option<ConditionId> {
    match g.output_source() {
        0 => Some(ConditionId::Rinv),
        1 => Some(ConditionId::Hzpm),
        2 => Some(ConditionId::R),
        _ => None,
    }
}

/// `T_g(σ_g(x)) = p(x_{π(g)}) / p(x_d) · T(x)` without precondition checks.
/// Fails only if the result is not row-stochastic.
pub fn reverse_formula(t: &TransitionKernel, p: &ProbVector, g: DihedralElement) -> Result<TransitionKernel> {
    let n = t.n();
    let src = g.output_source();
    let mut entries = vec![Scalar::default(); n.pow(4)];
    for x in tuples(n, 4) {
        let x4 = [x[0], x[1], x[2], x[3]];
        let y = g.apply(x4);
        let value = p.get(x[src]) / p.get(x[3]) * t.at(&x);
        entries[t.index(y[0], y[1], y[2], y[3])] = value;
    }
    TransitionKernel::new(n, entries)
}

fn require(t: &TransitionKernel, p: &ProbVector, g: DihedralElement, c: ConditionId) -> Result<()> {
    if check_condition(t, p, c)?.is_some() {
        return Err(Error::PreconditionFailed(g, c));
    }
    Ok(())
}

/// The `g`-reverse of a kernel of Triang(S,p); `r`-type elements
/// additionally need the corresponding row condition.
pub fn reverse_kernel(t: &TransitionKernel, p: &ProbVector, g: DihedralElement) -> Result<TransitionKernel> {
    if p.n() != t.n() {
        return Err(Error::AlphabetMismatch(t.n(), p.n()));
    }
    require(t, p, g, ConditionId::Hzpm)?;
    if let Some(c) = required_condition(g) {
        require(t, p, g, c)?;
    }
    reverse_formula(t, p, g)
}

fn require_triang(t: &TransitionKernel, p: &ProbVector) -> Result<()> {
    if check_condition(t, p, ConditionId::Hzpm)?.is_some() {
        Err(Error::NotInTriang)
    } else {
        Ok(())
    }
}

/// Elements `g` for which the stationary diagram, transformed by `g`, is again
/// the stationary diagram of a memory-two kernel, each with that kernel.
#[derive(Debug, Clone)]
pub struct QuasiReport {
    pub elements: Vec<(DihedralElement, TransitionKernel)>,
}

impl QuasiReport {
    pub fn contains(&self, g: DihedralElement) -> bool {
        self.elements.iter().any(|(h, _)| *h == g)
    }

    pub fn group(&self) -> Vec<DihedralElement> {
        self.elements.iter().map(|(g, _)| *g).collect()
    }

    pub fn reverse(&self, g: DihedralElement) -> Option<&TransitionKernel> {
        self.elements.iter().find(|(h, _)| *h == g).map(|(_, k)| k)
    }
}

pub fn quasi_reversibility_report(t: &TransitionKernel, p: &ProbVector) -> Result<QuasiReport> {
    require_triang(t, p)?;
    let mut elements = Vec::new();
    for g in DihedralElement::ALL {
        let ok = match required_condition(g) {
            None | Some(ConditionId::Hzpm) => true,
            Some(c) => check_condition(t, p, c)?.is_none(),
        };
        if ok {
            elements.push((g, reverse_formula(t, p, g)?));
        }
    }
    Ok(QuasiReport { elements })
}

/// The first tuple violating the `g`-reversibility identity
/// `T(σ_g(x)) = p(x_{π(g)}) / p(x_d) · T(x)`, if any.
pub fn reversibility_witness(t: &TransitionKernel, p: &ProbVector, g: DihedralElement) -> Option<[usize; 4]> {
    let src = g.output_source();
    tuples(t.n(), 4).find_map(|x| {
        let x4 = [x[0], x[1], x[2], x[3]];
        let y = g.apply(x4);
        let rhs = p.get(x[src]) / p.get(x[3]) * t.at(&x);
        (t.at(&y) != &rhs).then_some(x4)
    })
}

/// The subgroup of `g` with `T_g = T`, evaluated identity by identity.
pub fn reversibility_report(t: &TransitionKernel, p: &ProbVector) -> Result<Vec<DihedralElement>> {
    require_triang(t, p)?;
    let fixed: Vec<DihedralElement> = DihedralElement::ALL
        .iter()
        .copied()
        .filter(|&g| reversibility_witness(t, p, g).is_none())
        .collect();
    let closed = DihedralElement::closure(&fixed);
    debug_assert_eq!(closed, fixed, "fixed elements of a group action form a subgroup");
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::scalar::rat;
    use DihedralElement::*;

    #[test]
    fn required_conditions_follow_the_output_position() {
        assert_eq!(required_condition(R), Some(ConditionId::R));
        assert_eq!(required_condition(R3), Some(ConditionId::Rinv));
        assert_eq!(required_condition(RV), Some(ConditionId::Rinv));
        assert_eq!(required_condition(R3V), Some(ConditionId::R));
        assert_eq!(required_condition(H), Some(ConditionId::Hzpm));
        assert_eq!(required_condition(R2), Some(ConditionId::Hzpm));
        assert_eq!(required_condition(V), None);
    }

    #[test]
    fn constant_kernel_is_fully_reversible() {
        let p = ProbVector::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        let t = TransitionKernel::constant(&p);
        assert_eq!(reversibility_report(&t, &p).unwrap().len(), 8);
        let q = quasi_reversibility_report(&t, &p).unwrap();
        assert_eq!(q.group().len(), 8);
        for (_, k) in &q.elements {
            assert_eq!(k, &t);
        }
    }
}
