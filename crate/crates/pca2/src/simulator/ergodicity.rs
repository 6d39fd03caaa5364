use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::invariance::find_hzpm;
use crate::primitives::kernel::TransitionKernel;
use crate::primitives::scalar::{pow, to_f64, Scalar};

/// Largest window chain `ergodicity_tv` will build.
pub const MAX_CHAIN_STATES: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicityPoint {
    pub t: usize,
    /// `||ν_t − π_p||₁` on the window.
    pub distance: Scalar,
    /// `2θ^t`.
    pub bound: Scalar,
}

impl ErgodicityPoint {
    pub fn distance_f64(&self) -> f64 {
        to_f64(&self.distance)
    }

    pub fn bound_f64(&self) -> f64 {
        to_f64(&self.bound)
    }
}

/// Exact L1 distance between the window law started from the all-zero zigzag
/// and the product law `π_p`, for `t = 0..=t_max`.
///
/// The window holds the zigzag `(a_0, b_0, a_1, ..., b_{k-1}, a_k)`: `k+1`
/// sites on one row and `k` on the next. One step draws the new lower row
/// `a'_i ~ T(b_{i-1}, a_i, b_i)`, with fresh `p`-distributed symbols for
/// `b_{-1}` and `b_k`, then `b'_i ~ T(a'_i, b_i, a'_{i+1})`. Each step resamples
/// `2k+1` cells, which gives the contraction `θ = 1 − (min T)^{2k+1}`.
pub fn ergodicity_tv(t: &TransitionKernel, k: usize, t_max: usize) -> Result<Vec<ErgodicityPoint>> {
    t.require_positive_rates()?;
    let p = find_hzpm(t)?.ok_or(Error::NotInTriang)?;
    let n = t.n();
    let sites = 2 * k + 1;
    let states = (n as f64).powi(sites as i32);
    if states > MAX_CHAIN_STATES as f64 {
        return Err(Error::StateSpaceTooLarge(states as usize));
    }
    let states = states as usize;

    let decode = |mut code: usize| -> Vec<usize> {
        let mut x = vec![0; sites];
        for slot in x.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        x
    };
    // Boundary-averaged law of the lowest new cell next to an edge.
    let edge_left: Vec<Vec<Scalar>> = (0..n * n)
        .map(|ab| {
            let (a, b) = (ab / n, ab % n);
            (0..n).map(|d| (0..n).map(|l| p.get(l) * t.get(l, a, b, d)).sum()).collect()
        })
        .collect();
    let edge_right: Vec<Vec<Scalar>> = (0..n * n)
        .map(|ba| {
            let (b, a) = (ba / n, ba % n);
            (0..n).map(|d| (0..n).map(|r| p.get(r) * t.get(b, a, r, d)).sum()).collect()
        })
        .collect();

    // Transition rows, sparse: for each state the list of (next state, prob).
    let transitions: Vec<Vec<(usize, Scalar)>> = (0..states)
        .map(|code| {
            let x = decode(code);
            let a: Vec<usize> = (0..=k).map(|i| x[2 * i]).collect();
            let b: Vec<usize> = (0..k).map(|i| x[2 * i + 1]).collect();
            let a_laws: Vec<Vec<Scalar>> = (0..=k)
                .map(|i| {
                    if k == 0 {
                        (0..n)
                            .map(|d| {
                                let mut s = Scalar::zero();
                                for l in 0..n {
                                    for r in 0..n {
                                        s += p.get(l) * p.get(r) * t.get(l, a[0], r, d);
                                    }
                                }
                                s
                            })
                            .collect()
                    } else if i == 0 {
                        edge_left[a[0] * n + b[0]].clone()
                    } else if i == k {
                        edge_right[b[k - 1] * n + a[k]].clone()
                    } else {
                        t.row(b[i - 1], a[i], b[i]).to_vec()
                    }
                })
                .collect();
            let mut out = Vec::new();
            for a_code in 0..n.pow((k + 1) as u32) {
                let mut rest = a_code;
                let mut a_new = vec![0; k + 1];
                for slot in a_new.iter_mut().rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                let wa: Scalar = a_new.iter().enumerate().fold(Scalar::one(), |acc, (i, &v)| acc * &a_laws[i][v]);
                if wa.is_zero() {
                    continue;
                }
                for b_code in 0..n.pow(k as u32) {
                    let mut rest = b_code;
                    let mut b_new = vec![0; k];
                    for slot in b_new.iter_mut().rev() {
                        *slot = rest % n;
                        rest /= n;
                    }
                    let mut w = wa.clone();
                    for i in 0..k {
                        w *= t.get(a_new[i], b[i], a_new[i + 1], b_new[i]);
                    }
                    let mut next = 0;
                    for i in 0..sites {
                        let v = if i % 2 == 0 { a_new[i / 2] } else { b_new[i / 2] };
                        next = next * n + v;
                    }
                    out.push((next, w));
                }
            }
            out
        })
        .collect();

    let stationary: Vec<Scalar> =
        (0..states).map(|code| decode(code).iter().fold(Scalar::one(), |acc, &v| acc * p.get(v))).collect();
    let mut law = vec![Scalar::zero(); states];
    law[0] = Scalar::one();

    let theta = Scalar::one() - pow(&t.min_entry(), sites);
    let two = Scalar::from_integer(2.into());
    let mut out = Vec::with_capacity(t_max + 1);
    for step in 0..=t_max {
        let distance: Scalar = law.iter().zip(&stationary).map(|(x, y)| num_traits::Signed::abs(&(x - y))).sum();
        out.push(ErgodicityPoint { t: step, distance, bound: &two * pow(&theta, step) });
        if step == t_max {
            break;
        }
        let mut next = vec![Scalar::zero(); states];
        for (s, mass) in law.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            for (s2, w) in &transitions[s] {
                next[*s2] += mass * w;
            }
        }
        debug_assert!(next.iter().sum::<Scalar>().is_one());
        law = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::prob::ProbVector;
    use crate::primitives::scalar::rat;

    #[test]
    fn memoryless_kernel_mixes_in_one_step() {
        let p = ProbVector::new(vec![rat(1, 3), rat(2, 3)]).unwrap();
        let t = TransitionKernel::constant(&p);
        let pts = ergodicity_tv(&t, 1, 3).unwrap();
        assert!(pts[0].distance > Scalar::zero());
        for pt in &pts[1..] {
            assert!(pt.distance.is_zero());
        }
    }

    #[test]
    fn zero_rates_are_rejected() {
        let t = TransitionKernel::from_fn(2, |_, _, _, d| if d == 0 { Scalar::one() } else { Scalar::zero() }).unwrap();
        assert_eq!(ergodicity_tv(&t, 1, 2).unwrap_err(), Error::NonPositiveRates);
    }
}
