//! Synchronous TASEP of order two on the integers.
//!
//! Particle `i` at time `t` sits at `x_i(t)` and moves by `v_i(t) ∈ {0,1}`.
//! As a memory-two PCA on positions, `T(a,b,c;d)` reads `a = x_i(t)`,
//! `b = x_{i+1}(t-1)` and `c = x_{i+1}(t)`. With `k = b − a >= 1` the move
//! probability is `T(0,k,k+1;1)` when the particle ahead just moved and
//! `T(0,k,k;1)` when it did not; the latter vanishes at `k = 1`, where the
//! site ahead is occupied.

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primitives::scalar::{fmt_scalar, to_f64, Scalar};
use crate::simulator::CellRng;

/// Move probabilities, constant beyond the listed values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TasepKernel {
    /// `T(0,k,k+1;1)` for `k = 1, 2, ...`.
    after_move: Vec<Scalar>,
    /// `T(0,k,k;1)` for `k = 2, 3, ...`.
    after_stay: Vec<Scalar>,
}

impl TasepKernel {
    pub fn new(after_move: Vec<Scalar>, after_stay: Vec<Scalar>) -> Result<Self> {
        if after_move.is_empty() || after_stay.is_empty() {
            return Err(Error::Invalid("each move family needs at least one value".into()));
        }
        if after_move.iter().chain(&after_stay).any(|x| *x < Scalar::zero() || *x > Scalar::one()) {
            return Err(Error::ParamOutOfRange("move probabilities must lie in [0,1]".into()));
        }
        Ok(TasepKernel { after_move, after_stay })
    }

    /// Every allowed move happens with probability `p`.
    pub fn classical(p: Scalar) -> Result<Self> {
        TasepKernel::new(vec![p.clone()], vec![p])
    }

    /// `T(0,k,k+1;1)`, `k >= 1`.
    pub fn move_after_move(&self, k: u64) -> Scalar {
        assert!(k >= 1);
        let i = ((k - 1) as usize).min(self.after_move.len() - 1);
        self.after_move[i].clone()
    }

    /// `T(0,k,k;1)`, `k >= 1`; zero at `k = 1`.
    pub fn move_after_stay(&self, k: u64) -> Scalar {
        assert!(k >= 1);
        if k == 1 {
            return Scalar::zero();
        }
        let i = ((k - 2) as usize).min(self.after_stay.len() - 1);
        self.after_stay[i].clone()
    }

    /// Move probability at headway `k` given the speed of the particle ahead.
    pub fn move_probability(&self, k: u64, ahead_moved: bool) -> Scalar {
        if ahead_moved {
            self.move_after_move(k)
        } else {
            self.move_after_stay(k)
        }
    }

    /// `T(a,b,c;d)` on positions; `None` for contexts that cannot occur.
    pub fn entry(&self, a: i64, b: i64, c: i64, d: i64) -> Option<Scalar> {
        let k = b - a;
        let y = c - b;
        if k < 1 || !(0..=1).contains(&y) {
            return None;
        }
        let m = self.move_probability(k as u64, y == 1);
        Some(match d - a {
            0 => Scalar::one() - m,
            1 => m,
            _ => Scalar::zero(),
        })
    }

    /// Headway beyond which every move probability is constant.
    fn tail_start(&self) -> u64 {
        (self.after_move.len() as u64).max(self.after_stay.len() as u64 + 1)
    }
}

/// Stationary headway law `p(1..=cutoff)` with its exact normalisation.
#[derive(Clone, Debug, PartialEq)]
pub struct GapLaw {
    pub p: Vec<Scalar>,
    pub z: Scalar,
    /// Exact mass of `{k > cutoff}`.
    pub tail_mass: Scalar,
    /// Constant ratio `p(k+1)/p(k)` in the tail.
    pub tail_ratio: Scalar,
}

impl GapLaw {
    pub fn cutoff(&self) -> usize {
        self.p.len()
    }

    /// `p(k)`, `k >= 1`, including the geometric tail.
    pub fn prob(&self, k: usize) -> Scalar {
        assert!(k >= 1);
        if k <= self.p.len() {
            return self.p[k - 1].clone();
        }
        let mut v = self.p.last().unwrap().clone();
        for _ in self.p.len()..k {
            v *= &self.tail_ratio;
        }
        v
    }
}

fn ratio(kernel: &TasepKernel, q1: &Scalar, k: u64) -> Result<Scalar> {
    let q0 = Scalar::one() - q1;
    let denom = kernel.move_after_stay(k + 1);
    if denom.is_zero() {
        return Err(Error::Divergent(format!("T(0,{},{};1) = 0 admits no headway law", k + 1, k + 1)));
    }
    Ok(q1 / q0 * (Scalar::one() - kernel.move_after_move(k)) / denom)
}

/// The unique headway law `p` solving
/// `p(k) q(1) T(0,k,k+1;0) + p(k+1) q(0) T(0,k+1,k+1;0) = p(k+1) q(0)`,
/// `p(k+1)/p(k) = (q(1)/q(0)) T(0,k,k+1;0) / T(0,k+1,k+1;1)`.
///
/// The kernel's constant tail makes the series geometric, so `Z` and the tail
/// mass are exact. The balance identity is re-verified for `k < cutoff`.
pub fn tasep_gap_law(kernel: &TasepKernel, q1: &Scalar, cutoff: usize) -> Result<GapLaw> {
    if *q1 <= Scalar::zero() || *q1 >= Scalar::one() {
        return Err(Error::ParamOutOfRange("q(1) must lie in (0,1)".into()));
    }
    if cutoff == 0 {
        return Err(Error::Invalid("cutoff must be positive".into()));
    }
    let q0 = Scalar::one() - q1;
    let last = (cutoff as u64).max(kernel.tail_start());
    let tail_ratio = ratio(kernel, q1, last)?;
    if tail_ratio >= Scalar::one() {
        return Err(Error::Divergent(fmt_scalar(&tail_ratio)));
    }
    let mut w = vec![Scalar::one()];
    for k in 1..last {
        let next = w.last().unwrap() * ratio(kernel, q1, k)?;
        w.push(next);
    }
    let head: Scalar = w.iter().sum();
    let tail = w.last().unwrap() * &tail_ratio / (Scalar::one() - &tail_ratio);
    let z = &head + &tail;
    let p: Vec<Scalar> = w.iter().map(|x| x / &z).collect();
    let tail_mass = Scalar::one() - p[..cutoff].iter().sum::<Scalar>();
    let law = GapLaw { p: p[..cutoff].to_vec(), z, tail_mass, tail_ratio };
    for k in 1..cutoff as u64 {
        let pk = law.prob(k as usize);
        let pk1 = law.prob(k as usize + 1);
        let lhs = &pk * q1 * (Scalar::one() - kernel.move_after_move(k))
            + &pk1 * &q0 * (Scalar::one() - kernel.move_after_stay(k + 1));
        if lhs != &pk1 * &q0 {
            return Err(Error::Invalid(format!("balance identity fails at k = {k}")));
        }
    }
    Ok(law)
}

/// What the frontmost particle follows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeaderPolicy {
    /// Independent `B(q(1))` speeds.
    Free,
    /// Particles on a ring: the leader follows particle 0 shifted by the ring
    /// length.
    Ring,
}

#[derive(Clone, Debug)]
pub struct TasepConfig {
    pub particles: usize,
    pub steps: usize,
    pub seed: u64,
    pub leader: LeaderPolicy,
    /// Initial headway law `p(1), p(2), ...`; the stationary law when absent.
    pub initial_gaps: Option<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct TasepStats {
    /// Moves and stays over all particle updates.
    pub speed_counts: [u64; 2],
    /// Headways `x_{i+1}(T) − x_i(T+1)` of the final zigzag.
    pub final_gaps: Vec<u64>,
    /// Speeds `x_i(T+1) − x_i(T)` of the final zigzag.
    pub final_speeds: Vec<u8>,
    /// `x_0(t)` for `t = 0..=T`.
    pub trajectory: Vec<i64>,
}

impl TasepStats {
    /// Histogram of `final_gaps`, index `k-1` counting headway `k`.
    pub fn gap_histogram(&self) -> Vec<u64> {
        let max = self.final_gaps.iter().copied().max().unwrap_or(0) as usize;
        let mut h = vec![0; max];
        for &g in &self.final_gaps {
            h[g as usize - 1] += 1;
        }
        h
    }

    pub fn displacement(&self) -> i64 {
        self.trajectory.last().unwrap() - self.trajectory[0]
    }
}

fn gap_cdf(law: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = law
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    *out.last_mut().unwrap() = 1.0;
    out
}

/// Simulates `N` particles from the stationary zigzag start with a free
/// leader.
pub fn tasep_simulate(kernel: &TasepKernel, q1: &Scalar, particles: usize, steps: usize, seed: u64) -> Result<TasepStats> {
    tasep_simulate_with(
        kernel,
        q1,
        &TasepConfig { particles, steps, seed, leader: LeaderPolicy::Free, initial_gaps: None },
    )
}

/// The zigzag `(x(t), x(t+1))` is stored as `x_0(t)`, the speeds
/// `v_i = x_i(t+1) − x_i(t)` and the headways `g_i = x_{i+1}(t) − x_i(t+1)`.
/// Initially `x_0(0) = 0`, speeds are i.i.d. `B(q(1))` and headways i.i.d.
/// from the initial law.
pub fn tasep_simulate_with(kernel: &TasepKernel, q1: &Scalar, cfg: &TasepConfig) -> Result<TasepStats> {
    let n = cfg.particles;
    if n < 2 {
        return Err(Error::Invalid("need at least two particles".into()));
    }
    if *q1 < Scalar::zero() || *q1 > Scalar::one() {
        return Err(Error::ParamOutOfRange("q(1) must lie in [0,1]".into()));
    }
    let gaps_law: Vec<f64> = match &cfg.initial_gaps {
        Some(l) if !l.is_empty() && l.iter().all(|x| *x >= 0.0) => l.clone(),
        Some(_) => return Err(Error::Invalid("initial headway law must be a nonnegative list".into())),
        None => {
            let mut cutoff = 64;
            loop {
                let law = tasep_gap_law(kernel, q1, cutoff)?;
                if to_f64(&law.tail_mass) < 1e-15 || cutoff > 1 << 16 {
                    break law.p.iter().map(to_f64).collect();
                }
                cutoff *= 2;
            }
        }
    };
    let cdf = gap_cdf(&gaps_law);
    let q1f = to_f64(q1);
    // Move probabilities as floats, indexed by headway with the tail clamped.
    let table_len = kernel.tail_start() as usize + 1;
    let after_move: Vec<f64> = (1..=table_len as u64).map(|k| to_f64(&kernel.move_after_move(k))).collect();
    let after_stay: Vec<f64> = (1..=table_len as u64).map(|k| to_f64(&kernel.move_after_stay(k))).collect();
    let move_p = |k: u64, ahead_moved: bool| -> f64 {
        let i = (k as usize).min(table_len) - 1;
        if ahead_moved {
            after_move[i]
        } else {
            after_stay[i]
        }
    };

    let rng = CellRng::new(cfg.seed);
    let mut init = rng.sequential();
    let mut speeds: Vec<u8> = (0..n).map(|_| u8::from(init.gen::<f64>() < q1f)).collect();
    let mut gaps: Vec<u64> = (0..n)
        .map(|_| {
            let u: f64 = init.gen();
            cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1) as u64 + 1
        })
        .collect();
    // Free leader: there is no particle ahead of n-1, so its headway is unused.
    let ring = cfg.leader == LeaderPolicy::Ring;
    let ring_length: u64 = if ring { speeds.iter().map(|&v| v as u64).sum::<u64>() + gaps.iter().sum::<u64>() } else { 0 };

    let mut x0 = 0i64;
    let mut trajectory = Vec::with_capacity(cfg.steps + 1);
    trajectory.push(x0);
    let mut counts = [0u64; 2];
    for t in 0..cfg.steps {
        let new_speeds: Vec<u8> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut r = rng.cell(i, t);
                let u: f64 = r.gen();
                if i + 1 == n && !ring {
                    u8::from(u < q1f)
                } else {
                    let ahead = if i + 1 == n { speeds[0] } else { speeds[i + 1] };
                    u8::from(u < move_p(gaps[i], ahead == 1))
                }
            })
            .collect();
        for i in 0..n {
            let ahead = if i + 1 == n { speeds[0] } else { speeds[i + 1] };
            if i + 1 < n || ring {
                let g = gaps[i] as i64 + ahead as i64 - new_speeds[i] as i64;
                assert!(g >= 1, "exclusion violated at particle {i}");
                gaps[i] = g as u64;
            }
            counts[new_speeds[i] as usize] += 1;
        }
        x0 += speeds[0] as i64;
        trajectory.push(x0);
        speeds = new_speeds;
        if ring {
            debug_assert_eq!(speeds.iter().map(|&v| v as u64).sum::<u64>() + gaps.iter().sum::<u64>(), ring_length);
        }
    }
    let final_gaps = if ring { gaps } else { gaps[..n - 1].to_vec() };
    Ok(TasepStats { speed_counts: counts, final_gaps, final_speeds: speeds, trajectory })
}
