//! Exact finite-dimensional distributions of stationary space-time diagrams.
//!
//! Everything here reduces to one routine: a Bayesian network whose nodes are
//! lattice cells, evaluated by forward variable elimination. A variable is
//! summed out as soon as no later node reads it, so the frontier stays at the
//! width of a few lattice rows instead of the whole pattern.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::invariance::{check_condition, ConditionId, HzmcSpec};
use crate::primitives::kernel::TransitionKernel;
use crate::primitives::matrix::StochasticMatrix;
use crate::primitives::prob::ProbVector;
use crate::primitives::scalar::{fmt_scalar, Scalar};
use crate::reversibility::reverse_kernel;
use crate::DihedralElement;

/// Exact law of a finite family of cells, keyed by value tuples.
///
/// Only assignments of positive probability are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDistribution {
    arity: usize,
    n: usize,
    probs: BTreeMap<Vec<usize>, Scalar>,
}

impl FiniteDistribution {
    pub fn new(n: usize, arity: usize, probs: BTreeMap<Vec<usize>, Scalar>) -> Result<Self> {
        let mut total = Scalar::zero();
        for (k, v) in &probs {
            if k.len() != arity || k.iter().any(|&x| x >= n) {
                return Err(Error::Invalid(format!("key {k:?} is not a tuple of length {arity} over {n} symbols")));
            }
            if *v < Scalar::zero() {
                return Err(Error::Invalid(format!("negative probability at {k:?}")));
            }
            total += v;
        }
        if !total.is_one() {
            return Err(Error::NotNormalized(fmt_scalar(&total)));
        }
        let probs = probs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(FiniteDistribution { arity, n, probs })
    }

    /// Product law of `arity` independent copies of `p`.
    pub fn product(p: &ProbVector, arity: usize) -> Self {
        let n = p.n();
        let probs = crate::primitives::kernel::tuples(n, arity)
            .map(|k| {
                let w = k.iter().fold(Scalar::one(), |acc, &x| acc * p.get(x));
                (k, w)
            })
            .collect();
        FiniteDistribution::new(n, arity, probs).expect("product of a probability vector")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prob(&self, key: &[usize]) -> Scalar {
        self.probs.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.probs.iter()
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    /// Law of the coordinates `positions`, in that order.
    pub fn marginal(&self, positions: &[usize]) -> FiniteDistribution {
        let mut out: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        for (k, v) in &self.probs {
            let key: Vec<usize> = positions.iter().map(|&i| k[i]).collect();
            *out.entry(key).or_insert_with(Scalar::zero) += v;
        }
        FiniteDistribution { arity: positions.len(), n: self.n, probs: out }
    }

    /// First assignment (in key order) where the law differs from the product
    /// of its one-dimensional marginals, if any.
    pub fn product_violation(&self) -> Option<(Vec<usize>, Scalar, Scalar)> {
        let singles: Vec<FiniteDistribution> = (0..self.arity).map(|i| self.marginal(&[i])).collect();
        for key in crate::primitives::kernel::tuples(self.n, self.arity) {
            let prod = key
                .iter()
                .enumerate()
                .fold(Scalar::one(), |acc, (i, &x)| acc * singles[i].prob(&[x]));
            let joint = self.prob(&key);
            if joint != prod {
                return Some((key, joint, prod));
            }
        }
        None
    }

    pub fn is_product(&self) -> bool {
        self.product_violation().is_none()
    }

    /// Sorted tab-separated table, `x0,x1,...<TAB>num/den` per line.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.probs {
            let key: Vec<String> = k.iter().map(|x| x.to_string()).collect();
            s.push_str(&key.join(","));
            s.push('\t');
            s.push_str(&fmt_scalar(v));
            s.push('\n');
        }
        s
    }
}

impl fmt::Display for FiniteDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_table())
    }
}

enum Node<'a> {
    Leaf(Vec<Scalar>),
    Chain(usize, &'a StochasticMatrix),
    Cell(&'a TransitionKernel, [usize; 3]),
}

impl Node<'_> {
    fn parents(&self) -> Vec<usize> {
        match self {
            Node::Leaf(_) => vec![],
            Node::Chain(p, _) => vec![*p],
            Node::Cell(_, ps) => ps.to_vec(),
        }
    }
}

/// Joint law of `keep` under the network `nodes` (topologically ordered).
fn eliminate(n: usize, nodes: &[Node<'_>], keep: &[usize]) -> FiniteDistribution {
    let mut needed = vec![false; nodes.len()];
    let mut stack: Vec<usize> = keep.to_vec();
    while let Some(v) = stack.pop() {
        if !needed[v] {
            needed[v] = true;
            stack.extend(nodes[v].parents());
        }
    }
    // Leaves enter the frontier just before their first consumer.
    let mut first_use: Vec<Option<usize>> = vec![None; nodes.len()];
    for v in (0..nodes.len()).rev().filter(|&v| needed[v]) {
        for q in nodes[v].parents() {
            debug_assert!(q < v, "network must be topologically ordered");
            first_use[q] = Some(v);
        }
    }
    let deferred = |v: usize| matches!(nodes[v], Node::Leaf(_)) && first_use[v].is_some();
    let mut order: Vec<usize> = Vec::new();
    for v in (0..nodes.len()).filter(|&v| needed[v] && !deferred(v)) {
        for q in nodes[v].parents() {
            if deferred(q) && first_use[q] == Some(v) {
                order.push(q);
            }
        }
        order.push(v);
    }
    let mut last_use = vec![0usize; nodes.len()];
    for (pos, &v) in order.iter().enumerate() {
        last_use[v] = last_use[v].max(pos);
        for q in nodes[v].parents() {
            last_use[q] = last_use[q].max(pos);
        }
    }
    let kept: BTreeSet<usize> = keep.iter().copied().collect();

    let mut live: Vec<usize> = Vec::new();
    let mut frontier: HashMap<Vec<u8>, Scalar> = HashMap::new();
    frontier.insert(Vec::new(), Scalar::one());
    for (pos, &v) in order.iter().enumerate() {
        let node = &nodes[v];
        let slot = |q: usize| live.iter().position(|&x| x == q).expect("parent is live");
        let mut next: HashMap<Vec<u8>, Scalar> = HashMap::with_capacity(frontier.len() * n);
        match node {
            Node::Leaf(probs) => {
                for (key, w) in &frontier {
                    for (x, px) in probs.iter().enumerate() {
                        if px.is_zero() {
                            continue;
                        }
                        let mut k = key.clone();
                        k.push(x as u8);
                        next.insert(k, w * px);
                    }
                }
            }
            Node::Chain(q, m) => {
                let sq = slot(*q);
                for (key, w) in &frontier {
                    let from = key[sq] as usize;
                    for x in 0..n {
                        let px = m.get(from, x);
                        if px.is_zero() {
                            continue;
                        }
                        let mut k = key.clone();
                        k.push(x as u8);
                        next.insert(k, w * px);
                    }
                }
            }
            Node::Cell(t, ps) => {
                let s = [slot(ps[0]), slot(ps[1]), slot(ps[2])];
                for (key, w) in &frontier {
                    let row = t.row(key[s[0]] as usize, key[s[1]] as usize, key[s[2]] as usize);
                    for (x, px) in row.iter().enumerate() {
                        if px.is_zero() {
                            continue;
                        }
                        let mut k = key.clone();
                        k.push(x as u8);
                        next.insert(k, w * px);
                    }
                }
            }
        }
        live.push(v);
        frontier = next;

        let keep_mask: Vec<bool> = live.iter().map(|&q| kept.contains(&q) || last_use[q] > pos).collect();
        if keep_mask.iter().any(|&b| !b) {
            let mut reduced: HashMap<Vec<u8>, Scalar> = HashMap::with_capacity(frontier.len());
            for (key, w) in frontier {
                let k: Vec<u8> = key.iter().zip(&keep_mask).filter(|(_, &b)| b).map(|(x, _)| *x).collect();
                *reduced.entry(k).or_insert_with(Scalar::zero) += w;
            }
            live = live.into_iter().zip(&keep_mask).filter(|(_, &b)| b).map(|(q, _)| q).collect();
            frontier = reduced;
        }
    }

    let order: Vec<usize> = keep.iter().map(|q| live.iter().position(|x| x == q).unwrap()).collect();
    let mut probs: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
    for (key, w) in frontier {
        let k: Vec<usize> = order.iter().map(|&i| key[i] as usize).collect();
        *probs.entry(k).or_insert_with(Scalar::zero) += w;
    }
    FiniteDistribution::new(n, keep.len(), probs).expect("network laws are normalized")
}

/// Values `a_{i,j}`, `0 <= i,j <= m`, on the cells `x + i·u + j·v` with
/// `u = (-1,1)` and `v = (1,1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiamondPattern {
    m: usize,
    values: Vec<Vec<usize>>,
}

impl DiamondPattern {
    pub fn new(values: Vec<Vec<usize>>) -> Result<Self> {
        let m = values.len().checked_sub(1).ok_or_else(|| Error::Invalid("empty pattern".into()))?;
        if values.iter().any(|r| r.len() != m + 1) {
            return Err(Error::Invalid("pattern rows must all have length m+1".into()));
        }
        Ok(DiamondPattern { m, values })
    }

    pub fn constant(m: usize, s: usize) -> Self {
        DiamondPattern { m, values: vec![vec![s; m + 1]; m + 1] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.values[i][j]
    }

    /// Lattice position of `a_{i,j}` relative to `x = (0,0)`.
    pub fn position(i: usize, j: usize) -> (i64, i64) {
        (j as i64 - i as i64, (i + j) as i64)
    }
}

/// Probability of a diamond pattern in the stationary diagram `G(A, π_p)`.
pub fn diamond_probability(t: &TransitionKernel, p: &ProbVector, pattern: &DiamondPattern) -> Result<Scalar> {
    if p.n() != t.n() {
        return Err(Error::AlphabetMismatch(p.n(), t.n()));
    }
    if pattern.values.iter().flatten().any(|&x| x >= t.n()) {
        return Err(Error::Invalid("pattern value outside the alphabet".into()));
    }
    if check_condition(t, p, ConditionId::Hzpm)?.is_some() {
        return Err(Error::NotInTriang);
    }
    let m = pattern.m;
    let a = |i: usize, j: usize| pattern.get(i, j);
    let mut w = Scalar::one();
    for i in 0..=m {
        w *= p.get(a(i, 0));
    }
    for j in 1..=m {
        w *= p.get(a(0, j));
    }
    for i in 1..=m {
        for j in 1..=m {
            w *= t.get(a(i, j - 1), a(i - 1, j - 1), a(i - 1, j), a(i, j));
        }
    }
    Ok(w)
}

/// Cells of the two vertical lines `V0 = {a_{i,i}}`, `V1 = {a_{i,i+1}}` in
/// bottom-to-top order: `a_{0,0}, a_{0,1}, a_{1,1}, ..., a_{m,m}`.
fn vertical_pair_cells(m: usize) -> Vec<(usize, usize)> {
    let mut cells = Vec::with_capacity(2 * m + 1);
    for i in 0..=m {
        cells.push((i, i));
        if i < m {
            cells.push((i, i + 1));
        }
    }
    cells
}

fn direct_form(t: &TransitionKernel, p: &ProbVector, m: usize) -> FiniteDistribution {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let leaf = || Node::Leaf(p.entries().to_vec());
    for j in 0..=m {
        index.insert((0, j), nodes.len());
        nodes.push(leaf());
    }
    for i in 1..=m {
        index.insert((i, 0), nodes.len());
        nodes.push(leaf());
        for j in 1..=m {
            let ps = [index[&(i, j - 1)], index[&(i - 1, j - 1)], index[&(i - 1, j)]];
            index.insert((i, j), nodes.len());
            nodes.push(Node::Cell(t, ps));
        }
    }
    let keep: Vec<usize> = vertical_pair_cells(m).iter().map(|c| index[c]).collect();
    eliminate(t.n(), &nodes, &keep)
}

fn flipped_form(t_r: &TransitionKernel, p: &ProbVector, m: usize) -> FiniteDistribution {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut nodes = Vec::new();
    let leaf = || Node::Leaf(p.entries().to_vec());
    for i in 0..=m {
        index.insert((i, 0), nodes.len());
        nodes.push(leaf());
    }
    for j in 1..=m {
        index.insert((m, j), nodes.len());
        nodes.push(leaf());
        for i in (j - 1..m).rev() {
            let ps = [index[&(i + 1, j)], index[&(i + 1, j - 1)], index[&(i, j - 1)]];
            index.insert((i, j), nodes.len());
            nodes.push(Node::Cell(t_r, ps));
        }
    }
    let keep: Vec<usize> = vertical_pair_cells(m).iter().map(|c| index[c]).collect();
    eliminate(t_r.n(), &nodes, &keep)
}

/// The two evaluations of the rotated law agree; either may be used.
#[derive(Clone, Debug)]
pub struct RotatedMarginal {
    pub distribution: FiniteDistribution,
    pub reverse: TransitionKernel,
}

/// Law of `2m+1` consecutive zigzag sites under `μ = (π_p)_r`, the invariant
/// measure of the `r`-reverse.
///
/// In `G(A, π_p)` these are the vertical lines `V0, V1`. The law is computed
/// by summing the diamond product over the hidden cells with `T`, and again
/// over the flipped diamond with `T_r`; disagreement is reported as an error.
/// Keys list `a_{0,0}, a_{0,1}, a_{1,1}, ..., a_{m,m}`.
pub fn rotated_marginal(t: &TransitionKernel, p: &ProbVector, m: usize) -> Result<RotatedMarginal> {
    let t_r = reverse_kernel(t, p, DihedralElement::R)?;
    let direct = direct_form(t, p, m);
    let flipped = flipped_form(&t_r, p, m);
    if direct != flipped {
        return Err(Error::InternalDisagreement);
    }
    Ok(RotatedMarginal { distribution: direct, reverse: t_r })
}

/// Law of the two seed rows of a window.
#[derive(Clone, Copy, Debug)]
pub enum ZigzagLaw<'a> {
    Product(&'a ProbVector),
    Markov(&'a HzmcSpec),
}

/// Exact joint law of `cells` (lattice points `(i,t)` with `i+t` even) in the
/// diagram whose rows `base` and `base+1`, read as a horizontal zigzag, follow
/// `law`.
///
/// When `law` is invariant for `t` this is a marginal of the stationary
/// diagram.
pub fn window_marginal(
    t: &TransitionKernel,
    law: ZigzagLaw<'_>,
    base: i64,
    cells: &[(i64, i64)],
) -> Result<FiniteDistribution> {
    let n = t.n();
    let law_n = match law {
        ZigzagLaw::Product(p) => p.n(),
        ZigzagLaw::Markov(s) => s.n(),
    };
    if law_n != n {
        return Err(Error::AlphabetMismatch(law_n, n));
    }
    if cells.is_empty() {
        return Err(Error::Invalid("no cells requested".into()));
    }
    for &(i, tt) in cells {
        if (i + tt).rem_euclid(2) != 0 || tt < base {
            return Err(Error::Invalid(format!("cell ({i},{tt}) is off the lattice or below the base rows")));
        }
    }
    let mut closure: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut stack: Vec<(i64, i64)> = cells.to_vec();
    while let Some((i, tt)) = stack.pop() {
        if closure.insert((i, tt)) && tt >= base + 2 {
            stack.extend([(i - 1, tt - 1), (i, tt - 2), (i + 1, tt - 1)]);
        }
    }
    let (imin, imax) = closure
        .iter()
        .filter(|c| c.1 <= base + 1)
        .fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c.0), hi.max(c.0)));
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut nodes: Vec<Node<'_>> = Vec::new();
    let seed_row = |i: i64| if (i + base).rem_euclid(2) == 0 { base } else { base + 1 };
    for i in imin..=imax {
        let here = (i, seed_row(i));
        let node = match law {
            ZigzagLaw::Product(p) => Node::Leaf(p.entries().to_vec()),
            ZigzagLaw::Markov(s) => {
                if i == imin {
                    Node::Leaf(s.rho().entries().to_vec())
                } else {
                    let prev = index[&(i - 1, seed_row(i - 1))];
                    if here.1 > seed_row(i - 1) {
                        Node::Chain(prev, s.f())
                    } else {
                        Node::Chain(prev, s.b())
                    }
                }
            }
        };
        index.insert(here, nodes.len());
        nodes.push(node);
    }
    let mut upper: Vec<(i64, i64)> = closure.iter().copied().filter(|c| c.1 >= base + 2).collect();
    upper.sort_by_key(|&(i, tt)| (tt, i));
    for (i, tt) in upper {
        let ps = [index[&(i - 1, tt - 1)], index[&(i, tt - 2)], index[&(i + 1, tt - 1)]];
        index.insert((i, tt), nodes.len());
        nodes.push(Node::Cell(t, ps));
    }
    let mut keep = Vec::with_capacity(cells.len());
    for c in cells {
        let v = index[c];
        if keep.contains(&v) {
            return Err(Error::Invalid(format!("cell {c:?} requested twice")));
        }
        keep.push(v);
    }
    Ok(eliminate(n, &nodes, &keep))
}

/// Cells of the horizontal zigzag of half-width `k` on rows `t-1` (odd sites)
/// and `t` (even sites), listed left to right.
pub fn horizontal_zigzag(k: usize, t: i64) -> Vec<(i64, i64)> {
    let k = k as i64;
    let mut cells = Vec::new();
    for i in -2 * k..=2 * k {
        let row = if (i + t).rem_euclid(2) == 0 { t } else { t - 1 };
        cells.push((i, row));
    }
    cells
}

/// One-step pushforward of the product law on a zigzag: rows 0 and 1 are
/// i.i.d. `p`, and the result is the law of the zigzag on rows 1 and 2 of
/// half-width `k` (`4k+1` cells).
pub fn zigzag_pushforward(t: &TransitionKernel, p: &ProbVector, k: usize) -> Result<FiniteDistribution> {
    window_marginal(t, ZigzagLaw::Product(p), 0, &horizontal_zigzag(k, 2))
}

/// A path `(i, t_i)` on the even lattice with `i` increasing by one and
/// `|t_{i+1} - t_i| = 1` at every step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigzagPolyline {
    points: Vec<(i64, i64)>,
}

impl ZigzagPolyline {
    pub fn new(points: Vec<(i64, i64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidPolyline("no points".into()));
        }
        if (points[0].0 + points[0].1).rem_euclid(2) != 0 {
            return Err(Error::InvalidPolyline(format!("{:?} is not on the even lattice", points[0])));
        }
        for w in points.windows(2) {
            if w[1].0 != w[0].0 + 1 || (w[1].1 - w[0].1).abs() != 1 {
                return Err(Error::InvalidPolyline(format!("step {:?} -> {:?}", w[0], w[1])));
            }
        }
        Ok(ZigzagPolyline { points })
    }

    /// Polyline through `(i0, t0)` following the given up (`true`) and down
    /// steps.
    pub fn from_steps(i0: i64, t0: i64, ups: &[bool]) -> Result<Self> {
        let mut pts = vec![(i0, t0)];
        for &up in ups {
            let (i, t) = *pts.last().unwrap();
            pts.push((i + 1, if up { t + 1 } else { t - 1 }));
        }
        ZigzagPolyline::new(pts)
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Probability that the stationary HZMC diagram takes `values` along the
/// polyline: `ρ(a_0)` times `F` on up-steps and `B` on down-steps.
pub fn hzmc_polyline_probability(spec: &HzmcSpec, polyline: &ZigzagPolyline, values: &[usize]) -> Result<Scalar> {
    if values.len() != polyline.len() {
        return Err(Error::InvalidPolyline(format!("{} values for {} points", values.len(), polyline.len())));
    }
    if values.iter().any(|&x| x >= spec.n()) {
        return Err(Error::Invalid("value outside the alphabet".into()));
    }
    let mut w = spec.rho().get(values[0]).clone();
    for (k, pts) in polyline.points.windows(2).enumerate() {
        let m = if pts[1].1 > pts[0].1 { spec.f() } else { spec.b() };
        w *= m.get(values[k], values[k + 1]);
    }
    Ok(w)
}
