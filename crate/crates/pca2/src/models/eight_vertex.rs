//! The 8-vertex model through its face-coloring PCA.
//!
//! Faces of the diamond graph sit on the even lattice of a space-time window
//! and vertices on the odd one. The vertex at `(i,t)` is surrounded by the
//! faces `W = (i-1,t)`, `S = (i,t-1)`, `E = (i+1,t)` and `N = (i,t+1)`, and the
//! coloring PCA draws `N` from `T(W,S,E;·)`. An edge is oriented upwards
//! (`o = 1`) exactly when its two faces have the same color.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::invariance::{check_condition, ConditionId};
use crate::primitives::kernel::TransitionKernel;
use crate::primitives::prob::ProbVector;
use crate::primitives::scalar::Scalar;
use crate::simulator::SpaceTimeWindow;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWeights {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl VertexWeights {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self> {
        if [&a, &b, &c, &d].iter().any(|w| **w <= Scalar::zero()) {
            return Err(Error::ParamOutOfRange("vertex weights must be positive".into()));
        }
        Ok(VertexWeights { a, b, c, d })
    }

    pub fn satisfies_constraint(&self) -> bool {
        &self.a + &self.c == &self.b + &self.d
    }
}

/// The binary kernel with `T(0,0,1;·) = T(1,0,0;·) = B(q)`,
/// `T(0,1,1;·) = T(1,1,0;·) = B(1-q)`, `T(0,1,0;·) = T(1,1,1;·) = B(r)` and
/// `T(1,0,1;·) = T(0,0,0;·) = B(1-r)`, where `B(x)` puts mass `x` on 1.
pub fn eight_vertex_kernel_qr(q: &Scalar, r: &Scalar) -> Result<TransitionKernel> {
    for x in [q, r] {
        if *x < Scalar::zero() || *x > Scalar::one() {
            return Err(Error::ParamOutOfRange("q and r must lie in [0,1]".into()));
        }
    }
    let one = Scalar::one();
    TransitionKernel::from_fn(2, |a, b, c, d| {
        let ones = match (a, b, c) {
            (0, 0, 1) | (1, 0, 0) => q.clone(),
            (0, 1, 1) | (1, 1, 0) => &one - q,
            (0, 1, 0) | (1, 1, 1) => r.clone(),
            _ => &one - r,
        };
        if d == 1 {
            ones
        } else {
            &one - ones
        }
    })
}

/// Kernel of the weights `(a,b,c,d)` with `a+c = b+d`, and its parameters
/// `q = a/(a+c)`, `r = b/(b+d)`.
pub fn eight_vertex_kernel(w: &VertexWeights) -> Result<(TransitionKernel, Scalar, Scalar)> {
    if !w.satisfies_constraint() {
        return Err(Error::ConstraintViolated);
    }
    let q = &w.a / (&w.a + &w.c);
    let r = &w.b / (&w.b + &w.d);
    let t = eight_vertex_kernel_qr(&q, &r)?;
    if let Some(wit) = check_condition(&t, &ProbVector::uniform(2), ConditionId::Hzpm)? {
        return Err(Error::Invalid(format!("8-vertex kernel is not uniform-invariant: {wit}")));
    }
    Ok((t, q, r))
}

/// Weight class of a vertex, from its edges `(SW, SE, NW, NE)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexClass {
    A,
    B,
    C,
    D,
}

impl VertexClass {
    pub fn of(sw: u8, se: u8, nw: u8, ne: u8) -> Option<VertexClass> {
        if (sw + se + nw + ne) % 2 == 1 {
            return None;
        }
        Some(match (sw == se, nw == se) {
            (false, true) => VertexClass::A,
            (false, false) => VertexClass::C,
            (true, true) => VertexClass::B,
            (true, false) => VertexClass::D,
        })
    }
}

/// Edge orientations of the window's diamond graph, stored by the lower
/// endpoint of each edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientationField {
    width: usize,
    height: usize,
    ne: Vec<Option<u8>>,
    nw: Vec<Option<u8>>,
}

impl OrientationField {
    /// Edge from vertex `(i,t)` to `(i+1,t+1)`.
    pub fn ne(&self, i: usize, t: usize) -> Option<u8> {
        self.ne.get(t * self.width + i).copied().flatten()
    }

    /// Edge from vertex `(i,t)` to `(i-1,t+1)`.
    pub fn nw(&self, i: usize, t: usize) -> Option<u8> {
        self.nw.get(t * self.width + i).copied().flatten()
    }

    pub fn edges(&self) -> impl Iterator<Item = u8> + '_ {
        self.ne.iter().chain(&self.nw).flatten().copied()
    }

    /// `(SW, SE, NW, NE)` around the vertex `(i,t)`, if all four exist.
    pub fn vertex(&self, i: usize, t: usize) -> Option<[u8; 4]> {
        if i == 0 || t == 0 {
            return None;
        }
        Some([self.ne(i - 1, t - 1)?, self.nw(i + 1, t - 1)?, self.nw(i, t)?, self.ne(i, t)?])
    }

    /// Lines `i<TAB>t<TAB>dir<TAB>o` for every edge, by lower endpoint.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for t in 0..self.height {
            for i in 0..self.width {
                if let Some(o) = self.ne(i, t) {
                    s.push_str(&format!("{i}\t{t}\tNE\t{o}\n"));
                }
                if let Some(o) = self.nw(i, t) {
                    s.push_str(&format!("{i}\t{t}\tNW\t{o}\n"));
                }
            }
        }
        s
    }
}

/// Counts of the eight admissible vertex configurations `(SW,SE,NW,NE)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexHistogram {
    counts: std::collections::BTreeMap<[u8; 4], u64>,
}

impl VertexHistogram {
    pub fn count(&self, config: [u8; 4]) -> u64 {
        self.counts.get(&config).copied().unwrap_or(0)
    }

    pub fn class_count(&self, class: VertexClass) -> u64 {
        self.counts
            .iter()
            .filter(|(k, _)| VertexClass::of(k[0], k[1], k[2], k[3]) == Some(class))
            .map(|(_, v)| v)
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8; 4], &u64)> {
        self.counts.iter()
    }
}

/// Orientation induced by a binary face coloring and the histogram of its
/// interior vertex configurations.
///
/// Every interior vertex has an even number of incoming edges; a violation is
/// a bug and panics.
pub fn coloring_to_orientation(win: &SpaceTimeWindow) -> Result<(OrientationField, VertexHistogram)> {
    if win.n() != 2 {
        return Err(Error::AlphabetMismatch(win.n(), 2));
    }
    let (w, h) = (win.width(), win.height());
    let same = |f: Option<usize>, g: Option<usize>| Some(u8::from(f? == g?));
    let mut ne = vec![None; w * h];
    let mut nw = vec![None; w * h];
    for t in 0..h {
        for i in 0..w {
            if SpaceTimeWindow::is_site(i, t) {
                continue;
            }
            let north = win.get(i, t + 1);
            ne[t * w + i] = same(win.get(i + 1, t), north);
            nw[t * w + i] = if i > 0 { same(win.get(i - 1, t), north) } else { None };
        }
    }
    let field = OrientationField { width: w, height: h, ne, nw };
    let mut hist = VertexHistogram::default();
    for t in 1..h {
        for i in 1..w {
            if SpaceTimeWindow::is_site(i, t) {
                continue;
            }
            if let Some(cfg) = field.vertex(i, t) {
                let incoming = cfg[0] + cfg[1] + (1 - cfg[2]) + (1 - cfg[3]);
                assert!(incoming % 2 == 0, "vertex ({i},{t}) has {incoming} incoming edges");
                *hist.counts.entry(cfg).or_insert(0) += 1;
            }
        }
    }
    Ok((field, hist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::scalar::{int, rat};

    #[test]
    fn weights_to_parameters() {
        let w = VertexWeights::new(int(9), int(2), int(1), int(8)).unwrap();
        let (_, q, r) = eight_vertex_kernel(&w).unwrap();
        assert_eq!((q, r), (rat(9, 10), rat(1, 5)));
        let bad = VertexWeights::new(int(9), int(1), int(1), int(4)).unwrap();
        assert_eq!(eight_vertex_kernel(&bad).unwrap_err(), Error::ConstraintViolated);
    }

    #[test]
    fn symmetric_weights_give_uniform_kernel() {
        let w = VertexWeights::new(int(3), int(3), int(3), int(3)).unwrap();
        let (t, q, r) = eight_vertex_kernel(&w).unwrap();
        assert_eq!((q, r), (rat(1, 2), rat(1, 2)));
        assert_eq!(t, TransitionKernel::constant(&ProbVector::uniform(2)));
    }

    #[test]
    fn constant_and_striped_colorings() {
        let ones = SpaceTimeWindow::from_rows(2, &vec![vec![1; 8]; 6]).unwrap();
        let (f, hist) = coloring_to_orientation(&ones).unwrap();
        assert!(f.edges().all(|o| o == 1));
        assert_eq!(hist.class_count(VertexClass::B), hist.total());
        let rows: Vec<Vec<usize>> = (0..6).map(|t| vec![t % 2; 8]).collect();
        let striped = SpaceTimeWindow::from_rows(2, &rows).unwrap();
        let (f, _) = coloring_to_orientation(&striped).unwrap();
        assert!(f.edges().count() > 0 && f.edges().all(|o| o == 0));
    }
}
