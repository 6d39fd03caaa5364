use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The eight symmetries of the square, acting on the stencil
/// `(a,b,c;d) = (west, south, east; north)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DihedralElement {
    Id,
    R,
    R2,
    R3,
    V,
    H,
    RV,
    R3V,
}

use DihedralElement::*;

impl DihedralElement {
    pub const ALL: [DihedralElement; 8] = [Id, R, R2, R3, V, H, RV, R3V];

    /// `σ_g(x)[k] = x[perm[k]]`, e.g. `σ_r(a,b,c,d) = (d,a,b,c)`.
    pub fn perm(self) -> [usize; 4] {
        match self {
            Id => [0, 1, 2, 3],
            R => [3, 0, 1, 2],
            R2 => [2, 3, 0, 1],
            R3 => [1, 2, 3, 0],
            V => [2, 1, 0, 3],
            H => [0, 3, 2, 1],
            RV => [3, 2, 1, 0],
            R3V => [1, 0, 3, 2],
        }
    }

    pub fn apply<T: Copy>(self, x: [T; 4]) -> [T; 4] {
        let p = self.perm();
        [x[p[0]], x[p[1]], x[p[2]], x[p[3]]]
    }

    fn from_perm(p: [usize; 4]) -> DihedralElement {
        *Self::ALL.iter().find(|g| g.perm() == p).expect("closed under composition")
    }

    /// `self ∘ other`, so that `σ_{g∘h} = σ_g ∘ σ_h`.
    pub fn compose(self, other: DihedralElement) -> DihedralElement {
        let (g, h) = (self.perm(), other.perm());
        Self::from_perm([h[g[0]], h[g[1]], h[g[2]], h[g[3]]])
    }

    pub fn inverse(self) -> DihedralElement {
        *Self::ALL.iter().find(|&&h| self.compose(h) == Id).unwrap()
    }

    /// Position (in `(a,b,c,d)`) of the symbol that becomes the output of the
    /// transformed stencil.
    pub fn output_source(self) -> usize {
        self.perm()[3]
    }

    pub fn name(self) -> &'static str {
        match self {
            Id => "id",
            R => "r",
            R2 => "r2",
            R3 => "r3",
            V => "v",
            H => "h",
            RV => "rv",
            R3V => "r3v",
        }
    }

    /// Smallest subgroup containing `gens`.
    pub fn closure(gens: &[DihedralElement]) -> Vec<DihedralElement> {
        let mut set = vec![Id];
        let mut frontier: Vec<DihedralElement> = gens.to_vec();
        while let Some(g) = frontier.pop() {
            if set.contains(&g) {
                continue;
            }
            set.push(g);
            for &h in set.clone().iter() {
                frontier.push(g.compose(h));
                frontier.push(h.compose(g));
            }
        }
        set.sort();
        set
    }
}

impl fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DihedralElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .iter()
            .copied()
            .find(|g| g.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown group element {s:?}")))
    }
}
