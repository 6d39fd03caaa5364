use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::window::SpaceTimeWindow;
use crate::error::{Error, Result};
use crate::marginals::ZigzagPolyline;
use crate::primitives::prob::ProbVector;

/// A discrete line of lattice sites, clipped to each window.
#[derive(Clone, Debug)]
pub enum LineSpec {
    /// Row `t`: sites `(i, t)` with `i + t` even.
    Horizontal(usize),
    /// Sites `(i, t)` of the given polyline.
    Zigzag(ZigzagPolyline),
    /// Sites `origin + k·(dx, dy)`, `k >= 0`; `dx + dy` must be even.
    Sloped { dx: i64, dy: i64, origin: (i64, i64) },
    /// Column `i`: sites `(i, t)` with `i + t` even.
    Vertical(usize),
}

impl LineSpec {
    /// Sites of the line inside the window, in order along the line.
    pub fn sites(&self, win: &SpaceTimeWindow) -> Result<Vec<(usize, usize)>> {
        let (w, h) = (win.width() as i64, win.height() as i64);
        let inside = |i: i64, t: i64| i >= 0 && t >= 0 && i < w && t < h;
        let on_lattice = |i: i64, t: i64| (i + t).rem_euclid(2) == 0;
        let pts: Vec<(i64, i64)> = match self {
            LineSpec::Horizontal(t) => {
                let t = *t as i64;
                (0..w).filter(|&i| on_lattice(i, t)).map(|i| (i, t)).collect()
            }
            LineSpec::Vertical(i) => {
                let i = *i as i64;
                (0..h).filter(|&t| on_lattice(i, t)).map(|t| (i, t)).collect()
            }
            LineSpec::Zigzag(poly) => poly.points().to_vec(),
            LineSpec::Sloped { dx, dy, origin } => {
                if (dx + dy).rem_euclid(2) != 0 || (*dx == 0 && *dy == 0) || !on_lattice(origin.0, origin.1) {
                    return Err(Error::Invalid("sloped line must stay on the even lattice".into()));
                }
                let mut out = Vec::new();
                let (mut i, mut t) = *origin;
                while inside(i, t) {
                    out.push((i, t));
                    i += dx;
                    t += dy;
                }
                out
            }
        };
        Ok(pts.into_iter().filter(|&(i, t)| inside(i, t)).map(|(i, t)| (i as usize, t as usize)).collect())
    }
}

/// Chi-square statistics for one line.
#[derive(Clone, Debug)]
pub struct LineTestReport {
    pub sites: usize,
    pub gof_statistic: f64,
    pub gof_df: usize,
    pub gof_p_value: f64,
    pub pairs: usize,
    pub independence_statistic: f64,
    pub independence_df: usize,
    pub independence_p_value: f64,
    /// Per-test level after any multiple-testing correction.
    pub level: f64,
}

impl LineTestReport {
    pub fn passed(&self) -> bool {
        self.gof_p_value > self.level && self.independence_p_value > self.level
    }
}

fn chi2_sf(stat: f64, df: usize) -> f64 {
    ChiSquared::new(df as f64).expect("positive degrees of freedom").sf(stat)
}

/// Single-site goodness of fit against `p` and an independence test on
/// disjoint consecutive pairs `(s_0,s_1), (s_2,s_3), ...` of the line, pooled
/// over `windows`. Both tests are run at level `significance / 2`.
pub fn line_iid_test(
    windows: &[SpaceTimeWindow],
    line: &LineSpec,
    p: &ProbVector,
    significance: f64,
) -> Result<LineTestReport> {
    let n = p.n();
    let probs = p.to_f64();
    let mut counts = vec![0u64; n];
    let mut table = vec![vec![0u64; n]; n];
    for win in windows {
        if win.n() != n {
            return Err(Error::AlphabetMismatch(win.n(), n));
        }
        let vals: Vec<usize> = line
            .sites(win)?
            .into_iter()
            .map(|(i, t)| win.get(i, t).ok_or_else(|| Error::Invalid(format!("site ({i},{t}) is empty"))))
            .collect::<Result<_>>()?;
        for &v in &vals {
            counts[v] += 1;
        }
        for pair in vals.chunks_exact(2) {
            table[pair[0]][pair[1]] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let pairs: u64 = table.iter().flatten().sum();
    let min_expected = probs.iter().fold(f64::INFINITY, |m, &x| m.min(x * total as f64));
    if total == 0 || min_expected < 5.0 {
        return Err(Error::InsufficientSamples(format!("{total} sites, smallest expected count {min_expected:.2}")));
    }
    let gof: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&o, &q)| {
            let e = q * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();

    let rows: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols: Vec<f64> = (0..n).map(|j| table.iter().map(|r| r[j]).sum::<u64>() as f64).collect();
    let mut indep = 0.0;
    for i in 0..n {
        for j in 0..n {
            let e = rows[i] * cols[j] / pairs as f64;
            if e < 5.0 {
                return Err(Error::InsufficientSamples(format!("pair cell ({i},{j}) expects {e:.2}")));
            }
            indep += (table[i][j] as f64 - e).powi(2) / e;
        }
    }
    let level = significance / 2.0;
    Ok(LineTestReport {
        sites: total as usize,
        gof_statistic: gof,
        gof_df: n - 1,
        gof_p_value: chi2_sf(gof, n - 1),
        pairs: pairs as usize,
        independence_statistic: indep,
        independence_df: (n - 1) * (n - 1),
        independence_p_value: chi2_sf(indep, (n - 1) * (n - 1)),
        level,
    })
}

/// Runs every line with a Bonferroni correction: each of the `2·lines.len()`
/// tests is held to `significance / (2·lines.len())`.
pub fn line_iid_tests(
    windows: &[SpaceTimeWindow],
    lines: &[LineSpec],
    p: &ProbVector,
    significance: f64,
) -> Result<Vec<LineTestReport>> {
    let per_line = significance / lines.len().max(1) as f64;
    lines.iter().map(|l| line_iid_test(windows, l, p, per_line)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_sites_are_clipped() {
        let win = SpaceTimeWindow::from_rows(2, &vec![vec![0; 6]; 5]).unwrap();
        assert_eq!(LineSpec::Horizontal(1).sites(&win).unwrap(), vec![(1, 1), (3, 1), (5, 1)]);
        assert_eq!(LineSpec::Vertical(0).sites(&win).unwrap(), vec![(0, 0), (0, 2), (0, 4)]);
        let diag = LineSpec::Sloped { dx: 1, dy: 1, origin: (2, 0) };
        assert_eq!(diag.sites(&win).unwrap(), vec![(2, 0), (3, 1), (4, 2), (5, 3)]);
        assert!(LineSpec::Sloped { dx: 1, dy: 0, origin: (0, 0) }.sites(&win).is_err());
    }

    #[test]
    fn too_few_sites() {
        let win = SpaceTimeWindow::from_rows(2, &vec![vec![0; 4]; 4]).unwrap();
        let err = line_iid_test(&[win], &LineSpec::Horizontal(0), &ProbVector::uniform(2), 0.01).unwrap_err();
        assert!(matches!(err, Error::InsufficientSamples(_)));
    }
}
