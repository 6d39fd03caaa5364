use std::io::Write;
use std::path::Path;

use super::window::SpaceTimeWindow;
use crate::error::{Error, Result};

/// Binary PGM bytes, one pixel per cell, time running upwards.
///
/// State `s` maps to gray `floor(255·s/(n−1))`; sites off the lattice take
/// the mean of their horizontal neighbours.
pub fn render_pgm(win: &SpaceTimeWindow) -> Result<Vec<u8>> {
    let n = win.n();
    if n > 256 {
        return Err(Error::Invalid("at most 256 states can be rendered".into()));
    }
    let (w, h) = (win.width(), win.height());
    let gray = |s: usize| (255 * s / (n - 1)) as u8;
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for t in (0..h).rev() {
        for i in 0..w {
            let px = match win.get(i, t) {
                Some(s) => gray(s),
                None => {
                    let nb: Vec<u32> = [i.checked_sub(1), Some(i + 1)]
                        .into_iter()
                        .flatten()
                        .filter_map(|j| win.get(j, t))
                        .map(|s| gray(s) as u32)
                        .collect();
                    if nb.is_empty() {
                        0
                    } else {
                        (nb.iter().sum::<u32>() / nb.len() as u32) as u8
                    }
                }
            };
            out.push(px);
        }
    }
    Ok(out)
}

pub fn write_pgm(win: &SpaceTimeWindow, path: &Path) -> Result<()> {
    let bytes = render_pgm(win)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let win = SpaceTimeWindow::from_rows(2, &[vec![0, 9], vec![9, 1]]).unwrap();
        let bytes = render_pgm(&win).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        // Top row is t = 1: (0,1) copies its neighbour (1,1).
        assert_eq!(&bytes[header.len()..], &[255, 255, 0, 0]);
    }
}
