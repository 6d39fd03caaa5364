//! Exact Gaussian elimination over the rationals, plus a modular rank used
//! for large constraint systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::scalar::Scalar;

pub type Mat = Vec<Vec<Scalar>>;

/// Reduces `m` to reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Scalar::one() / &m[r][c];
        for x in m[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : A x = 0}` where `A` has `ncols` columns.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let is_pivot: Vec<bool> = (0..ncols).map(|c| pivots.contains(&c)).collect();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Solves `A x = b`, returning one particular solution if consistent.
pub fn solve(rows: &[Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m: Mat = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = m[r][ncols].clone();
    }
    Some(x)
}

/// Basis of the left eigenspace `{x : x M = x}` of a square matrix.
pub fn left_fixed_space(m: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let n = m.len();
    let rows: Mat = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let mut v = m[i][j].clone();
                    if i == j {
                        v -= Scalar::one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    nullspace(&rows, n)
}

pub fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Mat {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = Scalar::zero();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            s += &a[i][l] * &b[l][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn reduce(x: &Scalar) -> u64 {
    let p = BigInt::from(PRIME);
    let n = x.numer().mod_floor(&p).to_u64().unwrap();
    let d = x.denom().mod_floor(&p).to_u64().unwrap();
    mulmod(n, powmod(d, PRIME - 2))
}

/// Rank modulo the Mersenne prime 2^61-1. Never exceeds the rational rank and
/// agrees with it unless the prime divides some minor.
pub fn rank_mod_prime(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(reduce).collect()).collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = powmod(m[r][c], PRIME - 2);
        for x in m[r].iter_mut() {
            *x = mulmod(*x, inv);
        }
        let pivot = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&pivot) {
                if y != 0 {
                    *x = (*x + PRIME - mulmod(f, y)) % PRIME;
                }
            }
        }
        r += 1;
    }
    r
}


/// Fills a table on `S^k` (`S = {0,..,n-1}`, `s = n-1`) whose sums along
/// every coordinate flagged in `summed` vanish, from arbitrary values on the
/// sub-box where those coordinates avoid `s`.
///
/// For `x` with `s` in the summed positions `K`, the value is
/// `(-1)^{|K|} Σ_y free(y)` over all `y` agreeing with `x` off `K` and
/// ranging over `{0,..,s-1}` on `K`. This is the general solution of the
/// zero-sum constraints.
pub fn zero_sum_completion(n: usize, summed: &[bool], free: impl Fn(&[usize]) -> Scalar) -> Vec<Scalar> {
    use super::kernel::tuples;
    let k = summed.len();
    let s = n - 1;
    let mut out = Vec::with_capacity(n.pow(k as u32));
    for x in tuples(n, k) {
        let hot: Vec<usize> = (0..k).filter(|&i| summed[i] && x[i] == s).collect();
        let mut total = Scalar::zero();
        for fill in tuples(s, hot.len()) {
            let mut y = x.clone();
            for (pos, v) in hot.iter().zip(&fill) {
                y[*pos] = *v;
            }
            total += free(&y);
        }
        if hot.len() % 2 == 1 {
            total = -total;
        }
        out.push(total);
    }
    out
}
