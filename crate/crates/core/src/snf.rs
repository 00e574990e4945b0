//! Smith normal form of integer matrices by fraction-free row and column
//! operations, pivoting on +-1 entries first to keep coefficients small.

use num::{BigInt, One, Signed, Zero};

/// Rank and the nonzero diagonal of the Smith form. The divisors form a
/// divisibility chain `d_0 | d_1 | ...` and are all positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub rank: usize,
    pub divisors: Vec<BigInt>,
}

impl SnfResult {
    /// Divisors greater than one, i.e. the torsion part.
    pub fn nontrivial_divisors(&self) -> Vec<BigInt> {
        self.divisors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

/// Computes the Smith normal form of a sparse integer matrix given as
/// `(row, col, value)` triplets. Duplicate positions are summed.
pub fn smith_normal_form(
    rows: usize,
    cols: usize,
    entries: impl IntoIterator<Item = (usize, usize, BigInt)>,
) -> SnfResult {
    let mut m = vec![vec![BigInt::zero(); cols]; rows];
    for (r, c, v) in entries {
        m[r][c] += v;
    }
    snf_in_place(&mut m)
}

fn snf_in_place(m: &mut [Vec<BigInt>]) -> SnfResult {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut divisors: Vec<BigInt> = Vec::new();

    'pivots: for k in 0..rows.min(cols) {
        loop {
            if !move_pivot(m, k) {
                break 'pivots;
            }
            clear_cross(m, k);
            // Divisibility fix: fold a row with a non-divisible entry into
            // row k and redo. The pivot strictly shrinks, so this terminates.
            match find_nondivisible(m, k) {
                Some(i) => {
                    for j in k..cols {
                        let add = m[i][j].clone();
                        m[k][j] += add;
                    }
                }
                None => break,
            }
        }
        if m[k][k].is_negative() {
            m[k][k] = -m[k][k].clone();
        }
        divisors.push(m[k][k].clone());
    }

    debug_assert!(divisors.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
    SnfResult {
        rank: divisors.len(),
        divisors,
    }
}

/// Zeroes out column k below the pivot and row k right of the pivot,
/// re-pivoting on remainders until both are clean.
fn clear_cross(m: &mut [Vec<BigInt>], k: usize) {
    let rows = m.len();
    let cols = m[0].len();
    loop {
        let mut dirty = false;
        for i in k + 1..rows {
            if m[i][k].is_zero() {
                continue;
            }
            let q = div_round(&m[i][k], &m[k][k]);
            if !q.is_zero() {
                for j in k..cols {
                    let sub = &q * &m[k][j];
                    m[i][j] -= sub;
                }
            }
            if !m[i][k].is_zero() {
                // Remainder is smaller than the pivot; promote it.
                m.swap(i, k);
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        for j in k + 1..cols {
            if m[k][j].is_zero() {
                continue;
            }
            let q = div_round(&m[k][j], &m[k][k]);
            if !q.is_zero() {
                for row in m.iter_mut().skip(k) {
                    let sub = &q * &row[k];
                    row[j] -= sub;
                }
            }
            if !m[k][j].is_zero() {
                for row in m.iter_mut() {
                    row.swap(j, k);
                }
                dirty = true;
            }
        }
        if !dirty {
            return;
        }
    }
}

/// Moves the best pivot of the trailing submatrix to `(k, k)`.
/// Prefers entries of absolute value one. Returns false if the submatrix
/// is zero.
fn move_pivot(m: &mut [Vec<BigInt>], k: usize) -> bool {
    let rows = m.len();
    let cols = m[0].len();
    let mut best: Option<(usize, usize)> = None;
    'search: for i in k..rows {
        for j in k..cols {
            if m[i][j].is_zero() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bi, bj)) => m[i][j].abs() < m[*bi][*bj].abs(),
            };
            if better {
                best = Some((i, j));
                if m[i][j].abs().is_one() {
                    break 'search;
                }
            }
        }
    }
    match best {
        None => false,
        Some((i, j)) => {
            m.swap(i, k);
            if j != k {
                for row in m.iter_mut() {
                    row.swap(j, k);
                }
            }
            true
        }
    }
}

fn find_nondivisible(m: &[Vec<BigInt>], k: usize) -> Option<usize> {
    let d = &m[k][k];
    if d.abs().is_one() {
        return None;
    }
    for (i, row) in m.iter().enumerate().skip(k + 1) {
        for v in row.iter().skip(k + 1) {
            if !(v % d).is_zero() {
                return Some(i);
            }
        }
    }
    None
}

/// Round-to-nearest quotient; keeps remainders at most half the divisor.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num::Integer::div_rem(a, b);
    if (&r * &two).abs() > b.abs() {
        if r.is_negative() == b.is_negative() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}
