//! Small dense exact linear algebra over fields: reduced row echelon form,
//! nullspace bases and multi-column solves. Used for the pieces of the
//! induced-map machinery that need explicit vectors rather than ranks.

use crate::error::{Error, Result};
use crate::ring::RingOps;

pub struct DenseMat<R: RingOps> {
    pub ring: R,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<R::Elem>,
}

impl<R: RingOps> DenseMat<R> {
    pub fn zeros(ring: R, rows: usize, cols: usize) -> Self {
        let data = vec![ring.zero(); rows * cols];
        DenseMat {
            ring,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &R::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: R::Elem) {
        self.data[r * self.cols + c] = v;
    }

    /// In-place reduced row echelon form; returns the pivot column list.
    pub fn rref(&mut self) -> Vec<usize> {
        let ring = self.ring.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !ring.is_zero(self.at(r, col))) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = ring
                .inv(self.at(row, col))
                .expect("field element is invertible");
            for c in col..self.cols {
                let v = ring.mul(self.at(row, c), &inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !ring.is_zero(self.at(r, col)) {
                    let f = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = ring.sub(self.at(r, c), &ring.mul(&f, self.at(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of the right nullspace, one vector per free column.
    pub fn nullspace(mut self) -> Vec<Vec<R::Elem>> {
        let ring = self.ring.clone();
        let pivots = self.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut vec = vec![ring.zero(); self.cols];
            vec[free] = ring.one();
            for (r, &c) in pivots.iter().enumerate() {
                vec[c] = ring.neg(self.at(r, free));
            }
            basis.push(vec);
        }
        basis
    }
}

/// Solves `M x = rhs` for each right-hand side, where the columns of `M`
/// are given sparsely over `dim` rows. Fails if any system is inconsistent.
pub fn solve_sparse_columns<R: RingOps>(
    ring: &R,
    dim: usize,
    columns: &[Vec<(u64, R::Elem)>],
    rhs: &[Vec<(u64, R::Elem)>],
) -> Result<Vec<Vec<R::Elem>>> {
    // Compress to the rows actually used.
    let mut used: Vec<u64> = columns
        .iter()
        .chain(rhs.iter())
        .flat_map(|col| col.iter().map(|(r, _)| *r))
        .collect();
    used.sort_unstable();
    used.dedup();
    let row_slot = |r: u64| used.binary_search(&r).expect("registered row");
    let _ = dim;

    let rows = used.len();
    let cols = columns.len();
    let mut m = DenseMat::zeros(ring.clone(), rows, cols + rhs.len());
    for (c, col) in columns.iter().enumerate() {
        for (r, v) in col {
            m.set(row_slot(*r), c, v.clone());
        }
    }
    for (k, col) in rhs.iter().enumerate() {
        for (r, v) in col {
            m.set(row_slot(*r), cols + k, v.clone());
        }
    }
    let pivots = m.rref();
    // Inconsistent if any pivot lies in the right-hand block.
    if pivots.iter().any(|&c| c >= cols) {
        return Err(Error::VerificationFailed(
            "linear system has no solution".into(),
        ));
    }
    let mut out = Vec::with_capacity(rhs.len());
    for k in 0..rhs.len() {
        let mut x = vec![ring.zero(); cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = m.at(r, cols + k).clone();
        }
        out.push(x);
    }
    Ok(out)
}

/// Rank of a small dense matrix given by rows.
pub fn dense_rank<R: RingOps>(ring: &R, rows: Vec<Vec<R::Elem>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m = DenseMat {
        ring: ring.clone(),
        rows: rows.len(),
        cols,
        data: rows.into_iter().flatten().collect(),
    };
    m.rref().len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::PrimeField;

    #[test]
    fn nullspace_of_rank_one_matrix() {
        let f5 = PrimeField::new(5).unwrap();
        let mut m = DenseMat::zeros(f5.clone(), 2, 3);
        // rows (1 2 3) and (2 4 6): rank one, nullity two
        for (c, v) in [1u64, 2, 3].iter().enumerate() {
            m.set(0, c, *v);
        }
        for (c, v) in [2u64, 4, 6].iter().enumerate() {
            m.set(1, c, *v);
        }
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = (v[0] + 2 * v[1] + 3 * v[2]) % 5;
            assert_eq!(dot, 0);
        }
    }

    #[test]
    fn solve_small_system() {
        let f7 = PrimeField::new(7).unwrap();
        // columns (1,0), (1,1); rhs (3,2) -> x = (1, 2)
        let columns = vec![vec![(0u64, 1u64)], vec![(0, 1), (1, 1)]];
        let rhs = vec![vec![(0u64, 3u64), (1, 2)]];
        let sol = solve_sparse_columns(&f7, 2, &columns, &rhs).unwrap();
        assert_eq!(sol, vec![vec![1, 2]]);
        // inconsistent: rhs outside the span
        let columns = vec![vec![(0u64, 1u64)]];
        let rhs = vec![vec![(1u64, 1u64)]];
        assert!(solve_sparse_columns(&f7, 2, &columns, &rhs).is_err());
    }

    #[test]
    fn dense_rank_examples() {
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(
            dense_rank(&f2, vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]]),
            2
        );
    }
}
