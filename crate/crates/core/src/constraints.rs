//! Integer `N × M` matrices `A` whose columns span (part of) the kernel of a
//! mode operator: every kernel state is `n = A m` for integer `m`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::GramMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintsMatrix {
    /// Row-major, `rows × cols`.
    entries: Vec<Vec<i64>>,
    rows: usize,
    cols: usize,
    /// Which construction produced the matrix, e.g. `"nega-II"` or `"hnf"`.
    pub origin: String,
    pub operator_index: usize,
    pub prime: Option<usize>,
}

impl ConstraintsMatrix {
    pub fn from_columns(
        rows: usize,
        columns: &[Vec<i64>],
        origin: impl Into<String>,
        operator_index: usize,
        prime: Option<usize>,
    ) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return invalid("constraints matrix columns must all have length N");
        }
        let cols = columns.len();
        let entries = (0..rows)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Ok(ConstraintsMatrix {
            entries,
            rows,
            cols,
            origin: origin.into(),
            operator_index,
            prime,
        })
    }

    pub fn from_rows(
        entries: Vec<Vec<i64>>,
        origin: impl Into<String>,
        operator_index: usize,
        prime: Option<usize>,
    ) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return invalid("constraints matrix rows must have equal length");
        }
        Ok(ConstraintsMatrix {
            entries,
            rows,
            cols,
            origin: origin.into(),
            operator_index,
            prime,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn to_rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.entries.iter().map(|r| r[j]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// `n = A m`.
    pub fn apply(&self, m: &[i64]) -> Result<Vec<i64>> {
        if m.len() != self.cols {
            return invalid(format!(
                "coordinate vector has length {}, matrix has {} columns",
                m.len(),
                self.cols
            ));
        }
        Ok(self.apply_unchecked(m))
    }

    pub(crate) fn apply_unchecked(&self, m: &[i64]) -> Vec<i64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(m).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᵀ G A` as a new Gram matrix.
    pub(crate) fn congruence(&self, gram: &GramMatrix) -> Vec<Vec<f64>> {
        let (n, m) = (self.rows, self.cols);
        // GA, N × M
        let mut ga = vec![vec![0.0; m]; n];
        for (i, ga_row) in ga.iter_mut().enumerate() {
            for k in 0..n {
                let g = gram.get(i, k);
                if g == 0.0 {
                    continue;
                }
                for (j, v) in ga_row.iter_mut().enumerate() {
                    *v += g * self.entries[k][j] as f64;
                }
            }
        }
        let mut out = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in a..m {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += self.entries[i][a] as f64 * ga[i][b];
                }
                out[a][b] = acc;
                out[b][a] = acc;
            }
        }
        out
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<BigInt>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        rank_in_place(&mut work)
    }

    /// Exact integer `m` with `A m = n`, if one exists.
    pub fn solve(&self, target: &[i64]) -> Option<Vec<i64>> {
        if target.len() != self.rows {
            return None;
        }
        solve_integer(&self.entries, target)
    }
}

pub(crate) fn rank_in_place(work: &mut [Vec<BigInt>]) -> usize {
    let rows = work.len();
    let cols = work.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(rank, pivot);
        for r in (rank + 1)..rows {
            if work[r][col].is_zero() {
                continue;
            }
            let a = work[rank][col].clone();
            let b = work[r][col].clone();
            for c in col..cols {
                let v = &work[r][c] * &a - &work[rank][c] * &b;
                work[r][c] = v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Solves `A m = n` over the rationals by Gauss-Jordan on `[A | n]` and
/// accepts the solution only if it is integral and unique.
fn solve_integer(a: &[Vec<i64>], target: &[i64]) -> Option<Vec<i64>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    // Augmented matrix with BigInt entries, kept fraction-free.
    let mut work: Vec<Vec<BigInt>> = a
        .iter()
        .zip(target)
        .map(|(r, &t)| {
            r.iter()
                .map(|&x| BigInt::from(x))
                .chain(std::iter::once(BigInt::from(t)))
                .collect()
        })
        .collect();
    let mut pivots = Vec::with_capacity(cols);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !work[r][col].is_zero()) else {
            // Column dependent on earlier ones: solution not unique.
            return None;
        };
        work.swap(rank, p);
        for r in 0..rows {
            if r == rank || work[r][col].is_zero() {
                continue;
            }
            let a_p = work[rank][col].clone();
            let b = work[r][col].clone();
            for c in 0..=cols {
                let v = &work[r][c] * &a_p - &work[rank][c] * &b;
                work[r][c] = v;
            }
        }
        pivots.push(rank);
        rank += 1;
    }
    // Consistency: rows beyond the rank must have a zero right-hand side.
    if work[rank..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut solution = Vec::with_capacity(cols);
    for (col, &row) in pivots.iter().enumerate() {
        let num = &work[row][cols];
        let den = &work[row][col];
        if !(num % den).is_zero() {
            return None;
        }
        let q: BigInt = num / den;
        if q.abs() > BigInt::from(i64::MAX) {
            return None;
        }
        solution.push(i64::try_from(q).ok()?);
    }
    Some(solution)
}
