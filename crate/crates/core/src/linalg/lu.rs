//! LU factorization with partial pivoting and forward/back substitution.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::DenseMatrix;

/// Relative pivot threshold below which a matrix is reported singular.
const SINGULARITY_FACTOR: f64 = 1e-14;

/// Packed LU factors of a square matrix with row pivoting.
///
/// `factors` stores the unit-lower triangle of `L` below the diagonal and `U`
/// on and above it. `pivots[k]` records the row swapped into position `k`
/// during elimination, so `P A = L U` with `P` built from those swaps.
#[derive(Debug, Clone)]
pub struct LuFactors<T> {
    factors: DenseMatrix<T>,
    pivots: Vec<usize>,
    dimension: usize,
    swap_count: usize,
}

/// Factor a square matrix, reporting singularity when a pivot falls below
/// `1e-14 * max|M|`.
pub fn lu_factor<T: Real>(matrix: &DenseMatrix<T>) -> Result<LuFactors<T>> {
    matrix.check_square()?;
    let n = matrix.rows();
    let mut a = matrix.clone();
    let mut pivots = Vec::with_capacity(n);
    let mut swap_count = 0;
    let threshold = T::of(SINGULARITY_FACTOR) * matrix.max_abs();

    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_val = a[(k, k)].abs();
        for i in k + 1..n {
            if a[(i, k)].abs() > pivot_val {
                pivot_val = a[(i, k)].abs();
                pivot_row = i;
            }
        }
        if pivot_val <= threshold {
            return Err(Error::SingularMatrix {
                step: k,
                pivot: pivot_val.as_f64(),
            });
        }
        if pivot_row != k {
            a.swap_rows(k, pivot_row);
            swap_count += 1;
        }
        pivots.push(pivot_row);

        let inv_pivot = T::one() / a[(k, k)];
        for i in k + 1..n {
            let factor = a[(i, k)] * inv_pivot;
            a[(i, k)] = factor;
            if factor != T::zero() {
                let (upper, lower) = a.split_rows(k, i);
                for (l, &u) in lower[k + 1..].iter_mut().zip(&upper[k + 1..]) {
                    *l -= factor * u;
                }
            }
        }
    }

    Ok(LuFactors {
        factors: a,
        pivots,
        dimension: n,
        swap_count,
    })
}

/// Solve `M y = rhs`, or `M^T y = rhs` when `transpose` is set, from packed
/// factors of `M`.
pub fn lu_solve<T: Real>(factors: &LuFactors<T>, rhs: &[T], transpose: bool) -> Result<Vec<T>> {
    if rhs.len() != factors.dimension {
        return Err(Error::DimensionMismatch {
            expected: factors.dimension,
            found: rhs.len(),
        });
    }
    let mut x = rhs.to_vec();
    if transpose {
        factors.solve_transpose_in_place(&mut x);
    } else {
        factors.solve_in_place(&mut x);
    }
    Ok(x)
}

impl<T: Real> LuFactors<T> {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn factors(&self) -> &DenseMatrix<T> {
        &self.factors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        lu_solve(self, rhs, false)
    }

    pub fn solve_transpose(&self, rhs: &[T]) -> Result<Vec<T>> {
        lu_solve(self, rhs, true)
    }

    fn solve_in_place(&self, x: &mut [T]) {
        let n = self.dimension;
        // Apply the recorded row swaps, then L y = Pb, then U x = y.
        for (k, &p) in self.pivots.iter().enumerate() {
            x.swap(k, p);
        }
        for i in 1..n {
            let row = self.factors.row(i);
            let mut s = x[i];
            for (j, &l) in row[..i].iter().enumerate() {
                s -= l * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.factors.row(i);
            let mut s = x[i];
            for (j, &u) in row[i + 1..].iter().enumerate() {
                s -= u * x[i + 1 + j];
            }
            x[i] = s / row[i];
        }
    }

    fn solve_transpose_in_place(&self, x: &mut [T]) {
        let n = self.dimension;
        // M^T = U^T L^T P, so forward-solve U^T, back-solve L^T, undo swaps.
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.factors[(j, i)] * x[j];
            }
            x[i] = s / self.factors[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.factors[(j, i)] * x[j];
            }
            x[i] = s;
        }
        for (k, &p) in self.pivots.iter().enumerate().rev() {
            x.swap(k, p);
        }
    }

    /// Solve against every column of `rhs` at once.
    pub fn solve_matrix(&self, rhs: &DenseMatrix<T>, transpose: bool) -> Result<DenseMatrix<T>> {
        if rhs.rows() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: rhs.rows(),
            });
        }
        // Work on the transpose so each solve runs over a contiguous row.
        let mut work = rhs.transpose();
        for i in 0..work.rows() {
            let row = work.row_mut(i);
            if transpose {
                self.solve_transpose_in_place(row);
            } else {
                self.solve_in_place(row);
            }
        }
        Ok(work.transpose())
    }

    pub fn determinant(&self) -> T {
        let sign = if self.swap_count.is_multiple_of(2) {
            T::one()
        } else {
            -T::one()
        };
        (0..self.dimension)
            .map(|i| self.factors[(i, i)])
            .fold(sign, |acc, d| acc * d)
    }
}

impl<T: Real> DenseMatrix<T> {
    /// Disjoint access to row `upper` (shared) and row `lower` (mutable).
    fn split_rows(&mut self, upper: usize, lower: usize) -> (&[T], &mut [T]) {
        debug_assert!(upper < lower);
        let cols = self.cols();
        let entries = self.entries_mut();
        let (head, tail) = entries.split_at_mut(lower * cols);
        (&head[upper * cols..(upper + 1) * cols], &mut tail[..cols])
    }
}
