//! Unrestarted GMRES with optional left preconditioning, and the stationary
//! multiplicative Schwarz iteration.

use std::time::Instant;

use crate::error::Result;
use crate::linalg::{norm2, sub_vec, DenseMatrix};
use crate::operators::SchwarzOperators;
use crate::scalar::Real;

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Residual tolerance reached.
    Converged,
    /// Arnoldi breakdown: the Krylov space became invariant, which means the
    /// exact solution was found.
    Breakdown,
    /// Iteration cap hit; the best iterate so far is returned.
    MaxIterExceeded,
    /// Residual grew by more than 1e6 over the initial one.
    Diverged,
}

/// Iteration record for a linear solve.
#[derive(Debug, Clone)]
pub struct SolveStats<T> {
    pub iterations: usize,
    /// Relative residuals, starting with the initial one. For GMRES these are
    /// the Givens-recurrence values and are nonincreasing.
    pub residual_history: Vec<T>,
    pub converged: bool,
    pub termination: Termination,
    pub wall_time: f64,
    pub final_relative_residual: T,
    /// True unpreconditioned relative residual of the returned iterate, when
    /// the solve ran on a preconditioned system.
    pub true_relative_residual: Option<T>,
}

/// Unrestarted GMRES via Arnoldi with modified Gram-Schmidt and Givens
/// rotations. The initial guess is zero; iteration stops when the recurrence
/// residual satisfies `||rhs - Op x||_2 <= tol * ||rhs||_2`.
pub fn gmres<T: Real>(
    apply: impl Fn(&[T]) -> Result<Vec<T>>,
    rhs: &[T],
    tol: T,
    max_iter: usize,
) -> Result<(Vec<T>, SolveStats<T>)> {
    gmres_with_restart(apply, rhs, tol, max_iter, None)
}

/// GMRES with an optional restart length (`None` = unrestarted, the default
/// and validated configuration).
pub fn gmres_with_restart<T: Real>(
    apply: impl Fn(&[T]) -> Result<Vec<T>>,
    rhs: &[T],
    tol: T,
    max_iter: usize,
    restart: Option<usize>,
) -> Result<(Vec<T>, SolveStats<T>)> {
    let start = Instant::now();
    let n = rhs.len();
    let rhs_norm = norm2(rhs);
    let mut history = Vec::with_capacity(max_iter + 1);

    if rhs_norm == T::zero() {
        let stats = SolveStats {
            iterations: 0,
            residual_history: vec![T::zero()],
            converged: true,
            termination: Termination::Converged,
            wall_time: start.elapsed().as_secs_f64(),
            final_relative_residual: T::zero(),
            true_relative_residual: None,
        };
        return Ok((vec![T::zero(); n], stats));
    }

    let cycle_len = restart.unwrap_or(max_iter).min(max_iter).max(1);
    let mut x = vec![T::zero(); n];
    let mut total_iters = 0usize;
    let mut rel = T::one();
    history.push(rel);
    let mut termination = Termination::MaxIterExceeded;

    'outer: loop {
        // Residual for this cycle (equals rhs on the first pass).
        let r = if total_iters == 0 {
            rhs.to_vec()
        } else {
            let ax = apply(&x)?;
            sub_vec(rhs, &ax)
        };
        let beta = norm2(&r);
        if beta / rhs_norm <= tol {
            termination = Termination::Converged;
            break;
        }

        let m = cycle_len.min(max_iter - total_iters);
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|&v| v / beta).collect());
        // Column-major Hessenberg: h[k] holds column k (k+2 entries).
        let mut h: Vec<Vec<T>> = Vec::with_capacity(m);
        let mut cs = vec![T::zero(); m];
        let mut sn = vec![T::zero(); m];
        let mut g = vec![T::zero(); m + 1];
        g[0] = beta;

        let mut k = 0usize;
        while k < m {
            total_iters += 1;
            let mut w = apply(&basis[k])?;
            let w_pre_norm = norm2(&w);

            let mut column = vec![T::zero(); k + 2];
            for (j, vj) in basis.iter().enumerate().take(k + 1) {
                let hjk = crate::linalg::dot(vj, &w);
                column[j] = hjk;
                for (wi, &vji) in w.iter_mut().zip(vj) {
                    *wi -= hjk * vji;
                }
            }
            let w_norm = norm2(&w);
            column[k + 1] = w_norm;

            // Apply the accumulated rotations to the new column.
            for j in 0..k {
                let t = cs[j] * column[j] + sn[j] * column[j + 1];
                column[j + 1] = -sn[j] * column[j] + cs[j] * column[j + 1];
                column[j] = t;
            }
            // New rotation annihilating the subdiagonal entry.
            let denom = column[k].hypot(column[k + 1]);
            let (c, s) = if denom == T::zero() {
                (T::one(), T::zero())
            } else {
                (column[k] / denom, column[k + 1] / denom)
            };
            cs[k] = c;
            sn[k] = s;
            column[k] = c * column[k] + s * column[k + 1];
            column[k + 1] = T::zero();
            let g_next = -s * g[k];
            g[k] = c * g[k];
            g[k + 1] = g_next;
            h.push(column);

            rel = g[k + 1].abs() / rhs_norm;
            history.push(rel);
            k += 1;

            if rel <= tol {
                termination = Termination::Converged;
                break;
            }
            // Happy breakdown: the Krylov space became invariant.
            if w_norm <= T::epsilon() * T::of(32.0) * w_pre_norm {
                termination = Termination::Breakdown;
                break;
            }
            basis.push(w.into_iter().map(|wi| wi / w_norm).collect());
        }

        // Back substitution H y = g on the k columns used.
        let mut y = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut s = g[i];
            for (j, hcol) in h.iter().enumerate().take(k).skip(i + 1) {
                s -= hcol[i] * y[j];
            }
            y[i] = s / h[i][i];
        }
        for (j, &yj) in y.iter().enumerate() {
            for (xi, &vji) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vji;
            }
        }

        if matches!(termination, Termination::Converged | Termination::Breakdown) {
            break 'outer;
        }
        if total_iters >= max_iter {
            break 'outer;
        }
    }

    let converged = matches!(termination, Termination::Converged | Termination::Breakdown);
    let stats = SolveStats {
        iterations: total_iters,
        residual_history: history,
        converged,
        termination,
        wall_time: start.elapsed().as_secs_f64(),
        final_relative_residual: rel,
        true_relative_residual: None,
    };
    Ok((x, stats))
}

/// Left-preconditioned GMRES on `B A x = B f`.
///
/// Convergence is measured on the preconditioned residual; the true relative
/// residual of the final iterate is recorded separately in the stats.
pub fn preconditioned_solve<T: Real>(
    a: &DenseMatrix<T>,
    b_action: impl Fn(&[T]) -> Result<Vec<T>>,
    f: &[T],
    tol: T,
    max_iter: usize,
) -> Result<(Vec<T>, SolveStats<T>)> {
    let bf = b_action(f)?;
    let composed = |v: &[T]| -> Result<Vec<T>> { b_action(&a.matvec(v)) };
    let (x, mut stats) = gmres(composed, &bf, tol, max_iter)?;
    stats.true_relative_residual = Some(true_relative_residual(a, &x, f));
    Ok((x, stats))
}

/// Right-preconditioned GMRES on `A B z = f`, `x = B z`; diagnostic variant.
pub fn preconditioned_solve_right<T: Real>(
    a: &DenseMatrix<T>,
    b_action: impl Fn(&[T]) -> Result<Vec<T>>,
    f: &[T],
    tol: T,
    max_iter: usize,
) -> Result<(Vec<T>, SolveStats<T>)> {
    let composed = |v: &[T]| -> Result<Vec<T>> { Ok(a.matvec(&b_action(v)?)) };
    let (z, mut stats) = gmres(composed, f, tol, max_iter)?;
    let x = b_action(&z)?;
    stats.true_relative_residual = Some(true_relative_residual(a, &x, f));
    Ok((x, stats))
}

fn true_relative_residual<T: Real>(a: &DenseMatrix<T>, x: &[T], f: &[T]) -> T {
    let fnorm = norm2(f);
    if fnorm == T::zero() {
        return T::zero();
    }
    let ax = a.matvec(x);
    norm2(&sub_vec(f, &ax)) / fnorm
}

/// Stationary multiplicative Schwarz iteration from a zero initial guess:
/// repeated sweeps until the true relative residual drops below `tol`.
pub fn multiplicative_iterate<T: Real>(
    ops: &SchwarzOperators<T>,
    f: &[T],
    tol: T,
    max_iter: usize,
    symmetrized: bool,
) -> Result<(Vec<T>, SolveStats<T>)> {
    let start = Instant::now();
    let a = ops.matrix();
    let fnorm = norm2(f);
    let mut x = vec![T::zero(); f.len()];
    let mut history = Vec::with_capacity(max_iter + 1);

    if fnorm == T::zero() {
        let stats = SolveStats {
            iterations: 0,
            residual_history: vec![T::zero()],
            converged: true,
            termination: Termination::Converged,
            wall_time: start.elapsed().as_secs_f64(),
            final_relative_residual: T::zero(),
            true_relative_residual: None,
        };
        return Ok((x, stats));
    }

    let mut rel = T::one();
    history.push(rel);
    let divergence_cap = T::of(1e6);
    let mut iterations = 0usize;
    let mut termination = Termination::MaxIterExceeded;

    while iterations < max_iter {
        x = ops.multiplicative_sweep(&x, f, symmetrized)?;
        iterations += 1;
        let ax = a.matvec(&x);
        rel = norm2(&sub_vec(f, &ax)) / fnorm;
        history.push(rel);
        if rel <= tol {
            termination = Termination::Converged;
            break;
        }
        if rel > divergence_cap {
            termination = Termination::Diverged;
            break;
        }
    }

    let stats = SolveStats {
        iterations,
        residual_history: history,
        converged: matches!(termination, Termination::Converged),
        termination,
        wall_time: start.elapsed().as_secs_f64(),
        final_relative_residual: rel,
        true_relative_residual: None,
    };
    Ok((x, stats))
}
