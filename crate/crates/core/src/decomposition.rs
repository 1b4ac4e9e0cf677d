//! Two-level nonoverlapping space decomposition with exact local solvers.
//!
//! The fine DG space splits into `J` subdomain spaces (contiguous blocks of
//! fine elements, injected into the global space) plus a coarse DG space on a
//! nested coarser mesh, prolongated by exact polynomial re-expansion. Local
//! stiffness matrices are the Galerkin restrictions `A_j = R_j^T A R_j`.

use std::ops::Range;

use crate::dg::DGSpace;
use crate::error::{Error, Result};
use crate::linalg::{lu_factor, DenseMatrix, LuFactors};
use crate::mesh::Mesh1D;
use crate::quadrature::{legendre_all, GaussRule};
use crate::scalar::Real;

/// Nonoverlapping partition of the fine mesh into `J` subdomains, each a
/// contiguous union of coarse (hence fine) elements.
#[derive(Debug, Clone)]
pub struct Partition {
    j_count: usize,
    coarse_elements: usize,
    fine_elements: usize,
    fine_ranges: Vec<Range<usize>>,
    /// Fine-mesh node indices at the subdomain interfaces (length `J + 1`).
    boundary_nodes: Vec<usize>,
}

impl Partition {
    pub fn subdomain_count(&self) -> usize {
        self.j_count
    }

    pub fn coarse_elements(&self) -> usize {
        self.coarse_elements
    }

    pub fn fine_elements(&self) -> usize {
        self.fine_elements
    }

    pub fn fine_range(&self, j: usize) -> Range<usize> {
        self.fine_ranges[j].clone()
    }

    pub fn fine_ranges(&self) -> &[Range<usize>] {
        &self.fine_ranges
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }
}

/// Split a fine mesh with a nested coarse mesh of `coarse_m` elements into
/// `j_count` equal subdomains.
pub fn build_partition<T: Real>(
    fine: &Mesh1D<T>,
    coarse_m: usize,
    j_count: usize,
) -> Result<Partition> {
    let fine_m = fine.element_count();
    if j_count == 0 || coarse_m == 0 {
        return Err(Error::NonNestedMeshes(
            "J and coarse element count must be positive".into(),
        ));
    }
    if !coarse_m.is_multiple_of(j_count) {
        return Err(Error::NonNestedMeshes(format!(
            "J = {j_count} does not divide the coarse element count {coarse_m}"
        )));
    }
    if !fine_m.is_multiple_of(coarse_m) {
        return Err(Error::NonNestedMeshes(format!(
            "coarse element count {coarse_m} does not divide the fine element count {fine_m}"
        )));
    }
    let coarse_per_sub = coarse_m / j_count;
    let fine_per_coarse = fine_m / coarse_m;
    let fine_per_sub = coarse_per_sub * fine_per_coarse;
    let fine_ranges: Vec<Range<usize>> = (0..j_count)
        .map(|j| j * fine_per_sub..(j + 1) * fine_per_sub)
        .collect();
    let boundary_nodes = (0..=j_count).map(|j| j * fine_per_sub).collect();
    Ok(Partition {
        j_count,
        coarse_elements: coarse_m,
        fine_elements: fine_m,
        fine_ranges,
        boundary_nodes,
    })
}

/// Prolongation matrix from a local coefficient space into the global one.
///
/// Subdomain prolongations are Boolean selections of a contiguous dof block
/// and keep their offset so operator assembly can use row slicing instead of
/// dense products.
#[derive(Debug, Clone)]
pub struct Prolongation<T> {
    matrix: DenseMatrix<T>,
    injection_offset: Option<usize>,
}

impl<T: Real> Prolongation<T> {
    pub fn dense(matrix: DenseMatrix<T>) -> Self {
        Self {
            matrix,
            injection_offset: None,
        }
    }

    pub fn injection(global_dim: usize, offset: usize, local_dim: usize) -> Self {
        assert!(offset + local_dim <= global_dim);
        let mut matrix = DenseMatrix::zeros(global_dim, local_dim);
        for c in 0..local_dim {
            matrix[(offset + c, c)] = T::one();
        }
        Self {
            matrix,
            injection_offset: Some(offset),
        }
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn global_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn local_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn injection_offset(&self) -> Option<usize> {
        self.injection_offset
    }

    /// `R v_local`, scattered into the global space.
    pub fn apply(&self, local: &[T]) -> Vec<T> {
        match self.injection_offset {
            Some(offset) => {
                let mut out = vec![T::zero(); self.global_dim()];
                out[offset..offset + local.len()].copy_from_slice(local);
                out
            }
            None => self.matrix.matvec(local),
        }
    }

    /// `R^T v_global`, gathered into the local space.
    pub fn apply_transpose(&self, global: &[T]) -> Vec<T> {
        match self.injection_offset {
            Some(offset) => global[offset..offset + self.local_dim()].to_vec(),
            None => self.matrix.matvec_transpose(global),
        }
    }
}

/// Coarse-to-fine prolongation by exact re-expansion of each coarse Legendre
/// mode in the fine modal basis. Nested meshes and equal degree keep the
/// represented piecewise polynomial unchanged pointwise.
pub fn coarse_prolongation<T: Real>(
    coarse: &DGSpace<T>,
    fine: &DGSpace<T>,
) -> Result<DenseMatrix<T>> {
    if coarse.degree() != fine.degree() {
        return Err(Error::DegreeMismatch {
            coarse: coarse.degree(),
            fine: fine.degree(),
        });
    }
    let r = fine.degree();
    let nloc = r + 1;
    let fine_m = fine.mesh().element_count();
    let _coarse_m = coarse.mesh().element_count();
    let n = fine.ndofs();
    let n0 = coarse.ndofs();

    let domain_width = {
        let (a, b) = fine.mesh().domain();
        b - a
    };
    let tol = T::of(1e-12) * domain_width;

    let rule = GaussRule::<T>::new(r + 2);
    let half = T::of(0.5);
    let mut p = DenseMatrix::zeros(n, n0);

    for k in 0..fine_m {
        let (xl, xr) = fine.mesh().element(k);
        let mid = (xl + xr) * half;
        // Locate the coarse element containing this fine element.
        let c = coarse.mesh().element_containing(mid)?;
        let (cxl, cxr) = coarse.mesh().element(c);
        if xl < cxl - tol || xr > cxr + tol {
            return Err(Error::NonNestedMeshes(format!(
                "fine element {k} straddles a coarse element boundary"
            )));
        }
        // Reference map: xi_coarse = scale * xi_fine + shift.
        let scale = (xr - xl) / (cxr - cxl);
        let shift = (xl + xr - cxl - cxr) / (cxr - cxl);

        for i in 0..nloc {
            // Project the coarse mode onto each fine mode; exact because the
            // restricted coarse mode is itself a degree-r polynomial.
            for l in 0..nloc {
                let weight = T::of((2 * l + 1) as f64) * half;
                let integral = rule.integrate(-T::one(), T::one(), |xi| {
                    let coarse_vals = legendre_all(r, scale * xi + shift);
                    let fine_vals = legendre_all(r, xi);
                    coarse_vals[i] * fine_vals[l]
                });
                p[(fine.dof(k, l), coarse.dof(c, i))] = weight * integral;
            }
        }
    }
    Ok(p)
}

/// Boolean selection prolongation for subdomain `j` (`1 <= j <= J`).
pub fn subdomain_prolongation<T: Real>(
    partition: &Partition,
    space: &DGSpace<T>,
    j: usize,
) -> Result<DenseMatrix<T>> {
    Ok(subdomain_injection(partition, space, j)?.matrix().clone())
}

fn subdomain_injection<T: Real>(
    partition: &Partition,
    space: &DGSpace<T>,
    j: usize,
) -> Result<Prolongation<T>> {
    if j == 0 || j > partition.subdomain_count() {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: partition.subdomain_count(),
        });
    }
    let nloc = space.modes_per_element();
    let range = partition.fine_range(j - 1);
    let offset = range.start * nloc;
    let local_dim = range.len() * nloc;
    Ok(Prolongation::injection(space.ndofs(), offset, local_dim))
}

/// One local problem: the restricted stiffness matrix and its factorization.
#[derive(Debug, Clone)]
pub struct LocalSolver<T> {
    pub matrix: DenseMatrix<T>,
    pub factors: LuFactors<T>,
}

/// Space decomposition with exact local solvers.
///
/// Index 0 is the coarse space; indices `1..=J` are the subdomain spaces.
#[derive(Debug, Clone)]
pub struct Decomposition<T> {
    /// Global stiffness matrix the local problems restrict.
    pub matrix: DenseMatrix<T>,
    pub prolongations: Vec<Prolongation<T>>,
    pub locals: Vec<LocalSolver<T>>,
    /// Coarse DG space, when the decomposition came from a mesh hierarchy.
    pub coarse_space: Option<DGSpace<T>>,
}

impl<T: Real> Decomposition<T> {
    /// Number of subdomains `J` (excludes the coarse space).
    pub fn subdomain_count(&self) -> usize {
        self.prolongations.len().saturating_sub(1)
    }

    pub fn global_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn local_dim(&self, j: usize) -> usize {
        self.prolongations[j].local_dim()
    }
}

/// Restrict `A` through every prolongation and factor the local matrices.
///
/// A singular local matrix means the decomposition is not compatible with the
/// bilinear form; the failing index is reported.
pub fn build_local_solvers<T: Real>(
    matrix: DenseMatrix<T>,
    prolongations: Vec<Prolongation<T>>,
) -> Result<Decomposition<T>> {
    let locals = build_locals(&matrix, &prolongations, &prolongations)?;
    Ok(Decomposition {
        matrix,
        prolongations,
        locals,
        coarse_space: None,
    })
}

/// Variant with distinct trial/test prolongations: `A_j = S_j^T A R_j`.
pub fn build_local_solvers_with_test<T: Real>(
    matrix: DenseMatrix<T>,
    prolongations: Vec<Prolongation<T>>,
    test_prolongations: &[Prolongation<T>],
) -> Result<Decomposition<T>> {
    let locals = build_locals(&matrix, &prolongations, test_prolongations)?;
    Ok(Decomposition {
        matrix,
        prolongations,
        locals,
        coarse_space: None,
    })
}

fn build_locals<T: Real>(
    a: &DenseMatrix<T>,
    trial: &[Prolongation<T>],
    test: &[Prolongation<T>],
) -> Result<Vec<LocalSolver<T>>> {
    assert_eq!(
        trial.len(),
        test.len(),
        "trial/test prolongation counts differ"
    );
    let mut locals = Vec::with_capacity(trial.len());
    for (j, (r, s)) in trial.iter().zip(test).enumerate() {
        let local = restrict(a, r, s);
        let factors = lu_factor(&local).map_err(|e| match e {
            Error::SingularMatrix { .. } => Error::SingularLocalMatrix(j),
            other => other,
        })?;
        locals.push(LocalSolver {
            matrix: local,
            factors,
        });
    }
    Ok(locals)
}

/// `S^T A R`, using block slicing when both maps are injections.
fn restrict<T: Real>(
    a: &DenseMatrix<T>,
    trial: &Prolongation<T>,
    test: &Prolongation<T>,
) -> DenseMatrix<T> {
    match (test.injection_offset(), trial.injection_offset()) {
        (Some(row_off), Some(col_off)) => {
            let rows = test.local_dim();
            let cols = trial.local_dim();
            DenseMatrix::from_fn(rows, cols, |i, j| a[(row_off + i, col_off + j)])
        }
        _ => {
            let ar = a.matmul(trial.matrix());
            test.matrix().transpose().matmul(&ar)
        }
    }
}

/// Build the standard two-level decomposition: coarse space on a nested mesh
/// with `coarse_m` elements plus `j_count` subdomain injections.
pub fn two_level_decomposition<T: Real>(
    space: &DGSpace<T>,
    matrix: &DenseMatrix<T>,
    coarse_m: usize,
    j_count: usize,
) -> Result<(Partition, Decomposition<T>)> {
    let partition = build_partition(space.mesh(), coarse_m, j_count)?;
    let coarse_mesh = crate::mesh::build_mesh(coarse_m, space.mesh().domain())?;
    let coarse_space = DGSpace::new(coarse_mesh, space.degree());

    let mut prolongations = Vec::with_capacity(j_count + 1);
    prolongations.push(Prolongation::dense(coarse_prolongation(
        &coarse_space,
        space,
    )?));
    for j in 1..=j_count {
        prolongations.push(subdomain_injection(&partition, space, j)?);
    }
    let mut dec = build_local_solvers(matrix.clone(), prolongations)?;
    dec.coarse_space = Some(coarse_space);
    Ok((partition, dec))
}

/// Diagnostic summary of the decomposition invariants.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub global_dim: usize,
    /// Rank of the horizontally concatenated prolongations.
    pub concatenated_rank: usize,
    /// Column rank of each prolongation.
    pub column_ranks: Vec<usize>,
    /// Relative reconstruction residual of each `A_j` against `S^T A R`.
    pub reconstruction_residuals: Vec<f64>,
    /// Total prolongation columns minus the concatenated rank.
    pub redundancy: usize,
    /// Whether every local space is a proper subspace (`n_j < n`).
    pub proper_subspaces: bool,
    pub pass: bool,
}

/// Check the decomposition invariants: the prolongations span the global
/// space, each has full column rank, and the stored local matrices match
/// their definition.
pub fn verify_decomposition<T: Real>(dec: &Decomposition<T>) -> DecompositionReport {
    let n = dec.global_dim();
    let rank_tol = 1e-10;

    let mut concat = dec.prolongations[0].matrix().clone();
    for p in &dec.prolongations[1..] {
        concat = concat.hcat(p.matrix());
    }
    let concatenated_rank = concat.rank(T::of(rank_tol));
    let total_cols = concat.cols();

    let column_ranks: Vec<usize> = dec
        .prolongations
        .iter()
        .map(|p| p.matrix().rank(T::of(rank_tol)))
        .collect();

    let mut reconstruction_residuals = Vec::with_capacity(dec.locals.len());
    for (p, local) in dec.prolongations.iter().zip(&dec.locals) {
        let expected = restrict(&dec.matrix, p, p);
        let scale = expected.frobenius_norm();
        let resid = local.matrix.sub(&expected).frobenius_norm();
        let rel = if scale == T::zero() {
            resid
        } else {
            resid / scale
        };
        reconstruction_residuals.push(rel.as_f64());
    }

    let proper_subspaces = dec.prolongations.iter().all(|p| p.local_dim() < n);
    let full_column_ranks = dec
        .prolongations
        .iter()
        .zip(&column_ranks)
        .all(|(p, &rank)| rank == p.local_dim());
    let residual_ok = reconstruction_residuals.iter().all(|&r| r <= 1e-13);
    let pass = concatenated_rank == n && full_column_ranks && residual_ok && proper_subspaces;

    DecompositionReport {
        global_dim: n,
        concatenated_rank,
        column_ranks,
        reconstruction_residuals,
        redundancy: total_cols - concatenated_rank,
        proper_subspaces,
        pass,
    }
}
