//! Schwarz operators built from a space decomposition: the projection-like
//! operators `P_j`, `Q_j`, the additive pair `P_ad = B A`, `Q_ad`, the
//! multiplicative error propagators `E_mu`, `E_sy`, and the hybrid operator
//! `P_hy = alpha P_0 + (I - alpha P_0) Phat`.
//!
//! Every operator exists in two forms: an explicit `n x n` matrix for the
//! spectral analysis, and a matrix-free action (a round of local solves) for
//! the Krylov path. The two must agree on random vectors to tight tolerance;
//! the test suite enforces it.
//!
//! Operator objects are immutable once built, so they can be shared across
//! threads; the additive corrections are independent per subdomain but are
//! summed here in a fixed order to keep results bit-reproducible.

use crate::decomposition::{build_local_solvers_with_test, Decomposition, Prolongation};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Which operator a materialized matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `P_j = R_j A_j^{-1} S_j^T A`
    Projection(usize),
    /// `Q_j = S_j A_j^{-T} R_j^T A^T`
    AdjointProjection(usize),
    /// `P_ad = B A`
    Additive,
    /// `Q_ad = B^T A^T`
    AdditiveAdjoint,
    /// `B = sum_j R_j A_j^{-1} S_j^T`
    Preconditioner,
    /// `B^dag = B^T`
    PreconditionerAdjoint,
    /// `E_mu = (I - P_J) ... (I - P_0)`
    MultiplicativeError,
    /// `E_sy = (I - P_0) ... (I - P_J)(I - P_J) ... (I - P_0)`
    SymmetrizedError,
    /// `P_mu = I - E_mu`
    Multiplicative,
    /// `P_sy = I - E_sy`
    Symmetrized,
    /// `P_hy = B_hy A`
    Hybrid,
    /// `B_hy = alpha B_0 + (I - alpha P_0) Bhat`
    HybridPreconditioner,
    /// The unpreconditioned system matrix `A`.
    System,
}

/// A materialized operator together with its tag.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<T> {
    pub kind: OperatorKind,
    pub matrix: DenseMatrix<T>,
}

/// The additive Schwarz operators and preconditioners.
#[derive(Debug, Clone)]
pub struct AdditiveOperators<T> {
    pub p_ad: DenseMatrix<T>,
    pub q_ad: DenseMatrix<T>,
    pub b: DenseMatrix<T>,
    pub b_adjoint: DenseMatrix<T>,
}

/// Operator factory over a decomposition with exact local solvers.
#[derive(Debug, Clone)]
pub struct SchwarzOperators<T> {
    dec: Decomposition<T>,
    /// Test-side prolongations `S_j`; `None` means `S_j = R_j`.
    test_prolongations: Option<Vec<Prolongation<T>>>,
    alpha: T,
}

impl<T: Real> SchwarzOperators<T> {
    /// Standard construction with `S_j = R_j` and relaxation `alpha`.
    pub fn new(dec: Decomposition<T>, alpha: T) -> Self {
        Self {
            dec,
            test_prolongations: None,
            alpha,
        }
    }

    /// Abstract variant with distinct test prolongations; the local matrices
    /// are rebuilt as `A_j = S_j^T A R_j`.
    pub fn with_test_prolongations(
        dec: Decomposition<T>,
        test_prolongations: Vec<Prolongation<T>>,
        alpha: T,
    ) -> Result<Self> {
        if test_prolongations.len() != dec.prolongations.len() {
            return Err(Error::DimensionMismatch {
                expected: dec.prolongations.len(),
                found: test_prolongations.len(),
            });
        }
        let rebuilt = build_local_solvers_with_test(
            dec.matrix.clone(),
            dec.prolongations.clone(),
            &test_prolongations,
        )?;
        Ok(Self {
            dec: rebuilt,
            test_prolongations: Some(test_prolongations),
            alpha,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.dec.matrix
    }

    pub fn decomposition(&self) -> &Decomposition<T> {
        &self.dec
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn set_alpha(&mut self, alpha: T) {
        self.alpha = alpha;
    }

    /// Number of subdomains `J` (the coarse space is index 0).
    pub fn subdomain_count(&self) -> usize {
        self.dec.subdomain_count()
    }

    pub fn n(&self) -> usize {
        self.dec.global_dim()
    }

    fn trial(&self, j: usize) -> &Prolongation<T> {
        &self.dec.prolongations[j]
    }

    fn test(&self, j: usize) -> &Prolongation<T> {
        match &self.test_prolongations {
            Some(s) => &s[j],
            None => &self.dec.prolongations[j],
        }
    }

    /// `R_j A_j^{-1} S_j^T v` — one local correction, matrix-free.
    fn local_correction(&self, j: usize, v: &[T]) -> Result<Vec<T>> {
        let rhs = self.test(j).apply_transpose(v);
        let sol = self.dec.locals[j].factors.solve(&rhs)?;
        Ok(self.trial(j).apply(&sol))
    }

    /// `S_j A_j^{-T} R_j^T v` — the adjoint-side correction.
    fn local_correction_adjoint(&self, j: usize, v: &[T]) -> Result<Vec<T>> {
        let rhs = self.trial(j).apply_transpose(v);
        let sol = self.dec.locals[j].factors.solve_transpose(&rhs)?;
        Ok(self.test(j).apply(&sol))
    }

    /// Matrix-free additive preconditioner action `B v`.
    pub fn apply_b(&self, v: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.n()];
        for j in 0..=self.subdomain_count() {
            let c = self.local_correction(j, v)?;
            for (o, &ci) in out.iter_mut().zip(&c) {
                *o += ci;
            }
        }
        Ok(out)
    }

    /// Matrix-free adjoint preconditioner action `B^dag v = B^T v`.
    pub fn apply_b_adjoint(&self, v: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.n()];
        for j in 0..=self.subdomain_count() {
            let c = self.local_correction_adjoint(j, v)?;
            for (o, &ci) in out.iter_mut().zip(&c) {
                *o += ci;
            }
        }
        Ok(out)
    }

    /// Matrix-free hybrid preconditioner action
    /// `B_hy v = alpha B_0 v + (I - alpha P_0)(Bhat v)`.
    pub fn apply_b_hybrid(&self, v: &[T]) -> Result<Vec<T>> {
        if self.subdomain_count() == 0 {
            return Err(Error::NoSubdomains);
        }
        let coarse = self.local_correction(0, v)?;
        let mut subdomain_sum = vec![T::zero(); self.n()];
        for j in 1..=self.subdomain_count() {
            let c = self.local_correction(j, v)?;
            for (o, &ci) in subdomain_sum.iter_mut().zip(&c) {
                *o += ci;
            }
        }
        // P_0 w = B_0 (A w)
        let aw = self.matrix().matvec(&subdomain_sum);
        let p0w = self.local_correction(0, &aw)?;
        let mut out = subdomain_sum;
        for i in 0..out.len() {
            out[i] += self.alpha * (coarse[i] - p0w[i]);
        }
        Ok(out)
    }

    /// `S_j^T M` as a dense block (row slice for injections).
    fn gather_rows(&self, p: &Prolongation<T>, m: &DenseMatrix<T>) -> DenseMatrix<T> {
        match p.injection_offset() {
            Some(off) => DenseMatrix::from_fn(p.local_dim(), m.cols(), |i, j| m[(off + i, j)]),
            None => p.matrix().transpose().matmul(m),
        }
    }

    /// `out += R_j Z` (row scatter for injections).
    fn scatter_rows_add(&self, p: &Prolongation<T>, z: &DenseMatrix<T>, out: &mut DenseMatrix<T>) {
        match p.injection_offset() {
            Some(off) => {
                for i in 0..z.rows() {
                    let dst = out.row_mut(off + i);
                    for (d, &v) in dst.iter_mut().zip(z.row(i)) {
                        *d += v;
                    }
                }
            }
            None => {
                let add = p.matrix().matmul(z);
                for i in 0..out.rows() {
                    let dst = out.row_mut(i);
                    for (d, &v) in dst.iter_mut().zip(add.row(i)) {
                        *d += v;
                    }
                }
            }
        }
    }

    /// One preconditioner summand `R_j A_j^{-1} S_j^T` as an `n x n` matrix.
    fn b_part(&self, j: usize) -> Result<DenseMatrix<T>> {
        let rhs = self.gather_rows(self.test(j), &DenseMatrix::identity(self.n()));
        let x = self.dec.locals[j].factors.solve_matrix(&rhs, false)?;
        let mut out = DenseMatrix::zeros(self.n(), self.n());
        self.scatter_rows_add(self.trial(j), &x, &mut out);
        Ok(out)
    }

    /// `(B_0, Bhat)`: the coarse summand and the subdomain sum.
    fn b_split(&self) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        let b0 = self.b_part(0)?;
        let mut bhat = DenseMatrix::zeros(self.n(), self.n());
        for j in 1..=self.subdomain_count() {
            let rhs = self.gather_rows(self.test(j), &DenseMatrix::identity(self.n()));
            let x = self.dec.locals[j].factors.solve_matrix(&rhs, false)?;
            self.scatter_rows_add(self.trial(j), &x, &mut bhat);
        }
        Ok((b0, bhat))
    }

    /// Projection-like operators `P_j = R_j A_j^{-1} S_j^T A` and
    /// `Q_j = S_j A_j^{-T} R_j^T A^T`, via multi-rhs local solves.
    pub fn projection_matrices(&self, j: usize) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        if j > self.subdomain_count() {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: self.subdomain_count(),
            });
        }
        let a = self.matrix();
        let at = a.transpose();

        let y = self.gather_rows(self.test(j), a);
        let z = self.dec.locals[j].factors.solve_matrix(&y, false)?;
        let mut p = DenseMatrix::zeros(self.n(), self.n());
        self.scatter_rows_add(self.trial(j), &z, &mut p);

        let yq = self.gather_rows(self.trial(j), &at);
        let zq = self.dec.locals[j].factors.solve_matrix(&yq, true)?;
        let mut q = DenseMatrix::zeros(self.n(), self.n());
        self.scatter_rows_add(self.test(j), &zq, &mut q);

        Ok((p, q))
    }

    /// Additive operators: `B`, `B^dag = B^T`, `P_ad = B A`, `Q_ad = B^T A^T`.
    pub fn additive_operators(&self) -> Result<AdditiveOperators<T>> {
        let (b0, bhat) = self.b_split()?;
        let b = b0.add(&bhat);
        let b_adjoint = b.transpose();
        let p_ad = b.matmul(self.matrix());
        let q_ad = b_adjoint.matmul(&self.matrix().transpose());
        Ok(AdditiveOperators {
            p_ad,
            q_ad,
            b,
            b_adjoint,
        })
    }

    /// Error propagation operator `E` and its preconditioned companion
    /// `P = I - E` for the multiplicative (or symmetrized) method.
    ///
    /// `E` accumulates right-to-left so the operator count stays linear in
    /// `J`: alongside `E` the product `Y = A E` is carried, giving each factor
    /// `(I - P_j) E = E - R_j A_j^{-1} S_j^T Y` by one local multi-solve.
    pub fn multiplicative_operators(
        &self,
        symmetrized: bool,
    ) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        let order = self.sweep_order(symmetrized);
        let e = self.error_propagator(&order)?.0;
        let p = DenseMatrix::identity(self.n()).sub(&e);
        Ok((e, p))
    }

    /// `(E, A E)` for the factor order given (first applied = first entry).
    pub(crate) fn error_propagator(
        &self,
        order: &[usize],
    ) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        let a = self.matrix();
        let mut e = DenseMatrix::identity(self.n());
        let mut y = a.clone(); // Y = A E
        for &j in order {
            // Z = A_j^{-1} S_j^T Y
            let w = self.gather_rows(self.test(j), &y);
            let z = self.dec.locals[j].factors.solve_matrix(&w, false)?;
            // E <- E - R_j Z
            let mut rz = DenseMatrix::zeros(self.n(), self.n());
            self.scatter_rows_add(self.trial(j), &z, &mut rz);
            e = e.sub(&rz);
            // Y <- Y - (A R_j) Z
            let ar = match self.trial(j).injection_offset() {
                Some(off) => DenseMatrix::from_fn(self.n(), self.trial(j).local_dim(), |i, c| {
                    a[(i, off + c)]
                }),
                None => a.matmul(self.trial(j).matrix()),
            };
            let arz = ar.matmul(&z);
            y = y.sub(&arz);
        }
        Ok((e, y))
    }

    pub(crate) fn sweep_order(&self, symmetrized: bool) -> Vec<usize> {
        let j = self.subdomain_count();
        let mut order: Vec<usize> = (0..=j).collect();
        if symmetrized {
            order.extend((0..=j).rev());
        }
        order
    }

    /// One multiplicative sweep: successive corrections
    /// `u <- u + R_j A_j^{-1} S_j^T (f - A u)` for `j = 0, 1, ..., J`
    /// (and back down for the symmetrized variant). The induced error map is
    /// exactly `E_mu` (resp. `E_sy`).
    pub fn multiplicative_sweep(&self, u: &[T], f: &[T], symmetrized: bool) -> Result<Vec<T>> {
        let mut x = u.to_vec();
        for j in self.sweep_order(symmetrized) {
            let ax = self.matrix().matvec(&x);
            let residual: Vec<T> = f.iter().zip(&ax).map(|(&fi, &ai)| fi - ai).collect();
            let correction = self.local_correction(j, &residual)?;
            for (xi, &ci) in x.iter_mut().zip(&correction) {
                *xi += ci;
            }
        }
        Ok(x)
    }

    /// Hybrid operators `(P_hy, B_hy)` with
    /// `B_hy = alpha B_0 + (I - alpha P_0) Bhat` and `P_hy = B_hy A`.
    pub fn hybrid_operators(&self) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        if self.subdomain_count() == 0 {
            return Err(Error::NoSubdomains);
        }
        let (b0, bhat) = self.b_split()?;
        let p0 = b0.matmul(self.matrix());
        let correction = DenseMatrix::identity(self.n()).sub(&p0.scale(self.alpha));
        let b_hy = b0.scale(self.alpha).add(&correction.matmul(&bhat));
        let p_hy = b_hy.matmul(self.matrix());
        Ok((p_hy, b_hy))
    }

    /// Adjoint-side hybrid operators `(Q_hy, G_hy)` with
    /// `G_hy = (I - alpha Q_0)(I - Qhat)` and `Q_hy = I - G_hy`.
    pub fn q_side_operators(&self) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
        if self.subdomain_count() == 0 {
            return Err(Error::NoSubdomains);
        }
        let (b0, bhat) = self.b_split()?;
        let at = self.matrix().transpose();
        let q0 = b0.transpose().matmul(&at);
        let qhat = bhat.transpose().matmul(&at);
        let eye = DenseMatrix::identity(self.n());
        let g_hy = eye.sub(&q0.scale(self.alpha)).matmul(&eye.sub(&qhat));
        let q_hy = eye.sub(&g_hy);
        Ok((q_hy, g_hy))
    }

    /// Materialize any tagged operator for analysis.
    pub fn materialize(&self, kind: OperatorKind) -> Result<OperatorMatrix<T>> {
        let matrix = match kind {
            OperatorKind::System => self.matrix().clone(),
            OperatorKind::Projection(j) => self.projection_matrices(j)?.0,
            OperatorKind::AdjointProjection(j) => self.projection_matrices(j)?.1,
            OperatorKind::Additive => self.additive_operators()?.p_ad,
            OperatorKind::AdditiveAdjoint => self.additive_operators()?.q_ad,
            OperatorKind::Preconditioner => self.additive_operators()?.b,
            OperatorKind::PreconditionerAdjoint => self.additive_operators()?.b_adjoint,
            OperatorKind::MultiplicativeError => self.multiplicative_operators(false)?.0,
            OperatorKind::SymmetrizedError => self.multiplicative_operators(true)?.0,
            OperatorKind::Multiplicative => self.multiplicative_operators(false)?.1,
            OperatorKind::Symmetrized => self.multiplicative_operators(true)?.1,
            OperatorKind::Hybrid => self.hybrid_operators()?.0,
            OperatorKind::HybridPreconditioner => self.hybrid_operators()?.1,
        };
        Ok(OperatorMatrix { kind, matrix })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::build_local_solvers;

    fn injection_decomposition(n: usize, split: usize) -> Decomposition<f64> {
        let prolongations = vec![
            Prolongation::injection(n, 0, split),
            Prolongation::injection(n, split, n - split),
        ];
        build_local_solvers(DenseMatrix::identity(n), prolongations).unwrap()
    }

    #[test]
    fn identity_projections_are_orthogonal_blocks() {
        let dec = injection_decomposition(5, 2);
        let ops = SchwarzOperators::new(dec, 1.0);
        let (p0, q0) = ops.projection_matrices(0).unwrap();
        let expect = DenseMatrix::diagonal(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(p0.sub(&expect).max_abs() < 1e-14);
        assert!(q0.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn single_whole_space_solver_inverts() {
        // One "subdomain" covering everything with exact solve: B = A^{-1}.
        let a = DenseMatrix::from_rows(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let prolongations = vec![Prolongation::injection(3, 0, 3)];
        let dec = build_local_solvers(a.clone(), prolongations).unwrap();
        let ops = SchwarzOperators::new(dec, 1.0);
        let add = ops.additive_operators().unwrap();
        let eye = DenseMatrix::<f64>::identity(3);
        assert!(add.p_ad.sub(&eye).frobenius_norm() < 1e-13);
        let ba = add.b.matmul(&a);
        assert!(ba.sub(&eye).frobenius_norm() < 1e-13);
    }

    #[test]
    fn multiplicative_error_vanishes_with_exact_global_solver() {
        let a = DenseMatrix::from_rows(2, 2, &[2.0, 1.0, 0.5, 3.0]);
        let dec = build_local_solvers(a, vec![Prolongation::injection(2, 0, 2)]).unwrap();
        let ops = SchwarzOperators::new(dec, 1.0);
        let (e, p) = ops.multiplicative_operators(false).unwrap();
        assert!(e.frobenius_norm() < 1e-14);
        assert!(p.sub(&DenseMatrix::identity(2)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn symmetrized_order_has_2j_plus_2_factors() {
        let dec = injection_decomposition(6, 3);
        let ops = SchwarzOperators::new(dec, 1.0);
        let order = ops.sweep_order(true);
        assert_eq!(order, vec![0, 1, 1, 0]);
        assert_eq!(order.len(), 2 * ops.subdomain_count() + 2);
    }

    #[test]
    fn hybrid_requires_a_subdomain() {
        let a = DenseMatrix::from_rows(2, 2, &[2.0, 1.0, 0.5, 3.0]);
        let dec = build_local_solvers(a, vec![Prolongation::injection(2, 0, 2)]).unwrap();
        let ops = SchwarzOperators::new(dec, 1.0);
        assert!(matches!(ops.hybrid_operators(), Err(Error::NoSubdomains)));
        assert!(matches!(ops.q_side_operators(), Err(Error::NoSubdomains)));
        assert!(matches!(
            ops.apply_b_hybrid(&[1.0, 1.0]),
            Err(Error::NoSubdomains)
        ));
    }

    #[test]
    fn hybrid_alpha_zero_reduces_to_subdomain_sum() {
        // Coarse slot plus two disjoint subdomain injections on A = I.
        let prolongations = vec![
            Prolongation::injection(4, 0, 2),
            Prolongation::injection(4, 0, 2),
            Prolongation::injection(4, 2, 2),
        ];
        let dec = build_local_solvers(DenseMatrix::identity(4), prolongations).unwrap();
        // alpha = 0 keeps only the subdomain part: P_hy = Phat.
        let ops = SchwarzOperators::new(dec, 0.0);
        let (p_hy, _) = ops.hybrid_operators().unwrap();
        let (p1, _) = ops.projection_matrices(1).unwrap();
        let (p2, _) = ops.projection_matrices(2).unwrap();
        let phat = p1.add(&p2);
        assert!(p_hy.sub(&phat).max_abs() < 1e-14);
    }
}
