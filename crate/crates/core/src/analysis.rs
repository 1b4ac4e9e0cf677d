//! Spectral diagnostics: A-norm operator norms and condition numbers,
//! spectra, Elman constants and inf-sup constants.
//!
//! The underlying trial/test norms are Euclidean coefficient norms, so the
//! induced vector norm is `||v||_A = ||A v||_2` and every operator norm below
//! reduces to a singular-value computation.

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, lu_factor, norm2, singular_extremes, symmetric_eigenvalues, DenseMatrix, Spectrum,
};
use crate::operators::{OperatorKind, SchwarzOperators};
use crate::scalar::Real;

/// Everything measured about one operator in one place.
#[derive(Debug, Clone)]
pub struct AnalysisReport<T> {
    pub kind: OperatorKind,
    /// `kappa_A = ||P||_A ||P^{-1}||_A`; absent when `P` is numerically
    /// singular (error propagators routinely are).
    pub kappa_a: Option<T>,
    pub op_norm_a: T,
    pub inv_op_norm_a: Option<T>,
    pub spectrum: Spectrum<T>,
    pub spectral_radius: T,
    /// `||E||_A` when the analyzed operator is an error propagator.
    pub e_mu_norm_a: Option<T>,
    /// Smallest eigenvalue of the symmetric part.
    pub c_p: T,
    /// Operator 2-norm.
    pub big_c_p: T,
    pub indefinite: bool,
    /// `sqrt(1 - c_p^2 / C_p^2)` when `c_p > 0`.
    pub elman_bound_factor: Option<T>,
    /// Inf-sup constants of the system matrix under Euclidean norms.
    pub gamma_a: T,
    pub beta_a: T,
    pub big_c_a: T,
    /// Largest pairwise eigenvalue distance (spectrum spread).
    pub diameter: T,
}

/// Weak-coercivity-induced vector norm `||v||_A = ||A v||_2`.
pub fn a_norm<T: Real>(a: &DenseMatrix<T>, v: &[T]) -> Result<T> {
    if v.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            found: v.len(),
        });
    }
    Ok(norm2(&a.matvec(v)))
}

/// Similarity transform `A P A^{-1}` with the inverse applied column-wise
/// through the factorization of `A`.
fn similarity_transform<T: Real>(a: &DenseMatrix<T>, p: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let factors = lu_factor(a)?;
    let ap = a.matmul(p);
    // C A = A P  <=>  A^T C^T = (A P)^T
    let ct = factors.solve_matrix(&ap.transpose(), true)?;
    Ok(ct.transpose())
}

/// Operator A-norm `||P||_A = sup ||P v||_A / ||v||_A = sigma_max(A P A^{-1})`.
pub fn operator_a_norm<T: Real>(a: &DenseMatrix<T>, p: &DenseMatrix<T>) -> Result<T> {
    let c = similarity_transform(a, p)?;
    Ok(singular_extremes(&c)?.0)
}

/// Condition number `kappa_A(P) = ||P||_A ||P^{-1}||_A`, with `P^{-1}`
/// applied through its LU factorization (never formed explicitly).
pub fn condition_number_a<T: Real>(a: &DenseMatrix<T>, p: &DenseMatrix<T>) -> Result<T> {
    let (sigma_max, sigma_min) = singular_extremes(p)?;
    let threshold = T::of(p.rows() as f64) * T::of(1e-14) * sigma_max;
    if sigma_min <= threshold {
        return Err(Error::SingularOperator {
            sigma_min: sigma_min.as_f64(),
            sigma_max: sigma_max.as_f64(),
        });
    }
    let norm = operator_a_norm(a, p)?;
    let inv_norm = inverse_operator_a_norm(a, p)?;
    Ok(norm * inv_norm)
}

/// `||P^{-1}||_A = sigma_max(A P^{-1} A^{-1})`.
fn inverse_operator_a_norm<T: Real>(a: &DenseMatrix<T>, p: &DenseMatrix<T>) -> Result<T> {
    let p_factors = lu_factor(p)?;
    let a_factors = lu_factor(a)?;
    // K = A P^{-1}  <=>  P^T K^T = A^T
    let kt = p_factors.solve_matrix(&a.transpose(), true)?;
    let k = kt.transpose();
    // C = K A^{-1}  <=>  A^T C^T = K^T
    let ct = a_factors.solve_matrix(&k.transpose(), true)?;
    Ok(singular_extremes(&ct.transpose())?.0)
}

/// Elman constants: `c_p` is the smallest eigenvalue of the symmetric part,
/// `C_p` the operator 2-norm.
pub fn elman_constants<T: Real>(m: &DenseMatrix<T>) -> Result<(T, T)> {
    m.check_square()?;
    let sym = m.symmetric_part();
    let eigs = symmetric_eigenvalues(&sym)?;
    let c_p = eigs[0];
    let big_c_p = singular_extremes(m)?.0;
    Ok((c_p, big_c_p))
}

/// GMRES bound factor `sqrt(1 - c_p^2 / C_p^2)`; `None` when the symmetric
/// part is not positive definite.
pub fn elman_bound_factor<T: Real>(c_p: T, big_c_p: T) -> Option<T> {
    if c_p > T::zero() {
        Some(
            (T::one() - (c_p / big_c_p) * (c_p / big_c_p))
                .max(T::zero())
                .sqrt(),
        )
    } else {
        None
    }
}

/// Inf-sup constants under Euclidean norms: the sup-inf quotients collapse to
/// the extremal singular values, giving `gamma_a = beta_a = sigma_min(A)` and
/// `C_a = sigma_max(A)`.
pub fn inf_sup_constants<T: Real>(a: &DenseMatrix<T>) -> Result<(T, T, T)> {
    a.check_square()?;
    let (sigma_max, sigma_min) = singular_extremes(a)?;
    Ok((sigma_min, sigma_min, sigma_max))
}

/// Full spectral report for one operator of the Schwarz family.
pub fn spectrum_report<T: Real>(
    ops: &SchwarzOperators<T>,
    kind: OperatorKind,
) -> Result<AnalysisReport<T>> {
    let operator = ops.materialize(kind)?;
    let a = ops.matrix();
    let m = &operator.matrix;

    let spectrum = eigenvalues(m)?;
    let spectral_radius = spectrum.spectral_radius();
    let diameter = spectrum.diameter();

    let op_norm_a = operator_a_norm(a, m)?;
    let (inv_op_norm_a, kappa_a) = match invertibility_check(m)? {
        true => {
            let inv = inverse_operator_a_norm(a, m)?;
            (Some(inv), Some(op_norm_a * inv))
        }
        false => (None, None),
    };

    let (c_p, big_c_p) = elman_constants(m)?;
    let (gamma_a, beta_a, big_c_a) = inf_sup_constants(a)?;

    let e_mu_norm_a = match kind {
        OperatorKind::MultiplicativeError | OperatorKind::SymmetrizedError => Some(op_norm_a),
        _ => None,
    };

    Ok(AnalysisReport {
        kind,
        kappa_a,
        op_norm_a,
        inv_op_norm_a,
        spectrum,
        spectral_radius,
        e_mu_norm_a,
        c_p,
        big_c_p,
        indefinite: c_p <= T::zero(),
        elman_bound_factor: elman_bound_factor(c_p, big_c_p),
        gamma_a,
        beta_a,
        big_c_a,
        diameter,
    })
}

fn invertibility_check<T: Real>(p: &DenseMatrix<T>) -> Result<bool> {
    let (sigma_max, sigma_min) = singular_extremes(p)?;
    let threshold = T::of(p.rows() as f64) * T::of(1e-14) * sigma_max;
    Ok(sigma_min > threshold)
}
