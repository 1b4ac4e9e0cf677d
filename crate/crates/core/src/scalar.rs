//! Scalar abstraction for the numerical kernels.
//!
//! Everything in this crate is generic over [`Real`], which is satisfied by
//! `f32` and `f64`. The validated configurations run in `f64`; the crate root
//! exports concrete `f64` aliases for the common types.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Floating-point scalar used by all matrices, meshes and solvers.
pub trait Real:
    Float
    + NumAssignOps
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Convert an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Lossy conversion back to `f64`, used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use crate::dg::{DGSystem, ProblemConfig};
    use crate::linalg::{lu_factor, singular_extremes, DenseMatrix};

    // The whole pipeline instantiates at f32; accuracy claims stay with f64.
    #[test]
    fn single_precision_pipeline_compiles_and_runs() {
        let cfg = ProblemConfig::<f32>::convection_test(10.0);
        let system = DGSystem::assemble(&cfg, 8).unwrap();
        let u = system.solve_direct().unwrap();
        let residual: f32 = system
            .matrix
            .matvec(&u)
            .iter()
            .zip(&system.load)
            .map(|(a, f)| (a - f) * (a - f))
            .sum::<f32>()
            .sqrt();
        assert!(residual < 1e-2, "residual {residual}");

        let eye = DenseMatrix::<f32>::identity(4);
        assert!(lu_factor(&eye).is_ok());
        let (smax, smin) = singular_extremes(&eye).unwrap();
        assert!((smax - 1.0).abs() < 1e-6 && (smin - 1.0).abs() < 1e-6);
    }
}
