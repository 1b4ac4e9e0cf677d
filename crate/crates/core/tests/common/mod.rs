//! Shared helpers for the integration tests: seeded randomness,
//! error measures and standard problem setups.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schwarz_core::decomposition::{two_level_decomposition, Decomposition, Partition};
use schwarz_core::dg::{DGSystem, ProblemConfig};
use schwarz_core::linalg::DenseMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<f64> {
    let entries: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::from_rows(n, n, &entries)
}

/// Random matrix with a dominant diagonal, safely invertible.
pub fn random_well_conditioned(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix<f64> {
    let mut m = random_matrix(rng, n);
    for i in 0..n {
        let boost = n as f64 + rng.random_range(0.0..1.0);
        m[(i, i)] += boost;
    }
    m
}

pub fn rel_vec_err(got: &[f64], want: &[f64]) -> f64 {
    let num: f64 = got
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

pub fn frob_rel(got: &DenseMatrix<f64>, want: &DenseMatrix<f64>) -> f64 {
    let den = want.frobenius_norm();
    let num = got.sub(want).frobenius_norm();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Desk-scale convection test setup: `eps = gamma = 1`, default penalty.
pub fn desk_system(b: f64, elements: usize) -> DGSystem<f64> {
    let cfg = ProblemConfig::<f64>::convection_test(b);
    DGSystem::assemble(&cfg, elements).unwrap()
}

pub fn desk_decomposition(
    system: &DGSystem<f64>,
    coarse_m: usize,
    j_count: usize,
) -> (Partition, Decomposition<f64>) {
    two_level_decomposition(&system.space, &system.matrix, coarse_m, j_count).unwrap()
}

/// Adaptive Simpson quadrature, used as an independent integration oracle.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let m = 0.5 * (a + b);
        (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b))
    }
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth > 40 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, tol / 2.0, depth + 1)
                + recurse(f, m, b, right, tol / 2.0, depth + 1)
        }
    }
    recurse(f, a, b, simpson(f, a, b), tol, 0)
}
