//! Singular values via Householder bidiagonalization and the Golub-Reinsch
//! QR iteration. Only the values are computed; no singular vectors.

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::DenseMatrix;

const MAX_SVD_SWEEPS: usize = 75;

/// All singular values of a (possibly rectangular) matrix, descending.
pub fn singular_values<T: Real>(matrix: &DenseMatrix<T>) -> Result<Vec<T>> {
    // Work on the tall orientation; singular values are transpose-invariant.
    let a = if matrix.rows() >= matrix.cols() {
        matrix.clone()
    } else {
        matrix.transpose()
    };
    let mut values = golub_reinsch(a)?;
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(values)
}

/// Largest and smallest singular values.
pub fn singular_extremes<T: Real>(matrix: &DenseMatrix<T>) -> Result<(T, T)> {
    let values = singular_values(matrix)?;
    match (values.first(), values.last()) {
        (Some(&max), Some(&min)) => Ok((max, min)),
        _ => Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        }),
    }
}

fn sign_of<T: Real>(magnitude: T, sign_source: T) -> T {
    if sign_source >= T::zero() {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

fn golub_reinsch<T: Real>(mut a: DenseMatrix<T>) -> Result<Vec<T>> {
    let m = a.rows();
    let n = a.cols();
    if n == 0 || m == 0 {
        return Ok(Vec::new());
    }
    let mut w = vec![T::zero(); n];
    let mut rv1 = vec![T::zero(); n];
    let mut anorm = T::zero();
    let mut g = T::zero();
    let mut scale = T::zero();

    // Householder reduction to bidiagonal form.
    for i in 0..n {
        let l = i + 1;
        rv1[i] = scale * g;
        g = T::zero();
        scale = T::zero();
        if i < m {
            for k in i..m {
                scale += a[(k, i)].abs();
            }
            if scale != T::zero() {
                let mut s = T::zero();
                for k in i..m {
                    a[(k, i)] /= scale;
                    s += a[(k, i)] * a[(k, i)];
                }
                let f = a[(i, i)];
                g = -sign_of(s.sqrt(), f);
                let h = f * g - s;
                a[(i, i)] = f - g;
                for j in l..n {
                    let mut s = T::zero();
                    for k in i..m {
                        s += a[(k, i)] * a[(k, j)];
                    }
                    let f = s / h;
                    for k in i..m {
                        let delta = f * a[(k, i)];
                        a[(k, j)] += delta;
                    }
                }
                for k in i..m {
                    a[(k, i)] *= scale;
                }
            }
        }
        w[i] = scale * g;
        g = T::zero();
        scale = T::zero();
        if i < m && i != n - 1 {
            for k in l..n {
                scale += a[(i, k)].abs();
            }
            if scale != T::zero() {
                let mut s = T::zero();
                for k in l..n {
                    a[(i, k)] /= scale;
                    s += a[(i, k)] * a[(i, k)];
                }
                let f = a[(i, l)];
                g = -sign_of(s.sqrt(), f);
                let h = f * g - s;
                a[(i, l)] = f - g;
                for k in l..n {
                    rv1[k] = a[(i, k)] / h;
                }
                for j in l..m {
                    let mut s = T::zero();
                    for k in l..n {
                        s += a[(j, k)] * a[(i, k)];
                    }
                    for k in l..n {
                        let delta = s * rv1[k];
                        a[(j, k)] += delta;
                    }
                }
                for k in l..n {
                    a[(i, k)] *= scale;
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Diagonalize the bidiagonal form.
    for k in (0..n).rev() {
        let mut its = 0usize;
        loop {
            its += 1;
            if its > MAX_SVD_SWEEPS {
                return Err(Error::ConvergenceFailure(MAX_SVD_SWEEPS));
            }

            // Test for splitting: rv1[0] is always zero, so l = 0 always splits.
            let mut flag = true;
            let mut l = k;
            loop {
                if l == 0 || rv1[l].abs() + anorm == anorm {
                    flag = false;
                    break;
                }
                if w[l - 1].abs() + anorm == anorm {
                    break;
                }
                l -= 1;
            }
            if flag {
                // w[l-1] is negligible: cancel rv1[l] with Givens rotations.
                let mut c = T::zero();
                let mut s = T::one();
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] = c * rv1[i];
                    if f.abs() + anorm == anorm {
                        break;
                    }
                    let g1 = w[i];
                    let h = f.hypot(g1);
                    w[i] = h;
                    let inv_h = T::one() / h;
                    c = g1 * inv_h;
                    s = -f * inv_h;
                }
            }

            let z = w[k];
            if l == k {
                // Converged; singular values are reported non-negative.
                if z < T::zero() {
                    w[k] = -z;
                }
                break;
            }

            // Shift from the trailing 2x2 minor, then one implicit QR sweep.
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (T::of(2.0) * h * y);
            g = f.hypot(T::one());
            f = ((x - z) * (x + z) + h * (y / (f + sign_of(g, f)) - h)) / x;
            let mut c = T::one();
            let mut s = T::one();
            for j in l..=nm {
                let i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g = c * g;
                let mut zz = f.hypot(h);
                rv1[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                zz = f.hypot(h);
                w[j] = zz;
                if zz != T::zero() {
                    let inv = T::one() / zz;
                    c = f * inv;
                    s = h * inv;
                }
                f = c * g + s * y;
                x = c * y - s * g;
            }
            rv1[l] = T::zero();
            rv1[k] = f;
            w[k] = x;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_singular_values() {
        let (max, min) = singular_extremes(&DenseMatrix::<f64>::identity(4)).unwrap();
        assert!((max - 1.0).abs() < 1e-14);
        assert!((min - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_extremes() {
        let m = DenseMatrix::diagonal(&[3.0f64, 1.0, 0.5]);
        let (max, min) = singular_extremes(&m).unwrap();
        assert!((max - 3.0).abs() < 1e-14);
        assert!((min - 0.5).abs() < 1e-14);
    }
}
