//! Eigenvalue computations: Francis double-shift QR for general real matrices
//! and implicit-shift QL for symmetric ones.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::DenseMatrix;

const MAX_QR_SWEEPS: usize = 60;

/// Full eigenvalue set of a real matrix.
///
/// Complex eigenvalues of a real matrix come in conjugate pairs; the list is
/// sorted by real part, then imaginary part, for reproducible output.
#[derive(Debug, Clone)]
pub struct Spectrum<T> {
    eigenvalues: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn spectral_radius(&self) -> T {
        self.eigenvalues
            .iter()
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest pairwise distance between eigenvalues in the complex plane.
    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for (i, a) in self.eigenvalues.iter().enumerate() {
            for b in &self.eigenvalues[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Product of all eigenvalues (equals the determinant for a full set).
    pub fn product(&self) -> Complex<T> {
        self.eigenvalues
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, z| acc * z)
    }
}

/// All eigenvalues of a square real matrix via balancing, Hessenberg
/// reduction and the double-shift QR iteration.
pub fn eigenvalues<T: Real>(matrix: &DenseMatrix<T>) -> Result<Spectrum<T>> {
    matrix.check_square()?;
    let n = matrix.rows();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
        });
    }
    let mut work = matrix.clone();
    balance(&mut work);
    hessenberg(&mut work);
    let mut eigenvalues = hqr(&mut work)?;
    eigenvalues.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(Spectrum { eigenvalues })
}

/// Spectral radius `max |lambda|`.
pub fn spectral_radius<T: Real>(matrix: &DenseMatrix<T>) -> Result<T> {
    Ok(eigenvalues(matrix)?.spectral_radius())
}

/// Eigenvalues of a symmetric matrix, ascending, via Householder
/// tridiagonalization and the implicit-shift QL iteration.
pub fn symmetric_eigenvalues<T: Real>(matrix: &DenseMatrix<T>) -> Result<Vec<T>> {
    matrix.check_square()?;
    let n = matrix.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, e) = tridiagonalize(matrix);
    tql(&mut d, &e)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

fn sign_of<T: Real>(magnitude: T, sign_source: T) -> T {
    if sign_source >= T::zero() {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Similarity scaling so that row and column norms roughly agree; improves
/// eigenvalue accuracy for badly scaled (e.g. strongly convective) matrices.
fn balance<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.rows();
    let radix = T::of(2.0);
    let radix_sq = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                let mut c_scaled = c;
                while c_scaled < g {
                    f *= radix;
                    c_scaled *= radix_sq;
                }
                g = r * radix;
                while c_scaled > g {
                    f /= radix;
                    c_scaled /= radix_sq;
                }
                if (c_scaled + r) / f < T::of(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 0..n {
                        a[(i, j)] *= g;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Reduce to upper Hessenberg form by stabilized elementary similarity
/// transformations; entries below the subdiagonal are zeroed afterwards.
fn hessenberg<T: Real>(a: &mut DenseMatrix<T>) {
    let n = a.rows();
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut pivot = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                pivot = j;
            }
        }
        if pivot != m {
            a.swap_rows(m, pivot);
            for j in 0..n {
                let tmp = a[(j, pivot)];
                a[(j, pivot)] = a[(j, m)];
                a[(j, m)] = tmp;
            }
        }
        if x != T::zero() {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != T::zero() {
                    y /= x;
                    a[(i, m - 1)] = T::zero();
                    for j in m..n {
                        let delta = y * a[(m, j)];
                        a[(i, j)] -= delta;
                    }
                    for j in 0..n {
                        let delta = y * a[(j, i)];
                        a[(j, m)] += delta;
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = T::zero();
        }
    }
}

/// Double-shift QR on an upper Hessenberg matrix (values only).
fn hqr<T: Real>(h: &mut DenseMatrix<T>) -> Result<Vec<Complex<T>>> {
    let size = h.rows();
    let mut d = vec![T::zero(); size];
    let mut e = vec![T::zero(); size];
    let eps = T::epsilon();

    let mut norm = T::zero();
    for i in 0..size {
        for j in i.saturating_sub(1)..size {
            norm += h[(i, j)].abs();
        }
    }
    if norm == T::zero() {
        return Ok(vec![Complex::new(T::zero(), T::zero()); size]);
    }

    let mut n = size as isize - 1;
    let mut exshift = T::zero();
    let mut iter = 0usize;

    // Subdiagonal entries below this are roundoff at the matrix scale; the
    // absolute fallback keeps clustered spectra (P_ad concentrates at 1)
    // from stalling the local relative test after the cluster deflates.
    let floor = eps * norm;

    while n >= 0 {
        let nu = n as usize;
        // Look for a single small subdiagonal element.
        let mut l = nu;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == T::zero() {
                s = norm;
            }
            let sub = h[(l, l - 1)].abs();
            if sub < eps * s || sub <= floor {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One real root found.
            h[(nu, nu)] += exshift;
            d[nu] = h[(nu, nu)];
            e[nu] = T::zero();
            n -= 1;
            iter = 0;
        } else if l == nu - 1 {
            // Two roots found (real pair or complex conjugates).
            let w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            let p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) * T::of(0.5);
            let q = p * p + w;
            let mut z = q.abs().sqrt();
            h[(nu, nu)] += exshift;
            h[(nu - 1, nu - 1)] += exshift;
            let x = h[(nu, nu)];
            if q >= T::zero() {
                z = if p >= T::zero() { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = if z != T::zero() { x - w / z } else { d[nu - 1] };
                e[nu - 1] = T::zero();
                e[nu] = T::zero();
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // No convergence yet; perform one double QR sweep.
            let mut x = h[(nu, nu)];
            let mut y = T::zero();
            let mut w = T::zero();
            if l < nu {
                y = h[(nu - 1, nu - 1)];
                w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            }
            if iter == 10 || iter == 20 {
                // Exceptional shift.
                exshift += x;
                for i in l..=nu {
                    h[(i, i)] -= x;
                }
                let s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = T::of(0.75) * s;
                y = x;
                w = T::of(-0.4375) * s * s;
            }
            if iter == 30 {
                let mut s = (y - x) * T::of(0.5);
                s = s * s + w;
                if s > T::zero() {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) * T::of(0.5) + s);
                    for i in l..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = T::of(0.964);
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_QR_SWEEPS {
                return Err(Error::ConvergenceFailure(MAX_QR_SWEEPS));
            }

            // Look for two consecutive small subdiagonal elements.
            let (mut p, mut q, mut r, mut z): (T, T, T, T);
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                let mut s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let lhs = h[(m, m - 1)].abs() * (q.abs() + r.abs());
                let rhs =
                    eps * p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                h[(i, i - 2)] = T::zero();
                if i > m + 2 {
                    h[(i, i - 3)] = T::zero();
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast {
                        h[(k + 2, k - 1)]
                    } else {
                        T::zero()
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == T::zero() {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            h[(k, k - 1)] = -h[(k, k - 1)];
                        }
                    } else {
                        h[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..=nu {
                        let mut pp = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            pp += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= pp * z;
                        }
                        h[(k + 1, j)] -= pp * y;
                        h[(k, j)] -= pp * x;
                    }
                    let upper = nu.min(k + 3);
                    for i in l..=upper {
                        let mut pp = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            pp += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= pp * r;
                        }
                        h[(i, k + 1)] -= pp * q;
                        h[(i, k)] -= pp;
                    }
                }
            }
        }
    }

    Ok(d.into_iter()
        .zip(e)
        .map(|(re, im)| Complex::new(re, im))
        .collect())
}

/// Householder tridiagonalization of a symmetric matrix; returns the diagonal
/// and subdiagonal of the reduced matrix.
fn tridiagonalize<T: Real>(matrix: &DenseMatrix<T>) -> (Vec<T>, Vec<T>) {
    let n = matrix.rows();
    let mut a = matrix.clone();
    let mut sub = vec![T::zero(); n.saturating_sub(1)];
    let two = T::of(2.0);

    for k in 0..n.saturating_sub(2) {
        let mut norm_sq = T::zero();
        for i in k + 1..n {
            norm_sq += a[(i, k)] * a[(i, k)];
        }
        let norm = norm_sq.sqrt();
        if norm == T::zero() {
            sub[k] = T::zero();
            continue;
        }
        let alpha = if a[(k + 1, k)] > T::zero() {
            -norm
        } else {
            norm
        };

        // Householder vector on indices k+1..n.
        let mut v = vec![T::zero(); n];
        v[k + 1] = a[(k + 1, k)] - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let beta: T = (k + 1..n).map(|i| v[i] * v[i]).sum();
        if beta == T::zero() {
            sub[k] = alpha;
            continue;
        }

        // p = 2 A v / beta on the trailing block, then rank-2 update.
        let mut p = vec![T::zero(); n];
        for i in k + 1..n {
            let mut s = T::zero();
            for j in k + 1..n {
                s += a[(i, j)] * v[j];
            }
            p[i] = two * s / beta;
        }
        let vp: T = (k + 1..n).map(|i| v[i] * p[i]).sum();
        let kappa = vp / beta;
        for i in k + 1..n {
            p[i] -= kappa * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let delta = v[i] * p[j] + p[i] * v[j];
                a[(i, j)] -= delta;
            }
        }
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = T::zero();
            a[(k, i)] = T::zero();
        }
        sub[k] = alpha;
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1, n - 2)];
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    (diag, sub)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
fn tql<T: Real>(d: &mut [T], e_in: &[T]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(&e_in[..n - 1]);

    // Deflation threshold tracks the running matrix scale so eigenvalues at
    // roundoff level deflate instead of stalling the iteration.
    let mut scale = T::zero();
    for l in 0..n {
        scale = scale.max(d[l].abs() + e[l].abs());
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                if e[m].abs() <= T::epsilon() * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QR_SWEEPS {
                return Err(Error::ConvergenceFailure(MAX_QR_SWEEPS));
            }
            let mut g = (d[l + 1] - d[l]) / (T::of(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + T::of(2.0) * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
