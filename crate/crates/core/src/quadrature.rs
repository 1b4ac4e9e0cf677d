//! Gauss-Legendre quadrature and Legendre polynomial evaluation.

use crate::scalar::Real;

/// Gauss-Legendre rule on the reference interval `[-1, 1]`.
///
/// Nodes and weights are computed by Newton iteration in `f64` and then cast
/// to the working scalar; an `n`-point rule integrates polynomials up to
/// degree `2n - 1` exactly.
#[derive(Debug, Clone)]
pub struct GaussRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    pub fn new(points: usize) -> Self {
        assert!(points >= 1, "a quadrature rule needs at least one point");
        let n = points;
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        // Symmetric rule: solve for the non-negative roots only.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_f64(n, x);
                let step = p / d;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_f64(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(T::of).collect(),
            weights: weights.into_iter().map(T::of).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate(&self, a: T, b: T, f: impl Fn(T) -> T) -> T {
        let half = (b - a) * T::of(0.5);
        let mid = (a + b) * T::of(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<T>()
            * half
    }
}

fn legendre_f64(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Legendre polynomial `P_i` at `x` by the three-term recurrence.
pub fn legendre<T: Real>(degree: usize, x: T) -> T {
    let mut p0 = T::one();
    if degree == 0 {
        return p0;
    }
    let mut p1 = x;
    for k in 2..=degree {
        let kf = T::of(k as f64);
        let two = T::of(2.0);
        let p2 = ((two * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Derivative `P_i'` at `x`, valid at the endpoints as well.
pub fn legendre_derivative<T: Real>(degree: usize, x: T) -> T {
    // P_k' = (2k-1) P_{k-1} + P_{k-2}'
    let mut dp_prev = T::zero();
    if degree == 0 {
        return dp_prev;
    }
    let mut dp = T::one();
    for k in 2..=degree {
        let coeff = T::of((2 * k - 1) as f64);
        let next = coeff * legendre(k - 1, x) + dp_prev;
        dp_prev = dp;
        dp = next;
    }
    dp
}

/// Values of `P_0 .. P_r` at `x` in one recurrence pass.
pub fn legendre_all<T: Real>(max_degree: usize, x: T) -> Vec<T> {
    let mut vals = Vec::with_capacity(max_degree + 1);
    vals.push(T::one());
    if max_degree == 0 {
        return vals;
    }
    vals.push(x);
    for k in 2..=max_degree {
        let kf = T::of(k as f64);
        let two = T::of(2.0);
        let p2 = ((two * kf - T::one()) * x * vals[k - 1] - (kf - T::one()) * vals[k - 2]) / kf;
        vals.push(p2);
    }
    vals
}

/// Derivatives of `P_0 .. P_r` at `x`.
pub fn legendre_derivative_all<T: Real>(max_degree: usize, x: T) -> Vec<T> {
    let vals = legendre_all(max_degree, x);
    let mut derivs = Vec::with_capacity(max_degree + 1);
    derivs.push(T::zero());
    if max_degree == 0 {
        return derivs;
    }
    derivs.push(T::one());
    for k in 2..=max_degree {
        let coeff = T::of((2 * k - 1) as f64);
        let d = coeff * vals[k - 1] + derivs[k - 2];
        derivs.push(d);
    }
    derivs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let rule = GaussRule::<f64>::new(3);
        // degree 5 is exact for a 3-point rule
        let exact = 1.0 / 6.0 + 1.0 / 4.0; // int_0^1 (x^5 + x^3)
        let got = rule.integrate(0.0, 1.0, |x| x.powi(5) + x.powi(3));
        assert!((got - exact).abs() < 1e-15);
    }

    #[test]
    fn rule_weights_sum_to_interval_length() {
        for n in 1..=8 {
            let rule = GaussRule::<f64>::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}: {s}");
        }
    }

    #[test]
    fn legendre_endpoint_values() {
        for r in 0..6 {
            assert!((legendre(r, 1.0f64) - 1.0).abs() < 1e-14);
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            assert!((legendre(r, -1.0f64) - sign).abs() < 1e-14);
            // P_r'(1) = r(r+1)/2
            let expect = (r * (r + 1)) as f64 / 2.0;
            assert!((legendre_derivative(r, 1.0f64) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn legendre_orthogonality() {
        let rule = GaussRule::<f64>::new(6);
        for i in 0..4 {
            for j in 0..4 {
                let val = rule.integrate(-1.0, 1.0, |x| legendre(i, x) * legendre(j, x));
                let expect = if i == j {
                    2.0 / (2.0 * i as f64 + 1.0)
                } else {
                    0.0
                };
                assert!((val - expect).abs() < 1e-14, "({i},{j}): {val}");
            }
        }
    }

    #[test]
    fn batch_evaluations_match_single() {
        let xs = [-0.9f64, -0.3, 0.2, 0.7];
        for &x in &xs {
            let vals = legendre_all(5, x);
            let ders = legendre_derivative_all(5, x);
            for r in 0..=5 {
                assert!((vals[r] - legendre(r, x)).abs() < 1e-14);
                assert!((ders[r] - legendre_derivative(r, x)).abs() < 1e-12);
            }
        }
    }
}
