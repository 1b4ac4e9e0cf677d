//! Interior-penalty DG discretization of the 1-D convection-diffusion problem
//!
//! ```text
//!   -(eps u')' + b u' + c u = f   on (x_l, x_r),   u = 0 on the boundary,
//! ```
//!
//! with constant diffusion `eps`, constant convection `b` and reaction
//! `c = gamma` (the divergence of a constant field vanishes). The scheme uses
//! a per-element shifted Legendre modal basis of degree `r`, upwind convective
//! fluxes on interior edges, an outflow boundary term, and jump penalties with
//! weight `c_e * eps / |e|`.
//!
//! Penalty and consistency terms are applied on the full mesh skeleton by
//! default; `boundary_only_penalty` restricts them to the two boundary points
//! for comparison runs.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, DenseMatrix};
use crate::mesh::{build_mesh, Mesh1D};
use crate::quadrature::{legendre_all, legendre_derivative_all, GaussRule};
use crate::scalar::Real;

/// Named manufactured solutions with exact data for convergence studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manufactured {
    /// `u = sin(pi x)`
    Sin,
    /// `u = x (1 - x)`
    Poly,
    /// `u = x - (e^{bx/eps} - 1) / (e^{b/eps} - 1)`, the convection boundary layer
    BoundaryLayer,
}

impl Manufactured {
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Self::Sin),
            "poly" => Some(Self::Poly),
            "boundary-layer" => Some(Self::BoundaryLayer),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Sin => "sin",
            Self::Poly => "poly",
            Self::BoundaryLayer => "boundary-layer",
        }
    }

    pub fn exact<T: Real>(&self, cfg: &ProblemConfig<T>, x: T) -> T {
        match self {
            Self::Sin => (T::of(std::f64::consts::PI) * x).sin(),
            Self::Poly => x * (T::one() - x),
            Self::BoundaryLayer => x - boundary_layer_ratio(cfg, x),
        }
    }

    pub fn exact_derivative<T: Real>(&self, cfg: &ProblemConfig<T>, x: T) -> T {
        let pi = T::of(std::f64::consts::PI);
        match self {
            Self::Sin => pi * (pi * x).cos(),
            Self::Poly => T::one() - T::of(2.0) * x,
            Self::BoundaryLayer => T::one() - boundary_layer_ratio_derivative(cfg, x),
        }
    }

    /// Source `f = -eps u'' + b u' + gamma u` for the manufactured solution.
    pub fn source<T: Real>(&self, cfg: &ProblemConfig<T>, x: T) -> T {
        let pi = T::of(std::f64::consts::PI);
        let (eps, b, gamma) = (cfg.epsilon, cfg.convection, cfg.gamma);
        match self {
            Self::Sin => (eps * pi * pi + gamma) * (pi * x).sin() + b * pi * (pi * x).cos(),
            Self::Poly => {
                T::of(2.0) * eps + b * (T::one() - T::of(2.0) * x) + gamma * x * (T::one() - x)
            }
            // The exponential terms cancel between -eps u'' and b u'.
            Self::BoundaryLayer => b + gamma * self.exact(cfg, x),
        }
    }
}

/// `(e^{bx/eps} - 1) / (e^{b/eps} - 1)` in overflow-safe form.
fn boundary_layer_ratio<T: Real>(cfg: &ProblemConfig<T>, x: T) -> T {
    let rate = cfg.convection / cfg.epsilon;
    if rate.abs() < T::of(1e-12) {
        return x;
    }
    if rate > T::zero() {
        // Rescale by e^{-b/eps} so every exponent is non-positive.
        let num = (rate * (x - T::one())).exp() - (-rate).exp();
        let den = T::one() - (-rate).exp();
        num / den
    } else {
        ((rate * x).exp() - T::one()) / (rate.exp() - T::one())
    }
}

fn boundary_layer_ratio_derivative<T: Real>(cfg: &ProblemConfig<T>, x: T) -> T {
    let rate = cfg.convection / cfg.epsilon;
    if rate.abs() < T::of(1e-12) {
        return T::one();
    }
    if rate > T::zero() {
        rate * (rate * (x - T::one())).exp() / (T::one() - (-rate).exp())
    } else {
        rate * (rate * x).exp() / (rate.exp() - T::one())
    }
}

/// Right-hand side of the PDE.
#[derive(Clone)]
pub enum SourceTerm<T> {
    Zero,
    Constant(T),
    Manufactured(Manufactured),
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: Real> SourceTerm<T> {
    pub fn evaluate(&self, cfg: &ProblemConfig<T>, x: T) -> T {
        match self {
            Self::Zero => T::zero(),
            Self::Constant(c) => *c,
            Self::Manufactured(case) => case.source(cfg, x),
            Self::Custom(f) => f(x),
        }
    }
}

impl<T> std::fmt::Debug for SourceTerm<T>
where
    T: std::fmt::Debug,
{
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Constant(c) => write!(f, "Constant({c:?})"),
            Self::Manufactured(m) => write!(f, "Manufactured({m:?})"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// PDE coefficients plus discretization parameters.
#[derive(Debug, Clone)]
pub struct ProblemConfig<T> {
    /// Diffusion coefficient `eps > 0`.
    pub epsilon: T,
    /// Constant convection speed `b`.
    pub convection: T,
    /// Reaction coefficient; with constant convection `c = gamma`.
    pub gamma: T,
    pub domain: (T, T),
    pub source: SourceTerm<T>,
    /// Penalty constant `c_e` in the jump weight `c_e * eps / |e|`.
    pub penalty_ce: T,
    /// Polynomial degree `r >= 1`.
    pub degree: usize,
    /// Restrict penalty and consistency terms to the boundary points.
    pub boundary_only_penalty: bool,
}

impl<T: Real> ProblemConfig<T> {
    /// Coefficients for one of the convection-dominated test problems
    /// (`eps = 1`, `gamma = 1`, default penalty `10 (r+1)^2`, degree 1).
    pub fn convection_test(b: f64) -> Self {
        Self {
            epsilon: T::one(),
            convection: T::of(b),
            gamma: T::one(),
            domain: (T::zero(), T::one()),
            source: SourceTerm::Manufactured(Manufactured::Sin),
            penalty_ce: default_penalty::<T>(1),
            degree: 1,
            boundary_only_penalty: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        // The comparisons also reject NaN parameters.
        let positive =
            |x: T| matches!(x.partial_cmp(&T::zero()), Some(std::cmp::Ordering::Greater));
        if !positive(self.epsilon) || !positive(self.penalty_ce) || self.degree == 0 {
            return Err(Error::NonNestedMeshes(
                "invalid problem parameters: need epsilon > 0, penalty_ce > 0, degree >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn source_value(&self, x: T) -> T {
        self.source.evaluate(self, x)
    }
}

/// Default penalty constant `(r+1)^2 / 2`.
///
/// Scales with the degree as interior-penalty coercivity requires, but stays
/// small: in 1-D the symmetric part of the diffusive block is already
/// positive definite here, and larger constants push the spectral radius of
/// the multiplicative error propagator above one once subdomains shrink to
/// single coarse cells.
pub fn default_penalty<T: Real>(degree: usize) -> T {
    T::of(((degree + 1) * (degree + 1)) as f64 / 2.0)
}

/// Discontinuous piecewise-polynomial space of degree `r` on a mesh,
/// spanned per element by shifted Legendre modes.
#[derive(Debug, Clone)]
pub struct DGSpace<T> {
    mesh: Mesh1D<T>,
    degree: usize,
}

impl<T: Real> DGSpace<T> {
    pub fn new(mesh: Mesh1D<T>, degree: usize) -> Self {
        assert!(degree >= 1, "DG degree must be at least 1");
        Self { mesh, degree }
    }

    pub fn mesh(&self) -> &Mesh1D<T> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modes_per_element(&self) -> usize {
        self.degree + 1
    }

    pub fn ndofs(&self) -> usize {
        self.mesh.element_count() * self.modes_per_element()
    }

    #[inline]
    pub fn dof(&self, element: usize, mode: usize) -> usize {
        element * self.modes_per_element() + mode
    }

    /// Reference coordinate of `x` within element `k`.
    pub fn reference_coord(&self, k: usize, x: T) -> T {
        let (xl, xr) = self.mesh.element(k);
        (T::of(2.0) * (x - xl)) / (xr - xl) - T::one()
    }
}

/// Assembled linear system `A u = f` for a problem configuration.
#[derive(Debug, Clone)]
pub struct DGSystem<T> {
    pub space: DGSpace<T>,
    pub matrix: DenseMatrix<T>,
    pub load: Vec<T>,
    pub config: ProblemConfig<T>,
}

impl<T: Real> DGSystem<T> {
    /// Mesh, space, stiffness matrix and load vector in one step.
    pub fn assemble(config: &ProblemConfig<T>, elements: usize) -> Result<Self> {
        config.validate()?;
        let mesh = build_mesh(elements, config.domain)?;
        let space = DGSpace::new(mesh, config.degree);
        let matrix = assemble_stiffness(&space, config);
        let load = assemble_load(&space, |x| config.source_value(x));
        Ok(Self {
            space,
            matrix,
            load,
            config: config.clone(),
        })
    }

    pub fn ndofs(&self) -> usize {
        self.space.ndofs()
    }

    pub fn solve_direct(&self) -> Result<Vec<T>> {
        lu_factor(&self.matrix)?.solve(&self.load)
    }
}

/// Sign with the convention `sign(0) = 0`, as used by the upwind flux.
fn sign<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

struct Traces<T> {
    /// `P_i(-1)` and `P_i(1)`
    val_left: Vec<T>,
    val_right: Vec<T>,
    /// `P_i'(-1)` and `P_i'(1)` in reference coordinates
    der_left: Vec<T>,
    der_right: Vec<T>,
}

impl<T: Real> Traces<T> {
    fn new(degree: usize) -> Self {
        Self {
            val_left: legendre_all(degree, -T::one()),
            val_right: legendre_all(degree, T::one()),
            der_left: legendre_derivative_all(degree, -T::one()),
            der_right: legendre_derivative_all(degree, T::one()),
        }
    }
}

/// Assemble the IPDG stiffness matrix.
///
/// Volume terms integrate `gamma u w + (eps u' - b u) w'` per element; the
/// skeleton carries the jump penalty, the upwind convective flux on interior
/// edges, the consistency term `-{eps u'} [w]`, and the outflow boundary term.
pub fn assemble_stiffness<T: Real>(space: &DGSpace<T>, cfg: &ProblemConfig<T>) -> DenseMatrix<T> {
    let mesh = space.mesh();
    let m = mesh.element_count();
    let nloc = space.modes_per_element();
    let n = space.ndofs();
    let r = space.degree();
    let (eps, b, gamma, ce) = (cfg.epsilon, cfg.convection, cfg.gamma, cfg.penalty_ce);
    let half = T::of(0.5);
    let two = T::of(2.0);

    let mut a = DenseMatrix::zeros(n, n);

    // Volume contributions, exact for polynomial integrands at this rule size.
    let rule = GaussRule::<T>::new(r + 2);
    for k in 0..m {
        let h = mesh.element_width(k);
        let jac = h * half;
        let dmap = two / h;
        for q in 0..rule.len() {
            let xi = rule.nodes[q];
            let w = rule.weights[q] * jac;
            let vals = legendre_all(r, xi);
            let ders = legendre_derivative_all(r, xi);
            for i in 0..nloc {
                let dwi = ders[i] * dmap;
                for j in 0..nloc {
                    let term =
                        gamma * vals[j] * vals[i] + (eps * ders[j] * dmap - b * vals[j]) * dwi;
                    a[(space.dof(k, i), space.dof(k, j))] += w * term;
                }
            }
        }
    }

    let traces = Traces::<T>::new(r);
    // Upwind weights from the outward normals of the two neighbours.
    let kappa_left = half * (sign(b) + T::one());
    let kappa_right = half * (sign(-b) + T::one());

    // Interior nodes: both adjacent elements couple.
    for v in 1..m {
        let (kl, kr) = (v - 1, v);
        let hl = mesh.element_width(kl);
        let hr = mesh.element_width(kr);
        // 1-D edge measure: average of the adjacent element widths.
        let edge = (hl + hr) * half;
        let penalty_weight = if cfg.boundary_only_penalty {
            T::zero()
        } else {
            ce * eps / edge
        };
        let consistency_on = !cfg.boundary_only_penalty;

        // Per element-side data: jump factor, average of eps u', upwind flux.
        let contributions = |elem: usize, j: usize| -> (usize, T, T, T) {
            if elem == kl {
                let jump = traces.val_right[j];
                let avg = half * eps * traces.der_right[j] * (two / hl);
                let upw = kappa_left * b * traces.val_right[j];
                (space.dof(kl, j), jump, avg, upw)
            } else {
                let jump = -traces.val_left[j];
                let avg = half * eps * traces.der_left[j] * (two / hr);
                let upw = kappa_right * b * traces.val_left[j];
                (space.dof(kr, j), jump, avg, upw)
            }
        };

        for row_elem in [kl, kr] {
            for i in 0..nloc {
                let (row, jump_w, _, _) = contributions(row_elem, i);
                for col_elem in [kl, kr] {
                    for j in 0..nloc {
                        let (col, jump_u, avg_u, upw_u) = contributions(col_elem, j);
                        let mut term = penalty_weight * jump_u * jump_w + upw_u * jump_w;
                        if consistency_on {
                            term -= avg_u * jump_w;
                        }
                        a[(row, col)] += term;
                    }
                }
            }
        }
    }

    // Boundary points: jump is the trace times the outward normal and the
    // average degenerates to the one-sided trace.
    {
        // Left boundary, normal -1; inflow for b > 0.
        let k = 0;
        let h = mesh.element_width(k);
        let pw = ce * eps / h;
        let outflow = -b >= T::zero();
        for i in 0..nloc {
            let row = space.dof(k, i);
            let jump_w = -traces.val_left[i];
            for j in 0..nloc {
                let col = space.dof(k, j);
                let jump_u = -traces.val_left[j];
                let avg_u = eps * traces.der_left[j] * (two / h);
                let mut term = pw * jump_u * jump_w - avg_u * jump_w;
                if outflow {
                    term += -b * traces.val_left[j] * traces.val_left[i];
                }
                a[(row, col)] += term;
            }
        }
    }
    {
        // Right boundary, normal +1; outflow for b >= 0.
        let k = m - 1;
        let h = mesh.element_width(k);
        let pw = ce * eps / h;
        let outflow = b >= T::zero();
        for i in 0..nloc {
            let row = space.dof(k, i);
            let jump_w = traces.val_right[i];
            for j in 0..nloc {
                let col = space.dof(k, j);
                let jump_u = traces.val_right[j];
                let avg_u = eps * traces.der_right[j] * (two / h);
                let mut term = pw * jump_u * jump_w - avg_u * jump_w;
                if outflow {
                    term += b * traces.val_right[j] * traces.val_right[i];
                }
                a[(row, col)] += term;
            }
        }
    }

    a
}

/// Load vector by Gauss quadrature with `r + 2` points per element
/// (order `>= 2r + 2`).
pub fn assemble_load<T: Real>(space: &DGSpace<T>, source: impl Fn(T) -> T) -> Vec<T> {
    let mesh = space.mesh();
    let r = space.degree();
    let nloc = space.modes_per_element();
    let rule = GaussRule::<T>::new(r + 2);
    let half = T::of(0.5);

    let mut load = vec![T::zero(); space.ndofs()];
    for k in 0..mesh.element_count() {
        let (xl, xr) = mesh.element(k);
        let jac = (xr - xl) * half;
        let mid = (xl + xr) * half;
        for q in 0..rule.len() {
            let xi = rule.nodes[q];
            let x = mid + jac * xi;
            let w = rule.weights[q] * jac;
            let fval = source(x);
            let vals = legendre_all(r, xi);
            for (i, &v) in vals.iter().enumerate().take(nloc) {
                load[space.dof(k, i)] += w * fval * v;
            }
        }
    }
    load
}

/// Point value of the DG function; interior nodes take the trace from the
/// left element, the domain's left endpoint takes the right trace.
pub fn evaluate<T: Real>(space: &DGSpace<T>, coeffs: &[T], x: T) -> Result<T> {
    assert_eq!(
        coeffs.len(),
        space.ndofs(),
        "coefficient vector length mismatch"
    );
    let k = space.mesh().element_containing(x)?;
    let xi = space.reference_coord(k, x);
    let vals = legendre_all(space.degree(), xi);
    let mut out = T::zero();
    for (i, &v) in vals.iter().enumerate() {
        out += coeffs[space.dof(k, i)] * v;
    }
    Ok(out)
}

/// `L^2` error and broken `H^1` seminorm error against an exact solution.
pub fn error_norms<T: Real>(
    space: &DGSpace<T>,
    coeffs: &[T],
    exact: impl Fn(T) -> T,
    exact_derivative: impl Fn(T) -> T,
) -> (T, T) {
    assert_eq!(
        coeffs.len(),
        space.ndofs(),
        "coefficient vector length mismatch"
    );
    let mesh = space.mesh();
    let r = space.degree();
    // Oversampled rule: the exact solution need not be polynomial.
    let rule = GaussRule::<T>::new(r + 6);
    let half = T::of(0.5);
    let two = T::of(2.0);

    let mut l2 = T::zero();
    let mut h1 = T::zero();
    for k in 0..mesh.element_count() {
        let (xl, xr) = mesh.element(k);
        let h = xr - xl;
        let jac = h * half;
        let mid = (xl + xr) * half;
        let dmap = two / h;
        for q in 0..rule.len() {
            let xi = rule.nodes[q];
            let x = mid + jac * xi;
            let w = rule.weights[q] * jac;
            let vals = legendre_all(r, xi);
            let ders = legendre_derivative_all(r, xi);
            let mut uh = T::zero();
            let mut duh = T::zero();
            for i in 0..=r {
                let c = coeffs[space.dof(k, i)];
                uh += c * vals[i];
                duh += c * ders[i] * dmap;
            }
            let de = uh - exact(x);
            let dd = duh - exact_derivative(x);
            l2 += w * de * de;
            h1 += w * dd * dd;
        }
    }
    (l2.sqrt(), h1.sqrt())
}
