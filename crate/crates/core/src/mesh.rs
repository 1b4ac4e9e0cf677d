//! 1-D meshes on an interval.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Partition of an interval into elements, stored as strictly increasing
/// node coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D<T> {
    nodes: Vec<T>,
}

/// Uniform mesh with `m` elements on `domain`.
pub fn build_mesh<T: Real>(m: usize, domain: (T, T)) -> Result<Mesh1D<T>> {
    if m == 0 {
        return Err(Error::InvalidElementCount(0));
    }
    let (a, b) = domain;
    let width = (b - a) / T::of(m as f64);
    let mut nodes: Vec<T> = (0..=m).map(|k| a + width * T::of(k as f64)).collect();
    // Pin the endpoints so the mesh spans the domain exactly.
    nodes[0] = a;
    nodes[m] = b;
    Ok(Mesh1D { nodes })
}

impl<T: Real> Mesh1D<T> {
    /// Build directly from node coordinates (must be strictly increasing).
    pub fn from_nodes(nodes: Vec<T>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidElementCount(0));
        }
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::NonNestedMeshes(
                "nodes are not strictly increasing".into(),
            ));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn element(&self, k: usize) -> (T, T) {
        (self.nodes[k], self.nodes[k + 1])
    }

    pub fn element_width(&self, k: usize) -> T {
        self.nodes[k + 1] - self.nodes[k]
    }

    pub fn domain(&self) -> (T, T) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    /// Element containing `x`; points on an interior node resolve to the
    /// left element, matching the trace convention used for evaluation.
    pub fn element_containing(&self, x: T) -> Result<usize> {
        let (a, b) = self.domain();
        if x < a || x > b {
            return Err(Error::OutOfDomain {
                x: x.as_f64(),
                left: a.as_f64(),
                right: b.as_f64(),
            });
        }
        if x == a {
            return Ok(0);
        }
        // Binary search for the first node >= x; the element left of it wins.
        let mut lo = 0;
        let mut hi = self.nodes.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.nodes[mid] < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_nodes() {
        let mesh = build_mesh(4, (0.0, 1.0)).unwrap();
        assert_eq!(mesh.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(mesh.element_count(), 4);
    }

    #[test]
    fn single_element() {
        let mesh = build_mesh(1, (0.0, 1.0)).unwrap();
        assert_eq!(mesh.nodes(), &[0.0, 1.0]);
    }

    #[test]
    fn m256_spacing_exact() {
        let mesh = build_mesh(256, (0.0f64, 1.0)).unwrap();
        assert_eq!(mesh.nodes().len(), 257);
        // 1/256 is a power of two, so spacing is exactly representable.
        for k in 0..256 {
            assert_eq!(mesh.element_width(k), 1.0 / 256.0);
        }
    }

    #[test]
    fn zero_elements_rejected() {
        assert!(matches!(
            build_mesh::<f64>(0, (0.0, 1.0)),
            Err(Error::InvalidElementCount(0))
        ));
    }

    #[test]
    fn element_lookup_takes_left_element_on_nodes() {
        let mesh = build_mesh(4, (0.0, 1.0)).unwrap();
        assert_eq!(mesh.element_containing(0.5).unwrap(), 1);
        assert_eq!(mesh.element_containing(0.0).unwrap(), 0);
        assert_eq!(mesh.element_containing(1.0).unwrap(), 3);
        assert!(mesh.element_containing(1.5).is_err());
    }
}
