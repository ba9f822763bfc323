//! Multivector fields on uniform grids and their discrete differential
//! operators.
//!
//! Grid axis `i` pairs with generator `e_{i+1}` of the field's signature.
//! Derivatives use central differences inside, second-order one-sided
//! stencils at clamped edges, and wrap around on periodic axes.

mod cauchy;
mod field;
mod ops;
pub(crate) mod stencil;

pub use cauchy::{cauchy_reconstruct, Contour};
pub use field::{ComplexField, GaugePotential, GridField};
pub use ops::{
    dirac_op, dirac_squared, exterior_derivative, gauge_residual, interior_derivative, laplacian, lorentz_gauge_divergence,
    monogenic_residual, partial_derivative, ScalarMap, SUMMARY_MARGIN,
};

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::clifford::CliffordError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Clamped,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("grid dimension must be 1, 2 or 3 (got {0})")]
    Dimension(usize),
    #[error("axis {axis} has {points} points; at least 4 are needed")]
    TooFewPoints { axis: usize, points: usize },
    #[error("axis {axis} has non-positive or non-finite spacing {spacing}")]
    Spacing { axis: usize, spacing: f64 },
    #[error("per-axis settings disagree in length")]
    AxisCount,
    #[error("signature has {sig} generators but the grid has {grid} axes")]
    SignatureTooSmall { sig: usize, grid: usize },
    #[error("fields live on different grids or signatures")]
    Mismatch,
    #[error("expected {expected} values, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("gauge potential is not a pure vector at node {0}")]
    NotGradeOne(usize),
    #[error("value at node {0} leaves the even subalgebra of Cl(2)")]
    NotEven(usize),
    #[error("operation needs a Euclidean Cl(2) field")]
    NotPlanar,
    #[error("contour needs at least {0} samples")]
    ContourTooShort(usize),
    #[error("evaluation point is outside the contour")]
    OutsideContour,
    #[error("evaluation point is {distance} from the contour; needs more than {min}")]
    TooCloseToContour { distance: f64, min: f64 },
    #[error(transparent)]
    Clifford(#[from] CliffordError),
}

/// Uniform tensor-product grid with axis 0 varying fastest in storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    shape: Vec<usize>,
    spacing: Vec<f64>,
    origin: Vec<f64>,
    boundary: Vec<Boundary>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, spacing: Vec<f64>, origin: Vec<f64>, boundary: Vec<Boundary>) -> Result<Self, GridError> {
        let n = shape.len();
        if !(1..=3).contains(&n) {
            return Err(GridError::Dimension(n));
        }
        if spacing.len() != n || origin.len() != n || boundary.len() != n {
            return Err(GridError::AxisCount);
        }
        for (axis, &points) in shape.iter().enumerate() {
            if points < 4 {
                return Err(GridError::TooFewPoints { axis, points });
            }
        }
        for (axis, &h) in spacing.iter().enumerate() {
            if !(h > 0.0 && h.is_finite()) {
                return Err(GridError::Spacing { axis, spacing: h });
            }
        }
        Ok(Self { shape, spacing, origin, boundary })
    }

    /// `n` points per axis covering `[lo, hi]` inclusive (clamped) or
    /// `[lo, hi)` (periodic, so `hi` is identified with `lo`).
    pub fn uniform(dim: usize, n: usize, lo: f64, hi: f64, boundary: Boundary) -> Result<Self, GridError> {
        let intervals = match boundary {
            Boundary::Periodic => n,
            Boundary::Clamped => n.saturating_sub(1).max(1),
        };
        let h = (hi - lo) / intervals as f64;
        Self::new(alloc::vec![n; dim], alloc::vec![h; dim], alloc::vec![lo; dim], alloc::vec![boundary; dim])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn boundary(&self) -> &[Boundary] {
        &self.boundary
    }

    pub fn node_count(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.shape[..axis].iter().product()
    }

    pub fn index_along(&self, node: usize, axis: usize) -> usize {
        (node / self.stride(axis)) % self.shape[axis]
    }

    pub fn multi_index(&self, node: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for (axis, slot) in out.iter_mut().enumerate().take(self.dim()) {
            *slot = self.index_along(node, axis);
        }
        out
    }

    pub fn node(&self, index: &[usize]) -> usize {
        index.iter().enumerate().map(|(a, &i)| i * self.stride(a)).sum()
    }

    /// Physical coordinates; unused trailing axes are zero.
    pub fn coords(&self, node: usize) -> [f64; 3] {
        let mut x = [0.0; 3];
        for (axis, slot) in x.iter_mut().enumerate().take(self.dim()) {
            *slot = self.origin[axis] + self.index_along(node, axis) as f64 * self.spacing[axis];
        }
        x
    }

    /// Distance (in cells) from the nearest clamped edge; `usize::MAX` when
    /// every axis is periodic.
    pub fn clamped_edge_distance(&self, node: usize) -> usize {
        let mut d = usize::MAX;
        for axis in 0..self.dim() {
            if self.boundary[axis] == Boundary::Clamped {
                let i = self.index_along(node, axis);
                d = d.min(i).min(self.shape[axis] - 1 - i);
            }
        }
        d
    }

    /// Same grid with every spacing halved and every point count adjusted
    /// to cover the same extent.
    pub fn refined(&self) -> Result<Grid, GridError> {
        let shape = self
            .shape
            .iter()
            .zip(&self.boundary)
            .map(|(&n, b)| match b {
                Boundary::Periodic => 2 * n,
                Boundary::Clamped => 2 * n - 1,
            })
            .collect();
        let spacing = self.spacing.iter().map(|h| h / 2.0).collect();
        Grid::new(shape, spacing, self.origin.clone(), self.boundary.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Grid::uniform(2, 3, 0.0, 1.0, Boundary::Clamped).is_err());
        assert!(Grid::uniform(4, 8, 0.0, 1.0, Boundary::Clamped).is_err());
        assert!(Grid::new(alloc::vec![8], alloc::vec![0.0], alloc::vec![0.0], alloc::vec![Boundary::Clamped]).is_err());
    }

    #[test]
    fn indexing_axis_zero_fastest() {
        let g = Grid::new(alloc::vec![4, 5], alloc::vec![1.0, 0.5], alloc::vec![0.0, 1.0], alloc::vec![Boundary::Clamped; 2]).unwrap();
        let node = g.node(&[3, 2]);
        assert_eq!(node, 3 + 2 * 4);
        assert_eq!(g.coords(node), [3.0, 2.0, 0.0]);
        assert_eq!(g.multi_index(node), [3, 2, 0]);
        assert_eq!(g.clamped_edge_distance(node), 0);
    }

    #[test]
    fn refinement_keeps_extent() {
        let g = Grid::uniform(1, 9, 0.0, 1.0, Boundary::Clamped).unwrap();
        let r = g.refined().unwrap();
        assert_eq!(r.shape(), &[17]);
        assert_eq!(r.coords(16)[0], 1.0);
        let p = Grid::uniform(1, 8, 0.0, 1.0, Boundary::Periodic).unwrap().refined().unwrap();
        assert_eq!(p.shape(), &[16]);
        assert_eq!(p.spacing()[0], 1.0 / 16.0);
    }
}
