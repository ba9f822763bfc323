//! Topological diagnostics of planar complex fields: phase winding along
//! closed contours, argument-principle zero counts with a brute-force
//! cross-check, loop integrals of the action gradient, and Betti numbers
//! of periodic grids as dimensions of discrete harmonic kernels.

mod betti;
mod winding;
mod zeros;

pub use betti::{betti_numbers, harmonic_fields, BettiReport, BETTI_MAX_NODES, GAP_RATIO_MIN, RANK_TOL};
pub use winding::{
    born_sommerfeld_integral, mass_loop_integral, phase_walk, winding_from_samples, winding_number, LoopRoute, PhaseWalk,
    ZERO_TOL,
};
pub use zeros::{
    count_zeros, gauge_shift, holomorphic_shift, holomorphy_defect, verify_dbs, OracleZero, WindingReport, ZeroCount,
    ZeroOracle,
};

use num_complex::Complex64;

use crate::grid::{Boundary, ComplexField, GridError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopoError {
    #[error("field magnitude {magnitude} below the zero tolerance at contour point ({x}, {y})")]
    ZeroOnContour { x: f64, y: f64, magnitude: f64 },
    #[error("phase jump {jump} rad between neighbouring samples near ({x}, {y}) is too large")]
    Undersampled { x: f64, y: f64, jump: f64 },
    #[error("non-finite field value at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("winding sum {0} is not within 0.01 of an integer")]
    NotInteger(f64),
    #[error("contour needs at least {0} samples")]
    ContourTooShort(usize),
    #[error("Betti numbers need every axis periodic")]
    NotPeriodic,
    #[error("grid has {nodes} nodes; the eigen-solve budget is {max}")]
    TooLarge { nodes: usize, max: usize },
    #[error("signature has {sig} generators but the grid has {grid} axes")]
    SignatureGrid { sig: usize, grid: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Anything that can be evaluated as a complex number at a point of the
/// plane.
pub trait PlaneField {
    fn eval(&self, x: f64, y: f64) -> Complex64;
}

impl<F: Fn(Complex64) -> Complex64> PlaneField for F {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        self(Complex64::new(x, y))
    }
}

/// Bilinear interpolation; NaN outside the extent of clamped axes.
impl PlaneField for ComplexField {
    fn eval(&self, x: f64, y: f64) -> Complex64 {
        let g = self.grid();
        if g.dim() != 2 {
            return Complex64::new(f64::NAN, f64::NAN);
        }
        let mut idx = [0usize; 2];
        let mut frac = [0.0; 2];
        for (axis, p) in [x, y].into_iter().enumerate() {
            let n = g.shape()[axis];
            let t = (p - g.origin()[axis]) / g.spacing()[axis];
            let base = libm::floor(t);
            match g.boundary()[axis] {
                Boundary::Periodic => {
                    idx[axis] = (base as i64).rem_euclid(n as i64) as usize;
                    frac[axis] = t - base;
                }
                Boundary::Clamped => {
                    if !(0.0..=(n - 1) as f64).contains(&t) {
                        return Complex64::new(f64::NAN, f64::NAN);
                    }
                    let i = (base as usize).min(n - 2);
                    idx[axis] = i;
                    frac[axis] = t - i as f64;
                }
            }
        }
        let next = |axis: usize, i: usize| (i + 1) % g.shape()[axis];
        let v = self.values();
        let at = |i: usize, j: usize| v[g.node(&[i, j])];
        let (i, j) = (idx[0], idx[1]);
        let (i1, j1) = (next(0, i), next(1, j));
        let (s, t) = (frac[0], frac[1]);
        at(i, j) * ((1.0 - s) * (1.0 - t)) + at(i1, j) * (s * (1.0 - t)) + at(i, j1) * ((1.0 - s) * t) + at(i1, j1) * (s * t)
    }
}
