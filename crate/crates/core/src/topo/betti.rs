use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::TopoError;
use crate::clifford::{Blade, Signature};
use crate::grid::{Boundary, Grid, GridField};

pub const BETTI_MAX_NODES: usize = 4096;
/// Eigenvalues below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-6;
/// Required ratio between the first nonzero and the last zero eigenvalue.
pub const GAP_RATIO_MIN: f64 = 100.0;
const STENCIL: &str = "componentwise 3-point second difference";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiReport {
    pub grade: usize,
    /// Number of blade components of this grade.
    pub components: usize,
    pub kernel_dim: usize,
    pub sigma_max: f64,
    /// Largest singular value counted as zero (0 if none).
    pub last_zero: f64,
    /// Smallest singular value counted as nonzero (0 if none).
    pub first_nonzero: f64,
    pub gap_ratio: f64,
    pub gap_ok: bool,
    pub stencil: String,
}

use alloc::string::{String, ToString};

fn check(grid: &Grid, sig: Signature) -> Result<(), TopoError> {
    if grid.boundary().iter().any(|b| *b != Boundary::Periodic) {
        return Err(TopoError::NotPeriodic);
    }
    if grid.node_count() > BETTI_MAX_NODES {
        return Err(TopoError::TooLarge { nodes: grid.node_count(), max: BETTI_MAX_NODES });
    }
    if sig.dim() != grid.dim() {
        return Err(TopoError::SignatureGrid { sig: sig.dim(), grid: grid.dim() });
    }
    Ok(())
}

/// `−Δ` on one scalar component: 3-point stencil per axis, `1/h²`.
/// Assembled from sparse triplets.
fn scalar_laplacian(grid: &Grid) -> DMatrix<f64> {
    let n = grid.node_count();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    for node in 0..n {
        for axis in 0..grid.dim() {
            let h2 = grid.spacing()[axis] * grid.spacing()[axis];
            let len = grid.shape()[axis];
            let i = grid.index_along(node, axis);
            let stride = grid.stride(axis);
            let base = node - i * stride;
            triplets.push((node, node, 2.0 / h2));
            triplets.push((node, base + ((i + 1) % len) * stride, -1.0 / h2));
            triplets.push((node, base + ((i + len - 1) % len) * stride, -1.0 / h2));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for (r, c, v) in triplets {
        m[(r, c)] += v;
    }
    m
}

fn blades_of_grade(sig: Signature, k: usize) -> Vec<Blade> {
    (0..sig.blade_count() as u16).map(Blade::from_mask).filter(|b| b.grade() == k).collect()
}

/// The operator is block diagonal with one identical block per blade
/// component, so one eigen-decomposition serves every component.
struct Spectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

fn spectrum(grid: &Grid) -> Spectrum {
    let eig = SymmetricEigen::new(scalar_laplacian(grid));
    Spectrum { values: eig.eigenvalues.iter().map(|v| v.abs()).collect(), vectors: eig.eigenvectors }
}

fn report(grade: usize, components: usize, block: &[f64]) -> BettiReport {
    let mut all: Vec<f64> = Vec::with_capacity(block.len() * components);
    for _ in 0..components {
        all.extend_from_slice(block);
    }
    all.sort_by(f64::total_cmp);
    let sigma_max = all.last().copied().unwrap_or(0.0);
    let cut = RANK_TOL * sigma_max;
    let kernel_dim = all.iter().filter(|&&s| s < cut).count();
    let last_zero = if kernel_dim > 0 { all[kernel_dim - 1] } else { 0.0 };
    let first_nonzero = all.get(kernel_dim).copied().unwrap_or(0.0);
    let gap_ratio = if kernel_dim == 0 || first_nonzero == 0.0 {
        f64::MAX
    } else {
        first_nonzero / last_zero.max(f64::EPSILON * sigma_max)
    };
    BettiReport {
        grade,
        components,
        kernel_dim,
        sigma_max,
        last_zero,
        first_nonzero,
        gap_ratio,
        gap_ok: gap_ratio >= GAP_RATIO_MIN,
        stencil: STENCIL.to_string(),
    }
}

/// Kernel dimension of the discrete Hodge Laplacian on grade-`k` fields for
/// `k = 0..=max_grade`. The grid must be fully periodic with one axis per
/// generator.
pub fn betti_numbers(grid: &Grid, sig: Signature, max_grade: usize) -> Result<Vec<BettiReport>, TopoError> {
    check(grid, sig)?;
    let spec = spectrum(grid);
    Ok((0..=max_grade).map(|k| report(k, blades_of_grade(sig, k).len(), &spec.values)).collect())
}

/// Orthonormal basis of the grade-`k` harmonic kernel as grid fields.
pub fn harmonic_fields(grid: &Grid, sig: Signature, k: usize) -> Result<Vec<GridField>, TopoError> {
    check(grid, sig)?;
    let spec = spectrum(grid);
    let sigma_max = spec.values.iter().copied().fold(0.0, f64::max);
    let mut out = Vec::new();
    for blade in blades_of_grade(sig, k) {
        for (col, &s) in spec.values.iter().enumerate() {
            if s < RANK_TOL * sigma_max {
                let mut f = GridField::zeros(grid.clone(), sig)?;
                let w = f.width();
                let v = spec.vectors.column(col);
                for node in 0..grid.node_count() {
                    f.data_mut()[node * w + blade.mask() as usize] = v[node];
                }
                out.push(f);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::laplacian;

    fn ring(n: usize) -> Grid {
        Grid::uniform(1, n, 0.0, 1.0, Boundary::Periodic).unwrap()
    }

    #[test]
    fn ring_spectrum_matches_fourier_modes() {
        let g = ring(16);
        let spec = spectrum(&g);
        let h = g.spacing()[0];
        let mut want: Vec<f64> = (0..16)
            .map(|k| (2.0 - 2.0 * libm::cos(2.0 * core::f64::consts::PI * k as f64 / 16.0)) / (h * h))
            .collect();
        want.sort_by(f64::total_cmp);
        let mut got = spec.values.clone();
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-9 * want[15]);
        }
    }

    #[test]
    fn ring_betti() {
        let r = betti_numbers(&ring(64), Signature::euclidean(1).unwrap(), 2).unwrap();
        let dims: Vec<usize> = r.iter().map(|b| b.kernel_dim).collect();
        assert_eq!(dims, [1, 1, 0]);
        assert!(r[0].gap_ok && r[1].gap_ok);
        assert_eq!(r[2].components, 0);
    }

    #[test]
    fn kernel_fields_are_harmonic() {
        let g = Grid::uniform(2, 8, 0.0, 1.0, Boundary::Periodic).unwrap();
        let sig = Signature::euclidean(2).unwrap();
        let fields = harmonic_fields(&g, sig, 1).unwrap();
        assert_eq!(fields.len(), 2);
        for f in fields {
            assert!(laplacian(&f).data().iter().all(|v| v.abs() < 1e-8));
        }
    }

    #[test]
    fn rejects_clamped_and_oversized() {
        let sig = Signature::euclidean(1).unwrap();
        let c = Grid::uniform(1, 8, 0.0, 1.0, Boundary::Clamped).unwrap();
        assert_eq!(betti_numbers(&c, sig, 1), Err(TopoError::NotPeriodic));
        assert!(matches!(betti_numbers(&ring(5000), sig, 1), Err(TopoError::TooLarge { .. })));
    }
}
