//! Finite-difference stencils over interleaved per-node data
//! (`width` values per node).

use super::{Boundary, Grid};

/// Neighbour of `node` displaced by `k` cells along `axis`, wrapping on
/// periodic axes. `None` when it falls off a clamped axis.
fn shifted(grid: &Grid, node: usize, axis: usize, k: isize) -> Option<usize> {
    let n = grid.shape()[axis] as isize;
    let i = grid.index_along(node, axis) as isize;
    let mut j = i + k;
    match grid.boundary()[axis] {
        Boundary::Periodic => j = j.rem_euclid(n),
        Boundary::Clamped if !(0..n).contains(&j) => return None,
        Boundary::Clamped => {}
    }
    Some((node as isize + (j - i) * grid.stride(axis) as isize) as usize)
}

/// Weighted sum `Σ w_k f(node + offset_k)` accumulated into `out`.
fn apply(grid: &Grid, data: &[f64], width: usize, node: usize, axis: usize, taps: &[(isize, f64)], scale: f64, out: &mut [f64]) {
    for &(k, w) in taps {
        let m = shifted(grid, node, axis, k).expect("stencil stays on grid");
        let src = &data[m * width..(m + 1) * width];
        for (o, s) in out.iter_mut().zip(src) {
            *o += w * scale * s;
        }
    }
}

/// First-derivative taps for position `i` of `n` on the given boundary.
fn first_taps(b: Boundary, i: usize, n: usize) -> &'static [(isize, f64)] {
    const CENTRAL: [(isize, f64); 2] = [(-1, -0.5), (1, 0.5)];
    const FORWARD: [(isize, f64); 3] = [(0, -1.5), (1, 2.0), (2, -0.5)];
    const BACKWARD: [(isize, f64); 3] = [(0, 1.5), (-1, -2.0), (-2, 0.5)];
    match b {
        Boundary::Periodic => &CENTRAL,
        Boundary::Clamped if i == 0 => &FORWARD,
        Boundary::Clamped if i == n - 1 => &BACKWARD,
        Boundary::Clamped => &CENTRAL,
    }
}

fn second_taps(b: Boundary, i: usize, n: usize) -> &'static [(isize, f64)] {
    const CENTRAL: [(isize, f64); 3] = [(-1, 1.0), (0, -2.0), (1, 1.0)];
    const FORWARD: [(isize, f64); 4] = [(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)];
    const BACKWARD: [(isize, f64); 4] = [(0, 2.0), (-1, -5.0), (-2, 4.0), (-3, -1.0)];
    match b {
        Boundary::Periodic => &CENTRAL,
        Boundary::Clamped if i == 0 => &FORWARD,
        Boundary::Clamped if i == n - 1 => &BACKWARD,
        Boundary::Clamped => &CENTRAL,
    }
}

/// `∂_axis` at one node of the scalar `value(m)`; `None` if any tap is
/// `None`.
pub(crate) fn first_at<F: Fn(usize) -> Option<f64>>(grid: &Grid, node: usize, axis: usize, value: F) -> Option<f64> {
    let taps = first_taps(grid.boundary()[axis], grid.index_along(node, axis), grid.shape()[axis]);
    weighted(grid, node, axis, taps, value).map(|v| v / grid.spacing()[axis])
}

pub(crate) fn second_at<F: Fn(usize) -> Option<f64>>(grid: &Grid, node: usize, axis: usize, value: F) -> Option<f64> {
    let taps = second_taps(grid.boundary()[axis], grid.index_along(node, axis), grid.shape()[axis]);
    let h = grid.spacing()[axis];
    weighted(grid, node, axis, taps, value).map(|v| v / (h * h))
}

fn weighted<F: Fn(usize) -> Option<f64>>(grid: &Grid, node: usize, axis: usize, taps: &[(isize, f64)], value: F) -> Option<f64> {
    let mut acc = 0.0;
    for &(k, w) in taps {
        acc += w * value(shifted(grid, node, axis, k)?)?;
    }
    Some(acc)
}

/// `∂_axis` of every component.
pub(crate) fn first(grid: &Grid, data: &[f64], width: usize, axis: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec![0.0; data.len()];
    let h = grid.spacing()[axis];
    let n = grid.shape()[axis];
    let b = grid.boundary()[axis];
    for node in 0..grid.node_count() {
        let taps = first_taps(b, grid.index_along(node, axis), n);
        apply(grid, data, width, node, axis, taps, 1.0 / h, &mut out[node * width..(node + 1) * width]);
    }
    out
}

/// `∂²_axis` of every component with the 3-point stencil (4-point
/// one-sided at clamped edges).
pub(crate) fn second(grid: &Grid, data: &[f64], width: usize, axis: usize) -> alloc::vec::Vec<f64> {
    let mut out = alloc::vec![0.0; data.len()];
    let h = grid.spacing()[axis];
    let n = grid.shape()[axis];
    let b = grid.boundary()[axis];
    for node in 0..grid.node_count() {
        let taps = second_taps(b, grid.index_along(node, axis), n);
        apply(grid, data, width, node, axis, taps, 1.0 / (h * h), &mut out[node * width..(node + 1) * width]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn exact_on_quadratics_including_edges() {
        let g = Grid::uniform(1, 9, -1.0, 1.0, Boundary::Clamped).unwrap();
        let f: Vec<f64> = (0..9).map(|n| g.coords(n)[0].powi(2)).collect();
        let d1 = first(&g, &f, 1, 0);
        let d2 = second(&g, &f, 1, 0);
        for n in 0..9 {
            assert!((d1[n] - 2.0 * g.coords(n)[0]).abs() < 1e-12);
            assert!((d2[n] - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn periodic_wraps() {
        let g = Grid::uniform(1, 4, 0.0, 4.0, Boundary::Periodic).unwrap();
        let d = first(&g, &[0.0, 1.0, 0.0, -1.0], 1, 0);
        assert_eq!(d, [1.0, 0.0, -1.0, 0.0]);
    }
}
