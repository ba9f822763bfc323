use alloc::vec::Vec;

use super::{stencil, GaugePotential, Grid, GridError, GridField};
use crate::clifford::Blade;

/// Clamped-edge cells left out of summary norms.
pub const SUMMARY_MARGIN: usize = 2;

/// A real number per node, such as a pointwise residual magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMap {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarMap {
    fn included(&self, margin: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().enumerate().filter(move |(n, _)| self.grid.clamped_edge_distance(*n) >= margin).map(|(_, &v)| v)
    }

    /// Maximum over nodes at least `margin` cells from a clamped edge.
    pub fn max_with_margin(&self, margin: usize) -> f64 {
        self.included(margin).fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `(Σ v² · cell volume)^½` over the same nodes.
    pub fn l2_with_margin(&self, margin: usize) -> f64 {
        libm::sqrt(self.included(margin).map(|v| v * v).sum::<f64>() * self.grid.cell_volume())
    }

    pub fn max(&self) -> f64 {
        self.max_with_margin(SUMMARY_MARGIN)
    }

    pub fn l2(&self) -> f64 {
        self.l2_with_margin(SUMMARY_MARGIN)
    }

    /// Largest `|self - other|` at included nodes.
    pub fn max_deviation(&self, other: &ScalarMap, margin: usize) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(n, _)| self.grid.clamped_edge_distance(*n) >= margin)
            .fold(0.0, |a, (_, (x, y))| a.max((x - y).abs()))
    }
}

pub fn partial_derivative(f: &GridField, axis: usize) -> GridField {
    let data = stencil::first(f.grid(), f.data(), f.width(), axis);
    GridField::from_data(f.grid().clone(), f.signature(), data).expect("same layout")
}

/// `Σ e_i ∂_i f`, keeping only products selected by `keep(axis, blade)`.
fn dirac_filtered<K: Fn(usize, Blade) -> bool>(f: &GridField, keep: K) -> GridField {
    let sig = f.signature();
    let w = f.width();
    let mut out = GridField::zeros(f.grid().clone(), sig).expect("same layout");
    for axis in 0..f.grid().dim() {
        let d = stencil::first(f.grid(), f.data(), w, axis);
        let e = Blade::generator(axis);
        let table: Vec<(f64, usize)> = (0..w)
            .map(|b| {
                let (s, c) = e.product(Blade::from_mask(b as u16), sig);
                (s, c.mask() as usize)
            })
            .collect();
        let dst = out.data_mut();
        for node in 0..f.grid().node_count() {
            for (b, &(s, c)) in table.iter().enumerate() {
                if keep(axis, Blade::from_mask(b as u16)) {
                    dst[node * w + c] += s * d[node * w + b];
                }
            }
        }
    }
    out
}

/// Discrete `∇f = Σ e_i ∂_i f` (generator on the left).
pub fn dirac_op(f: &GridField) -> GridField {
    dirac_filtered(f, |_, _| true)
}

/// Grade-lowering part `∇·f`.
pub fn interior_derivative(f: &GridField) -> GridField {
    dirac_filtered(f, |axis, b| b.contains(axis))
}

/// Grade-raising part `∇∧f`.
pub fn exterior_derivative(f: &GridField) -> GridField {
    dirac_filtered(f, |axis, b| !b.contains(axis))
}

/// `∇(∇f)` built from the first-derivative stencil twice.
pub fn dirac_squared(f: &GridField) -> GridField {
    dirac_op(&dirac_op(f))
}

/// Componentwise `Σ ∂²_i f` with the 3-point stencil.
pub fn laplacian(f: &GridField) -> GridField {
    let mut out = GridField::zeros(f.grid().clone(), f.signature()).expect("same layout");
    for axis in 0..f.grid().dim() {
        let d = stencil::second(f.grid(), f.data(), f.width(), axis);
        for (o, v) in out.data_mut().iter_mut().zip(d) {
            *o += v;
        }
    }
    out
}

fn norms(f: &GridField) -> ScalarMap {
    ScalarMap { grid: f.grid().clone(), values: (0..f.grid().node_count()).map(|n| f.node_norm(n)).collect() }
}

/// Pointwise `|∇f|` (coefficient norm).
pub fn monogenic_residual(f: &GridField) -> ScalarMap {
    norms(&dirac_op(f))
}

/// Pointwise `|∇f − A f|`, the residual of `∇f = A f`.
pub fn gauge_residual(f: &GridField, a: &GaugePotential) -> Result<ScalarMap, GridError> {
    let a = a.field();
    if !f.same_layout(a) {
        return Err(GridError::Mismatch);
    }
    let mut r = dirac_op(f);
    for node in 0..f.grid().node_count() {
        let af = a.value(node).geometric_product(&f.value(node))?;
        let v = r.value(node).try_sub(&af)?;
        r.set(node, &v)?;
    }
    Ok(norms(&r))
}

/// `Σ ∂_i A^i` over the grid axes.
pub fn lorentz_gauge_divergence(a: &GaugePotential) -> ScalarMap {
    let f = a.field();
    let mut values = alloc::vec![0.0; f.grid().node_count()];
    for axis in 0..f.grid().dim() {
        let comp = f.component_values(Blade::generator(axis));
        let d = stencil::first(f.grid(), &comp, 1, axis);
        for (v, x) in values.iter_mut().zip(d) {
            *v += x;
        }
    }
    ScalarMap { grid: f.grid().clone(), values }
}
