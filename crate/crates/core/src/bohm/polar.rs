use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::BohmError;
use crate::clifford::{Blade, Multivector, Signature};
use crate::grid::stencil::{first_at, second_at};
use crate::grid::{ComplexField, Grid, GridField, ScalarMap};

/// Amplitudes below this mark the phase as undefined.
pub const RHO_TOL: f64 = 1e-12;

/// `φ = ρ e^{iS/ħ}` sampled on a grid. `s[n]` is meaningful only where
/// `defined[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField {
    pub grid: Grid,
    pub rho: Vec<f64>,
    pub s: Vec<f64>,
    pub defined: Vec<bool>,
    pub hbar: f64,
}

/// Shift `s` by a multiple of `period` so it lies within half a period of
/// `reference`.
fn nearest(s: f64, reference: f64, period: f64) -> f64 {
    s - period * libm::round((s - reference) / period)
}

/// Unwrapped `ħ·arg` along a path of samples.
pub fn unwrap_path(values: &[Complex64], hbar: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for v in values {
        let raw = hbar * v.arg();
        let s = match out.last() {
            Some(&prev) => nearest(raw, prev, 2.0 * PI * hbar),
            None => raw,
        };
        out.push(s);
    }
    out
}

pub fn polar_decompose(phi: &ComplexField, hbar: f64) -> Result<PolarField, BohmError> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(BohmError::BadParameter("hbar must be positive"));
    }
    let grid = phi.grid().clone();
    let v = phi.values();
    let rho: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let defined: Vec<bool> = rho.iter().map(|&r| r >= RHO_TOL).collect();
    let raw: Vec<f64> = v.iter().map(|z| hbar * z.arg()).collect();
    let mut s = raw.clone();
    let reference = (0..rho.len()).max_by(|&a, &b| rho[a].total_cmp(&rho[b])).unwrap_or(0);
    let period = 2.0 * PI * hbar;
    // axis-ordered flood: the reference line along axis 0, then lines along
    // axis 1 through each of its nodes, then along axis 2
    let mut seeds = alloc::vec![reference];
    for axis in 0..grid.dim() {
        let mut next = Vec::new();
        for &start in &seeds {
            let i0 = grid.index_along(start, axis);
            let stride = grid.stride(axis) as isize;
            let len = grid.shape()[axis] as isize;
            next.push(start);
            for dir in [1isize, -1] {
                let mut last = if defined[start] { Some(s[start]) } else { None };
                let mut i = i0 as isize + dir;
                while (0..len).contains(&i) {
                    let node = (start as isize + (i - i0 as isize) * stride) as usize;
                    if defined[node] {
                        s[node] = match last {
                            Some(prev) => nearest(raw[node], prev, period),
                            None => raw[node],
                        };
                        last = Some(s[node]);
                    }
                    next.push(node);
                    i += dir;
                }
            }
        }
        seeds = next;
    }
    Ok(PolarField { grid, rho, s, defined, hbar })
}

impl PolarField {
    /// `ρ e^{iS/ħ}`, zero at undefined nodes.
    pub fn recompose(&self) -> ComplexField {
        let values = (0..self.rho.len())
            .map(|n| if self.defined[n] { Complex64::from_polar(self.rho[n], self.s[n] / self.hbar) } else { Complex64::new(0.0, 0.0) })
            .collect();
        ComplexField::new(self.grid.clone(), values).expect("same grid")
    }

    fn rho_at(&self, m: usize) -> Option<f64> {
        self.defined[m].then(|| self.rho[m])
    }

    /// `∂_axis S` with neighbour differences taken modulo `2πħ`.
    pub fn ds(&self, node: usize, axis: usize) -> Option<f64> {
        if !self.defined[node] {
            return None;
        }
        let period = 2.0 * PI * self.hbar;
        let centre = self.s[node];
        first_at(&self.grid, node, axis, |m| self.defined[m].then(|| nearest(self.s[m], centre, period) - centre))
    }

    pub fn drho(&self, node: usize, axis: usize) -> Option<f64> {
        self.rho_at(node)?;
        first_at(&self.grid, node, axis, |m| self.rho_at(m))
    }

    /// `Δρ/ρ` with the 3-point stencil.
    pub fn laplacian_ratio(&self, node: usize) -> Option<f64> {
        let r = self.rho_at(node)?;
        let mut acc = 0.0;
        for axis in 0..self.grid.dim() {
            acc += second_at(&self.grid, node, axis, |m| self.rho_at(m))?;
        }
        Some(acc / r)
    }

    fn vector_field<F: Fn(usize, usize) -> Option<f64>>(&self, f: F) -> GridField {
        let sig = Signature::euclidean(self.grid.dim()).expect("at most 3 axes");
        let mut out = GridField::zeros(self.grid.clone(), sig).expect("matching signature");
        let w = out.width();
        let data = out.data_mut();
        for node in 0..self.grid.node_count() {
            for axis in 0..self.grid.dim() {
                data[node * w + (1 << axis)] = f(node, axis).unwrap_or(f64::NAN);
            }
        }
        out
    }
}

/// `Q = −(ħ²/2m) Δρ/ρ`; NaN where undefined.
pub fn quantum_potential(pf: &PolarField, variant: super::Variant) -> Result<ScalarMap, BohmError> {
    let super::Variant::Standard { mass } = variant else {
        return Err(BohmError::MissingMass);
    };
    variant.validate()?;
    let c = -pf.hbar * pf.hbar / (2.0 * mass);
    let values = (0..pf.grid.node_count()).map(|n| pf.laplacian_ratio(n).map_or(f64::NAN, |l| c * l)).collect();
    Ok(ScalarMap { grid: pf.grid.clone(), values })
}

/// `∇ρ/ρ` as a vector field; NaN where undefined.
pub fn osmotic_velocity(pf: &PolarField) -> GridField {
    pf.vector_field(|n, a| Some(pf.drho(n, a)? / pf.rho[n]))
}

/// `∇S` as a vector field; NaN where undefined.
pub fn bohm_momentum(pf: &PolarField) -> GridField {
    pf.vector_field(|n, a| pf.ds(n, a))
}

/// `−ħ I (∇ρ/ρ)` in Cl(2): equals `∇S` wherever the field is monogenic.
pub fn momentum_from_osmotic(pf: &PolarField) -> Result<GridField, BohmError> {
    if pf.grid.dim() != 2 {
        return Err(BohmError::Dimension(2));
    }
    let u = osmotic_velocity(pf);
    let sig = u.signature();
    let factor = Multivector::pseudoscalar(sig).scale(-pf.hbar);
    let mut out = u.clone();
    for n in 0..pf.grid.node_count() {
        out.set(n, &factor.geometric_product(&u.value(n)).map_err(crate::grid::GridError::from)?)?;
    }
    Ok(out)
}

/// `∇ρ/ρ + (∇S) I/ħ` in Cl(2). Its magnitude is `|∇φ|/ρ`.
pub fn cl2_polar_residual(pf: &PolarField) -> Result<GridField, BohmError> {
    if pf.grid.dim() != 2 {
        return Err(BohmError::Dimension(2));
    }
    let u = osmotic_velocity(pf);
    let p = bohm_momentum(pf);
    let sig = u.signature();
    let i = Multivector::pseudoscalar(sig);
    let mut out = u.clone();
    for n in 0..pf.grid.node_count() {
        let pi = p.value(n).geometric_product(&i).map_err(crate::grid::GridError::from)?.scale(1.0 / pf.hbar);
        let r = u.value(n).try_add(&pi).map_err(crate::grid::GridError::from)?;
        out.set(n, &r)?;
    }
    debug_assert!(out.active_blades().iter().all(|b| b.grade() == 1 || *b == Blade::SCALAR));
    Ok(out)
}
