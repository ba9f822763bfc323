use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{polar_decompose, BohmError, EvolutionSeries, PolarField};
use crate::grid::ScalarMap;

/// Norms of a residual over the nodes where `ρ ≥ floor · max ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max: f64,
    /// `(Σ ρ² r² h)^½`, weighted by probability density.
    pub weighted_l2: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDiagnostics {
    pub frame: usize,
    pub time: f64,
    /// `−K Δρ/ρ`.
    pub quantum_potential: ScalarMap,
    /// `∂S/∂t + K(∇S)²/ħ² + V + Q`.
    pub hj: ScalarMap,
    /// `∂ρ²/∂t + ∇·(ρ² (2K/ħ²) ∇S)`.
    pub continuity: ScalarMap,
    pub rho: Vec<f64>,
}

impl FrameDiagnostics {
    pub fn summary(map: &ScalarMap, rho: &[f64], floor: f64) -> ResidualSummary {
        let top = rho.iter().copied().fold(0.0, f64::max);
        let h = map.grid.cell_volume();
        let (mut max, mut l2, mut nodes) = (0.0f64, 0.0, 0);
        for (r, &p) in map.values.iter().zip(rho) {
            if p >= floor * top && r.is_finite() {
                max = max.max(r.abs());
                l2 += p * p * r * r * h;
                nodes += 1;
            }
        }
        ResidualSummary { max, weighted_l2: libm::sqrt(l2), nodes }
    }

    pub fn hj_summary(&self, floor: f64) -> ResidualSummary {
        Self::summary(&self.hj, &self.rho, floor)
    }

    pub fn continuity_summary(&self, floor: f64) -> ResidualSummary {
        Self::summary(&self.continuity, &self.rho, floor)
    }
}

/// Residuals of the Bohm pair at every interior frame, with centred time
/// differences. The time derivative of `S` is taken from the phase ratio
/// `ψ(t+dt)/ψ(t−dt)`, so it needs `|ΔS| < πħ` per two frames.
pub fn hj_and_continuity_residuals(series: &EvolutionSeries) -> Result<Vec<FrameDiagnostics>, BohmError> {
    if series.frames.len() < 3 {
        return Err(BohmError::TooFewFrames(3));
    }
    let hbar = series.hbar;
    let k = series.variant.kinetic(hbar);
    let mob = series.variant.mobility(hbar);
    let v0 = series.variant.offset();
    let grid = &series.grid;
    let nodes = grid.node_count();
    let mut out = Vec::new();
    for f in 1..series.frames.len() - 1 {
        let (prev, cur, next) = (&series.frames[f - 1], &series.frames[f], &series.frames[f + 1]);
        let pf: PolarField = polar_decompose(cur, hbar)?;
        let two_dt = 2.0 * series.dt;
        let mut q = alloc::vec![f64::NAN; nodes];
        let mut hj = alloc::vec![f64::NAN; nodes];
        let mut flux = alloc::vec![None; nodes];
        for n in 0..nodes {
            let grads: Option<Vec<f64>> = (0..grid.dim()).map(|a| pf.ds(n, a)).collect();
            if let Some(g) = &grads {
                flux[n] = Some(g.iter().map(|d| pf.rho[n] * pf.rho[n] * mob * d).collect::<Vec<f64>>());
            }
            let (a, b) = (prev.values()[n], next.values()[n]);
            if !pf.defined[n] || a.norm() < super::RHO_TOL || b.norm() < super::RHO_TOL {
                continue;
            }
            let st = hbar * (b * a.conj()).arg() / two_dt;
            if let (Some(g), Some(l)) = (grads, pf.laplacian_ratio(n)) {
                q[n] = -k * l;
                let grad2: f64 = g.iter().map(|d| d * d).sum();
                hj[n] = st + k * grad2 / (hbar * hbar) + v0 + series.potential[n] + q[n];
            }
        }
        let mut cont = alloc::vec![f64::NAN; nodes];
        for n in 0..nodes {
            if !pf.defined[n] {
                continue;
            }
            let dr2 = (next.values()[n].norm_sqr() - prev.values()[n].norm_sqr()) / two_dt;
            let mut div = Some(0.0);
            for a in 0..grid.dim() {
                let d = crate::grid::stencil::first_at(grid, n, a, |m| flux[m].as_ref().map(|j| j[a]));
                div = div.zip(d).map(|(x, y)| x + y);
            }
            if let Some(d) = div {
                cont[n] = dr2 + d;
            }
        }
        out.push(FrameDiagnostics {
            frame: f,
            time: series.time(f),
            quantum_potential: ScalarMap { grid: grid.clone(), values: q },
            hj: ScalarMap { grid: grid.clone(), values: hj },
            continuity: ScalarMap { grid: grid.clone(), values: cont },
            rho: pf.rho.clone(),
        });
    }
    Ok(out)
}
