use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::BohmError;
use crate::grid::{Boundary, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatScheme {
    Explicit,
    CrankNicolson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatReport {
    pub times: Vec<f64>,
    /// `E = Σ ((φ_{i+1} − φ_i)/h)² h` per frame.
    pub energies: Vec<f64>,
    /// No frame raised `E` by more than roundoff.
    pub monotone: bool,
    pub max_increase: f64,
    pub final_field: Vec<f64>,
}

fn energy(phi: &[f64], h: f64) -> f64 {
    let n = phi.len();
    (0..n).map(|i| (phi[(i + 1) % n] - phi[i]) / h).map(|d| d * d * h).sum()
}

/// Steps `∂φ/∂t = κ ∂²φ` on a periodic 1-D grid and tracks the Dirichlet
/// energy, which a gradient flow must never increase.
pub fn heat_gradient_flow_check(
    grid: &Grid,
    initial: &[f64],
    kappa: f64,
    dt: f64,
    steps: usize,
    scheme: HeatScheme,
) -> Result<HeatReport, BohmError> {
    if grid.dim() != 1 || grid.boundary()[0] != Boundary::Periodic {
        return Err(BohmError::Dimension(1));
    }
    if initial.len() != grid.node_count() {
        return Err(BohmError::Grid(crate::grid::GridError::ValueCount { expected: grid.node_count(), got: initial.len() }));
    }
    if !(kappa > 0.0 && dt > 0.0) {
        return Err(BohmError::BadParameter("kappa and dt must be positive"));
    }
    let h = grid.spacing()[0];
    let r = kappa * dt / (h * h);
    if scheme == HeatScheme::Explicit && r > 0.5 {
        return Err(BohmError::Unstable(r));
    }
    let n = initial.len();
    let mut phi = initial.to_vec();
    let mut times = alloc::vec![0.0];
    let mut energies = alloc::vec![energy(&phi, h)];
    let scale = energies[0].max(f64::MIN_POSITIVE);
    let mut max_increase = 0.0f64;
    let lap = |p: &[f64], i: usize| p[(i + n - 1) % n] - 2.0 * p[i] + p[(i + 1) % n];
    for step in 1..=steps {
        let next: Vec<f64> = match scheme {
            HeatScheme::Explicit => (0..n).map(|i| phi[i] + r * lap(&phi, i)).collect(),
            HeatScheme::CrankNicolson => {
                let rhs: Vec<f64> = (0..n).map(|i| phi[i] + 0.5 * r * lap(&phi, i)).collect();
                solve_cyclic_real(1.0 + r, -0.5 * r, &rhs)
            }
        };
        phi = next;
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(BohmError::NonFinite(step));
        }
        let e = energy(&phi, h);
        max_increase = max_increase.max(e - energies[energies.len() - 1]);
        energies.push(e);
        times.push(step as f64 * dt);
    }
    Ok(HeatReport { times, energies, monotone: max_increase <= 1e-13 * scale, max_increase, final_field: phi })
}

/// Symmetric circulant tridiagonal solve (`diag`, `off` on both sides and
/// the corners) through Sherman–Morrison.
fn solve_cyclic_real(diag: f64, off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let gamma = -diag;
    let mut d = alloc::vec![diag; n];
    d[0] -= gamma;
    d[n - 1] -= off * off / gamma;
    let thomas = |b: &mut Vec<f64>| {
        let mut c = alloc::vec![0.0; n];
        let mut beta = d[0];
        b[0] /= beta;
        for i in 1..n {
            c[i - 1] = off / beta;
            beta = d[i] - off * c[i - 1];
            b[i] = (b[i] - off * b[i - 1]) / beta;
        }
        for i in (0..n - 1).rev() {
            b[i] -= c[i] * b[i + 1];
        }
    };
    let mut x = rhs.to_vec();
    let mut u = alloc::vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = off;
    thomas(&mut x);
    thomas(&mut u);
    let fact = (x[0] + off * x[n - 1] / gamma) / (1.0 + u[0] + off * u[n - 1] / gamma);
    x.iter().zip(&u).map(|(a, b)| a - fact * b).collect()
}
