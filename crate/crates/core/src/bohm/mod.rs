//! Polar (Bohm) form `φ = ρ e^{iS/ħ}` of complex fields and the dynamics
//! built on it: quantum potential, osmotic velocity and momentum,
//! Crank–Nicolson evolution, Hamilton–Jacobi and continuity residuals,
//! trajectories, plane-wave dispersion and heat-equation gradient flow.

mod evolve;
mod heat;
mod polar;
mod residuals;
mod trajectories;
mod wave;

pub use evolve::{evolve, norm, EvolutionSeries};
pub use heat::{heat_gradient_flow_check, HeatReport, HeatScheme};
pub use polar::{
    bohm_momentum, cl2_polar_residual, momentum_from_osmotic, osmotic_velocity, polar_decompose, quantum_potential,
    unwrap_path, PolarField, RHO_TOL,
};
pub use residuals::{hj_and_continuity_residuals, FrameDiagnostics, ResidualSummary};
pub use trajectories::{bohm_trajectories, Termination, Trajectory};
pub use wave::{de_broglie, fit_frequency, plane_wave_residual, WaveParams};

use serde::{Deserialize, Serialize};

use crate::grid::GridError;

/// Which Schrödinger-type equation `iħ ∂ψ/∂t = −K ∂²ψ + Vψ` is meant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum Variant {
    /// `K = ħ²/2m`, `V = U`.
    Standard { mass: f64 },
    /// `K = ħ²/E₀`, `V = M²/E₀ + U`.
    Modified { e0: f64, big_m: f64 },
}

impl Variant {
    /// Kinetic coefficient `K`.
    pub fn kinetic(&self, hbar: f64) -> f64 {
        match *self {
            Variant::Standard { mass } => hbar * hbar / (2.0 * mass),
            Variant::Modified { e0, .. } => hbar * hbar / e0,
        }
    }

    /// Constant potential added by the variant.
    pub fn offset(&self) -> f64 {
        match *self {
            Variant::Standard { .. } => 0.0,
            Variant::Modified { e0, big_m } => big_m * big_m / e0,
        }
    }

    /// Velocity per unit action gradient, `2K/ħ²` (`1/m` or `2/E₀`).
    pub fn mobility(&self, hbar: f64) -> f64 {
        2.0 * self.kinetic(hbar) / (hbar * hbar)
    }

    pub fn validate(&self) -> Result<(), BohmError> {
        let ok = match *self {
            Variant::Standard { mass } => mass > 0.0 && mass.is_finite(),
            Variant::Modified { e0, big_m } => e0 > 0.0 && e0.is_finite() && big_m >= 0.0 && big_m.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(BohmError::BadParameter("mass and E0 must be positive, M nonnegative"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BohmError {
    #[error("invalid parameter: {0}")]
    BadParameter(&'static str),
    #[error("the quantum potential needs the mass variant")]
    MissingMass,
    #[error("operation needs a {0}-dimensional grid")]
    Dimension(usize),
    #[error("non-finite value after step {0}")]
    NonFinite(usize),
    #[error("need at least {0} frames")]
    TooFewFrames(usize),
    #[error("seed {0} lies where the amplitude vanishes or outside the grid")]
    BadSeed(f64),
    #[error("clamped evolution needs zero end values")]
    NonzeroBoundary,
    #[error("explicit heat step is unstable: kappa*dt/h^2 = {0} > 0.5")]
    Unstable(f64),
    #[error(transparent)]
    Grid(#[from] GridError),
}
