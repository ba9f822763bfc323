use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::EvolutionSeries;

/// Plane-wave ansatz `e^{i(p·x − E₀t)/ħ}` with mass parameter `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub e0: f64,
    pub p: Vec<f64>,
    pub big_m: f64,
    pub hbar: f64,
}

/// `E₀ − (|p|² + M²)/E₀`: zero exactly when the ansatz solves the
/// modified equation, i.e. when `E₀² − |p|² = M²`.
pub fn plane_wave_residual(w: &WaveParams) -> f64 {
    let p2: f64 = w.p.iter().map(|x| x * x).sum();
    w.e0 - (p2 + w.big_m * w.big_m) / w.e0
}

/// `(ω, k) = (E₀/ħ, p/ħ)`.
pub fn de_broglie(w: &WaveParams) -> (f64, Vec<f64>) {
    (w.e0 / w.hbar, w.p.iter().map(|p| p / w.hbar).collect())
}

/// Angular frequency `ω` from a least-squares fit of the unwrapped phase
/// at `node` against time, for `ψ ∝ e^{−iωt}`.
pub fn fit_frequency(series: &EvolutionSeries, node: usize) -> f64 {
    let samples: Vec<_> = series.frames.iter().map(|f| f.values()[node]).collect();
    let phase = super::unwrap_path(&samples, 1.0);
    let n = phase.len() as f64;
    let times: Vec<f64> = (0..phase.len()).map(|f| series.time(f)).collect();
    let tm = times.iter().sum::<f64>() / n;
    let pm = phase.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (t, p) in times.iter().zip(&phase) {
        num += (t - tm) * (p - pm);
        den += (t - tm) * (t - tm);
    }
    -num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohm::{evolve, Variant};
    use crate::grid::{Boundary, ComplexField, Grid};
    use num_complex::Complex64;

    fn w(e0: f64, p: &[f64], m: f64, hbar: f64) -> WaveParams {
        WaveParams { e0, p: p.to_vec(), big_m: m, hbar }
    }

    #[test]
    fn residual_examples() {
        assert_eq!(plane_wave_residual(&w(5.0, &[4.0], 3.0, 1.0)), 0.0);
        assert_eq!(plane_wave_residual(&w(1.7, &[1.7], 0.0, 1.0)), 0.0);
        assert_eq!(plane_wave_residual(&w(2.0, &[1.0], 1.0, 1.0)), 1.0);
    }

    #[test]
    fn de_broglie_relations() {
        assert_eq!(de_broglie(&w(1.0, &[0.0], 0.0, 1.0)).0, 1.0);
        assert_eq!(de_broglie(&w(2.0, &[4.0], 0.0, 2.0)), (1.0, alloc::vec![2.0]));
    }

    #[test]
    fn evolved_phase_rotates_at_e0() {
        let n = 512;
        let g = Grid::uniform(1, n, 0.0, 2.0 * core::f64::consts::PI, Boundary::Periodic).unwrap();
        let v = (0..n).map(|i| Complex64::from_polar(1.0, 4.0 * g.coords(i)[0])).collect();
        let init = ComplexField::new(g, v).unwrap();
        let s = evolve(&init, &alloc::vec![0.0; n], "free", 1.0, Variant::Modified { e0: 5.0, big_m: 3.0 }, 1e-3, 1000, 10).unwrap();
        let omega = fit_frequency(&s, 17);
        assert!((omega - 5.0).abs() < 5e-3, "{omega}");
        for f in &s.frames {
            assert!(f.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
        }
    }
}
