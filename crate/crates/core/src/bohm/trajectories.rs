use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{polar_decompose, BohmError, EvolutionSeries};
use crate::grid::Boundary;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// The path reached a node where the amplitude vanishes.
    EnteredNode { t: f64, x: f64 },
    LeftDomain { t: f64, x: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: f64,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub termination: Termination,
}

struct Flow<'a> {
    series: &'a EvolutionSeries,
    /// Velocity per frame per node; NaN where undefined.
    v: Vec<Vec<f64>>,
}

enum Probe {
    Value(f64),
    Node,
    Outside,
}

impl Flow<'_> {
    fn at_frame(&self, f: usize, x: f64) -> Probe {
        let g = &self.series.grid;
        let n = g.shape()[0];
        let h = g.spacing()[0];
        let t = (x - g.origin()[0]) / h;
        let (i, j, s) = match g.boundary()[0] {
            Boundary::Periodic => {
                let w = t.rem_euclid(n as f64);
                let i = (libm::floor(w) as usize).min(n - 1);
                (i, (i + 1) % n, w - i as f64)
            }
            Boundary::Clamped => {
                if !(0.0..=(n - 1) as f64).contains(&t) {
                    return Probe::Outside;
                }
                let i = (libm::floor(t) as usize).min(n - 2);
                (i, i + 1, t - i as f64)
            }
        };
        let (a, b) = (self.v[f][i], self.v[f][j]);
        if a.is_nan() || b.is_nan() {
            Probe::Node
        } else {
            Probe::Value((1.0 - s) * a + s * b)
        }
    }

    /// Velocity at time `t` (linear between frames).
    fn velocity(&self, t: f64, x: f64) -> Probe {
        let last = self.v.len() - 1;
        let pos = (t / self.series.dt).clamp(0.0, last as f64);
        let f = (libm::floor(pos) as usize).min(last.saturating_sub(1));
        let alpha = pos - f as f64;
        match (self.at_frame(f, x), self.at_frame((f + 1).min(last), x)) {
            (Probe::Value(a), Probe::Value(b)) => Probe::Value((1.0 - alpha) * a + alpha * b),
            (Probe::Outside, _) | (_, Probe::Outside) => Probe::Outside,
            _ => Probe::Node,
        }
    }
}

/// Integrates `dx/dt = (2K/ħ²) ∂S/∂x` (that is `∇S/m`, or `2∇S/E₀`) with
/// RK4, `substeps` steps per frame interval.
pub fn bohm_trajectories(series: &EvolutionSeries, seeds: &[f64], substeps: usize) -> Result<Vec<Trajectory>, BohmError> {
    if series.grid.dim() != 1 {
        return Err(BohmError::Dimension(1));
    }
    if series.frames.len() < 2 || substeps == 0 {
        return Err(BohmError::TooFewFrames(2));
    }
    let mob = series.variant.mobility(series.hbar);
    let mut v = Vec::with_capacity(series.frames.len());
    for frame in &series.frames {
        let pf = polar_decompose(frame, series.hbar)?;
        v.push((0..series.grid.node_count()).map(|n| pf.ds(n, 0).map_or(f64::NAN, |d| mob * d)).collect());
    }
    let flow = Flow { series, v };
    let dt = series.dt / substeps as f64;
    let total = (series.frames.len() - 1) * substeps;
    let mut out = Vec::new();
    for &seed in seeds {
        if !matches!(flow.at_frame(0, seed), Probe::Value(_)) {
            return Err(BohmError::BadSeed(seed));
        }
        let mut x = seed;
        let mut traj = Trajectory { seed, times: alloc::vec![0.0], positions: alloc::vec![seed], termination: Termination::Completed };
        for step in 0..total {
            let t = step as f64 * dt;
            let stage = |tt: f64, xx: f64| flow.velocity(tt, xx);
            let k = (|| {
                let k1 = value(stage(t, x))?;
                let k2 = value(stage(t + dt / 2.0, x + dt / 2.0 * k1))?;
                let k3 = value(stage(t + dt / 2.0, x + dt / 2.0 * k2))?;
                let k4 = value(stage(t + dt, x + dt * k3))?;
                Ok((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0)
            })();
            match k {
                Ok(k) => {
                    x += dt * k;
                    traj.times.push(t + dt);
                    traj.positions.push(x);
                }
                Err(stop) => {
                    traj.termination = match stop {
                        Stop::Node => Termination::EnteredNode { t, x },
                        Stop::Outside => Termination::LeftDomain { t, x },
                    };
                    break;
                }
            }
        }
        out.push(traj);
    }
    Ok(out)
}

enum Stop {
    Node,
    Outside,
}

fn value(p: Probe) -> Result<f64, Stop> {
    match p {
        Probe::Value(v) => Ok(v),
        Probe::Node => Err(Stop::Node),
        Probe::Outside => Err(Stop::Outside),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohm::{evolve, Variant};
    use crate::grid::{ComplexField, Grid};
    use num_complex::Complex64;

    #[test]
    fn plane_wave_paths_are_straight() {
        let n = 128;
        let g = Grid::uniform(1, n, 0.0, 2.0 * core::f64::consts::PI, Boundary::Periodic).unwrap();
        let v = (0..n).map(|i| Complex64::from_polar(1.0, 2.0 * g.coords(i)[0])).collect();
        let init = ComplexField::new(g, v).unwrap();
        let s = evolve(&init, &alloc::vec![0.0; n], "free", 1.0, Variant::Standard { mass: 2.0 }, 1e-3, 200, 20).unwrap();
        let tr = bohm_trajectories(&s, &[1.0, 3.0], 4).unwrap();
        // phase differences are exact for a plane wave, so the slope is k/m
        let slope = 2.0 / 2.0;
        for t in tr {
            assert_eq!(t.termination, Termination::Completed);
            for (time, x) in t.times.iter().zip(&t.positions) {
                assert!((x - t.seed - slope * time).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn seed_on_node_is_rejected() {
        let g = Grid::uniform(1, 32, -1.0, 1.0, Boundary::Clamped).unwrap();
        let v = (0..32).map(|i| Complex64::new(if i == 0 || i == 31 { 0.0 } else { 1.0 }, 0.0)).collect();
        let init = ComplexField::new(g, v).unwrap();
        let s = evolve(&init, &alloc::vec![0.0; 32], "free", 1.0, Variant::Standard { mass: 1.0 }, 1e-3, 2, 1).unwrap();
        assert_eq!(bohm_trajectories(&s, &[-1.0], 1), Err(BohmError::BadSeed(-1.0)));
    }
}
