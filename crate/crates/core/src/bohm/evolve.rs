use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BohmError, Variant};
use crate::grid::{Boundary, ComplexField, Grid};

/// Frames of a 1-D evolution at uniform spacing in time.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionSeries {
    pub grid: Grid,
    pub hbar: f64,
    pub variant: Variant,
    /// Time between stored frames.
    pub dt: f64,
    /// Solver step (`dt / save_every`).
    pub step: f64,
    pub potential: Vec<f64>,
    pub potential_label: String,
    pub frames: Vec<ComplexField>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct Tridiagonal {
    lower: Complex64,
    upper: Complex64,
}

/// `Σ |ψ|² h`, the discrete L² norm squared.
pub fn norm(psi: &ComplexField) -> f64 {
    psi.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * psi.grid().spacing()[0]
}

/// Thomas algorithm for a constant-off-diagonal complex tridiagonal system.
fn thomas(t: Tridiagonal, diag: &[Complex64], rhs: &mut [Complex64]) {
    let n = diag.len();
    let mut c = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = t.upper / beta;
        beta = diag[i] - t.lower * c[i - 1];
        rhs[i] = (rhs[i] - t.lower * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i] * next;
    }
}

/// Cyclic tridiagonal solve via Sherman–Morrison on top of [`thomas`].
fn cyclic(t: Tridiagonal, diag: &[Complex64], rhs: &mut [Complex64]) {
    let n = diag.len();
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= t.lower * t.upper / gamma;
    let mut u = alloc::vec![Complex64::new(0.0, 0.0); n];
    u[0] = gamma;
    u[n - 1] = t.lower;
    thomas(t, &d, rhs);
    thomas(t, &d, &mut u);
    let fact = (rhs[0] + t.upper * rhs[n - 1] / gamma) / (Complex64::new(1.0, 0.0) + u[0] + t.upper * u[n - 1] / gamma);
    for (x, ui) in rhs.iter_mut().zip(&u) {
        *x -= fact * ui;
    }
}

/// Crank–Nicolson steps of `iħ ∂ψ/∂t = −K ∂²ψ + (V₀ + U)ψ` on a 1-D grid.
///
/// Periodic grids wrap; clamped grids hold `ψ = 0` at both ends. Every
/// `save_every`-th state is stored, starting with the initial one.
pub fn evolve(
    initial: &ComplexField,
    potential: &[f64],
    potential_label: &str,
    hbar: f64,
    variant: Variant,
    dt: f64,
    steps: usize,
    save_every: usize,
) -> Result<EvolutionSeries, BohmError> {
    variant.validate()?;
    let grid = initial.grid().clone();
    if grid.dim() != 1 {
        return Err(BohmError::Dimension(1));
    }
    if !(dt > 0.0 && dt.is_finite() && hbar > 0.0) || save_every == 0 {
        return Err(BohmError::BadParameter("dt, hbar and save_every must be positive"));
    }
    let n = grid.node_count();
    if potential.len() != n {
        return Err(BohmError::Grid(crate::grid::GridError::ValueCount { expected: n, got: potential.len() }));
    }
    let periodic = grid.boundary()[0] == Boundary::Periodic;
    let mut psi = initial.values().to_vec();
    if !periodic {
        if psi[0].norm() > 1e-12 || psi[n - 1].norm() > 1e-12 {
            return Err(BohmError::NonzeroBoundary);
        }
        psi[0] = Complex64::new(0.0, 0.0);
        psi[n - 1] = Complex64::new(0.0, 0.0);
    }
    let h = grid.spacing()[0];
    let k = variant.kinetic(hbar) / (h * h);
    let v0 = variant.offset();
    // A = 1 + a·H, B = 1 − a·H with a = i dt / 2ħ
    let a = Complex64::new(0.0, dt / (2.0 * hbar));
    let hdiag: Vec<f64> = potential.iter().map(|u| 2.0 * k + v0 + u).collect();
    let off = -k;
    let range = if periodic { 0..n } else { 1..n - 1 };
    let diag_a: Vec<Complex64> = range.clone().map(|i| 1.0 + a * hdiag[i]).collect();
    let t = Tridiagonal { lower: a * off, upper: a * off };

    let mut frames = alloc::vec![initial_frame(&grid, &psi)];
    let mut rhs = alloc::vec![Complex64::new(0.0, 0.0); range.len()];
    for step in 1..=steps {
        for (slot, i) in rhs.iter_mut().zip(range.clone()) {
            let left = if i == 0 { psi[n - 1] } else { psi[i - 1] };
            let right = if i == n - 1 { psi[0] } else { psi[i + 1] };
            *slot = psi[i] - a * (hdiag[i] * psi[i] + off * (left + right));
        }
        if periodic {
            cyclic(t, &diag_a, &mut rhs);
        } else {
            thomas(t, &diag_a, &mut rhs);
        }
        for (i, v) in range.clone().zip(&rhs) {
            psi[i] = *v;
        }
        if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(BohmError::NonFinite(step));
        }
        if step % save_every == 0 {
            frames.push(initial_frame(&grid, &psi));
        }
    }
    Ok(EvolutionSeries {
        grid,
        hbar,
        variant,
        dt: dt * save_every as f64,
        step: dt,
        potential: potential.to_vec(),
        potential_label: potential_label.into(),
        frames,
    })
}

fn initial_frame(grid: &Grid, psi: &[Complex64]) -> ComplexField {
    ComplexField::new(grid.clone(), psi.to_vec()).expect("same grid")
}

impl EvolutionSeries {
    pub fn time(&self, frame: usize) -> f64 {
        frame as f64 * self.dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &Grid, x0: f64, sigma: f64, k0: f64) -> ComplexField {
        let v = (0..grid.node_count())
            .map(|n| {
                let x = grid.coords(n)[0] - x0;
                Complex64::from_polar(libm::exp(-x * x / (4.0 * sigma * sigma)), k0 * x)
            })
            .collect();
        ComplexField::new(grid.clone(), v).unwrap()
    }

    #[test]
    fn cyclic_solver_matches_dense() {
        let n = 6;
        let t = Tridiagonal { lower: Complex64::new(0.3, -0.1), upper: Complex64::new(0.3, -0.1) };
        let diag: Vec<Complex64> = (0..n).map(|i| Complex64::new(2.0 + i as f64, 0.5)).collect();
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut b: Vec<Complex64> = (0..n)
            .map(|i| diag[i] * x[i] + t.lower * x[(i + n - 1) % n] + t.upper * x[(i + 1) % n])
            .collect();
        cyclic(t, &diag, &mut b);
        for (a, b) in b.iter().zip(&x) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn norm_is_conserved() {
        let g = Grid::uniform(1, 256, -20.0, 20.0, Boundary::Clamped).unwrap();
        let psi = gaussian(&g, 0.0, 1.0, 1.0);
        let s = evolve(&psi, &alloc::vec![0.0; 256], "free", 1.0, Variant::Standard { mass: 1.0 }, 0.01, 1000, 100).unwrap();
        let n0 = norm(&s.frames[0]);
        for f in &s.frames {
            assert!((norm(f) - n0).abs() < 1e-10);
        }
        assert_eq!(s.frames.len(), 11);
    }

    #[test]
    fn barrier_conserves_total() {
        let g = Grid::uniform(1, 400, -30.0, 30.0, Boundary::Clamped).unwrap();
        let psi = gaussian(&g, -10.0, 1.5, 2.0);
        let u: Vec<f64> = (0..400).map(|n| if g.coords(n)[0].abs() < 0.5 { 2.5 } else { 0.0 }).collect();
        let s = evolve(&psi, &u, "barrier", 1.0, Variant::Standard { mass: 1.0 }, 0.005, 1200, 1200).unwrap();
        let last = s.frames.last().unwrap();
        let h = g.spacing()[0];
        let (mut left, mut right) = (0.0, 0.0);
        for (n, z) in last.values().iter().enumerate() {
            if g.coords(n)[0] < 0.0 {
                left += z.norm_sqr() * h;
            } else {
                right += z.norm_sqr() * h;
            }
        }
        assert!(right > 0.01 && left > 0.01);
        assert!((left + right - norm(&s.frames[0])).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_input() {
        let g = Grid::uniform(1, 16, 0.0, 1.0, Boundary::Clamped).unwrap();
        let one = ComplexField::new(g.clone(), alloc::vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        let r = evolve(&one, &alloc::vec![0.0; 16], "", 1.0, Variant::Standard { mass: 1.0 }, 0.1, 1, 1);
        assert_eq!(r, Err(BohmError::NonzeroBoundary));
        let p = Grid::uniform(1, 16, 0.0, 1.0, Boundary::Periodic).unwrap();
        let one = ComplexField::new(p, alloc::vec![Complex64::new(1.0, 0.0); 16]).unwrap();
        let r = evolve(&one, &alloc::vec![f64::INFINITY; 16], "", 1.0, Variant::Standard { mass: 1.0 }, 0.1, 3, 1);
        assert!(matches!(r, Err(BohmError::NonFinite(1))));
    }
}
