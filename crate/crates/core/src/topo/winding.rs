use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{PlaneField, TopoError};
use crate::grid::Contour;

/// Default magnitude below which a contour sample counts as a zero.
pub const ZERO_TOL: f64 = 1e-9;
/// Phase increments at or above this are refined (function fields) or
/// rejected (raw samples). Principal increments can never exceed π, so the
/// test has to be stricter than π to detect aliasing.
const MAX_JUMP: f64 = PI / 2.0;
const MAX_DEPTH: u32 = 24;
pub(crate) const MIN_SAMPLES: usize = 16;

/// Field samples along a (possibly refined) contour.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseWalk {
    pub points: Vec<[f64; 2]>,
    pub values: Vec<Complex64>,
    /// `increments[k]` is the principal phase step from sample `k` to
    /// `k + 1` (cyclically).
    pub increments: Vec<f64>,
}

impl PhaseWalk {
    pub fn total(&self) -> f64 {
        self.increments.iter().sum()
    }
}

fn position(contour: &Contour, base: &[[f64; 2]], k: usize, s: f64) -> [f64; 2] {
    match contour {
        Contour::Circle { center, radius, samples } => {
            let t = 2.0 * PI * (k as f64 + s) / *samples as f64;
            [center[0] + radius * libm::cos(t), center[1] + radius * libm::sin(t)]
        }
        Contour::Points(_) => {
            let a = base[k];
            let b = base[(k + 1) % base.len()];
            [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
        }
    }
}

fn sample<F: PlaneField + ?Sized>(f: &F, p: [f64; 2], zero_tol: f64) -> Result<Complex64, TopoError> {
    let v = f.eval(p[0], p[1]);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(TopoError::NonFinite { x: p[0], y: p[1] });
    }
    let m = v.norm();
    if m < zero_tol {
        return Err(TopoError::ZeroOnContour { x: p[0], y: p[1], magnitude: m });
    }
    Ok(v)
}

fn step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Walk the contour, bisecting any segment whose phase step reaches π/2.
pub fn phase_walk<F: PlaneField + ?Sized>(f: &F, contour: &Contour, zero_tol: f64) -> Result<PhaseWalk, TopoError> {
    let base = contour.points();
    if base.len() < MIN_SAMPLES {
        return Err(TopoError::ContourTooShort(MIN_SAMPLES));
    }
    let mut walk = PhaseWalk { points: Vec::new(), values: Vec::new(), increments: Vec::new() };
    let first = sample(f, base[0], zero_tol)?;
    let mut prev = first;
    for k in 0..base.len() {
        let end = if k + 1 == base.len() { first } else { sample(f, base[k + 1], zero_tol)? };
        walk.points.push(base[k]);
        walk.values.push(prev);
        refine(f, contour, &base, k, (0.0, 1.0), (prev, end), zero_tol, 0, &mut walk)?;
        prev = end;
    }
    Ok(walk)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: PlaneField + ?Sized>(
    f: &F,
    contour: &Contour,
    base: &[[f64; 2]],
    k: usize,
    (s0, s1): (f64, f64),
    (v0, v1): (Complex64, Complex64),
    zero_tol: f64,
    depth: u32,
    walk: &mut PhaseWalk,
) -> Result<(), TopoError> {
    let d = step(v0, v1);
    if d.abs() < MAX_JUMP {
        walk.increments.push(d);
        return Ok(());
    }
    let sm = 0.5 * (s0 + s1);
    let pm = position(contour, base, k, sm);
    if depth >= MAX_DEPTH {
        return Err(TopoError::Undersampled { x: pm[0], y: pm[1], jump: d });
    }
    let vm = sample(f, pm, zero_tol)?;
    refine(f, contour, base, k, (s0, sm), (v0, vm), zero_tol, depth + 1, walk)?;
    walk.points.push(pm);
    walk.values.push(vm);
    refine(f, contour, base, k, (sm, s1), (vm, v1), zero_tol, depth + 1, walk)
}

fn round_winding(total: f64) -> Result<i64, TopoError> {
    let w = total / (2.0 * PI);
    let r = libm::round(w);
    if (w - r).abs() > 0.01 {
        return Err(TopoError::NotInteger(w));
    }
    Ok(r as i64)
}

/// `(1/2π) Σ` principal phase increments of `f` around the contour.
pub fn winding_number<F: PlaneField + ?Sized>(f: &F, contour: &Contour) -> Result<i64, TopoError> {
    round_winding(phase_walk(f, contour, ZERO_TOL)?.total())
}

/// Winding of a fixed cyclic list of samples. No refinement is possible,
/// so any step of π/2 or more is rejected as undersampled.
pub fn winding_from_samples(points: &[[f64; 2]], values: &[Complex64]) -> Result<i64, TopoError> {
    if values.len() < MIN_SAMPLES {
        return Err(TopoError::ContourTooShort(MIN_SAMPLES));
    }
    let mut total = 0.0;
    for k in 0..values.len() {
        let p = points.get(k).copied().unwrap_or([f64::NAN; 2]);
        let (a, b) = (values[k], values[(k + 1) % values.len()]);
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(TopoError::NonFinite { x: p[0], y: p[1] });
        }
        if a.norm() < ZERO_TOL {
            return Err(TopoError::ZeroOnContour { x: p[0], y: p[1], magnitude: a.norm() });
        }
        let d = step(a, b);
        if d.abs() >= MAX_JUMP {
            return Err(TopoError::Undersampled { x: p[0], y: p[1], jump: d });
        }
        total += d;
    }
    round_winding(total)
}

/// How to obtain `∇S` for the loop integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopRoute {
    /// `ħ Σ Δ(phase)`: the unwrapped phase difference along the walk.
    Phase,
    /// Trapezoid rule on `∇S·dx` with `∇S = ħ Im(∇φ/φ)` from central
    /// differences of step `1e-5` times the contour scale.
    Gradient,
}

/// `∮ ∇S·dx` with `S = ħ arg φ`.
pub fn born_sommerfeld_integral<F: PlaneField + ?Sized>(
    f: &F,
    contour: &Contour,
    hbar: f64,
    route: LoopRoute,
) -> Result<f64, TopoError> {
    match route {
        LoopRoute::Phase => Ok(hbar * phase_walk(f, contour, ZERO_TOL)?.total()),
        LoopRoute::Gradient => {
            let points = contour.points();
            if points.len() < MIN_SAMPLES {
                return Err(TopoError::ContourTooShort(MIN_SAMPLES));
            }
            let delta = 1e-5 * contour_scale(&points);
            let mut sum = 0.0;
            for (p, t) in points.iter().zip(contour.tangents()) {
                let v = sample(f, *p, ZERO_TOL)?;
                let dx = (f.eval(p[0] + delta, p[1]) - f.eval(p[0] - delta, p[1])) / (2.0 * delta);
                let dy = (f.eval(p[0], p[1] + delta) - f.eval(p[0], p[1] - delta)) / (2.0 * delta);
                let gx = hbar * (dx / v).im;
                let gy = hbar * (dy / v).im;
                if !(gx.is_finite() && gy.is_finite()) {
                    return Err(TopoError::NonFinite { x: p[0], y: p[1] });
                }
                sum += gx * t[0] + gy * t[1];
            }
            Ok(sum)
        }
    }
}

fn contour_scale(points: &[[f64; 2]]) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE)
}

/// `∮ m dx` for a constant vector `m`: the trapezoid sum of the tangents,
/// scaled. Zero for any closed contour; exposed as a diagnostic.
pub fn mass_loop_integral(m: [f64; 2], contour: &Contour) -> [f64; 2] {
    let mut s = [0.0; 2];
    for t in contour.tangents() {
        s[0] += t[0];
        s[1] += t[1];
    }
    [m[0] * s[0], m[1] * s[1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(samples: usize) -> Contour {
        Contour::Circle { center: [0.0, 0.0], radius: 1.0, samples }
    }

    #[test]
    fn powers_of_z() {
        for n in 0..6 {
            let f = move |z: Complex64| z.powu(n);
            assert_eq!(winding_number(&f, &circle(32)).unwrap(), n as i64);
        }
        let c = |z: Complex64| z.conj();
        assert_eq!(winding_number(&c, &circle(32)).unwrap(), -1);
    }

    #[test]
    fn coarse_contour_is_refined() {
        // 16 samples give steps of 0.75π for z^6, which get bisected
        let f = |z: Complex64| z.powu(6);
        let walk = phase_walk(&f, &circle(16), ZERO_TOL).unwrap();
        assert_eq!(walk.points.len(), 32);
        for samples in [16, 32, 64, 128] {
            assert_eq!(winding_number(&f, &circle(samples)).unwrap(), 6);
        }
    }

    #[test]
    fn zero_on_contour_is_an_error() {
        let f = |z: Complex64| z - Complex64::new(1.0, 0.0);
        assert!(matches!(winding_number(&f, &circle(32)), Err(TopoError::ZeroOnContour { .. })));
    }

    #[test]
    fn raw_samples_reject_aliasing() {
        let c = circle(16);
        let pts = c.points();
        let vals: Vec<Complex64> = pts.iter().map(|p| Complex64::new(p[0], p[1]).powu(5)).collect();
        assert!(matches!(winding_from_samples(&pts, &vals), Err(TopoError::Undersampled { .. })));
        let vals: Vec<Complex64> = pts.iter().map(|p| Complex64::new(p[0], p[1]).powu(2)).collect();
        assert_eq!(winding_from_samples(&pts, &vals).unwrap(), 2);
    }

    #[test]
    fn loop_integrals() {
        let theta = |z: Complex64| z / z.norm();
        for route in [LoopRoute::Phase, LoopRoute::Gradient] {
            let v = born_sommerfeld_integral(&theta, &circle(64), 1.0, route).unwrap();
            assert!((v - 2.0 * PI).abs() < 1e-8, "{route:?} {v}");
            let cube = |z: Complex64| z.powu(3);
            let v = born_sommerfeld_integral(&cube, &circle(64), 1.0, route).unwrap();
            assert!((v - 6.0 * PI).abs() < 1e-8);
            let pos = |z: Complex64| Complex64::new(2.0 + z.re * z.re, 0.0);
            assert!(born_sommerfeld_integral(&pos, &circle(64), 1.0, route).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn constant_mass_loop_vanishes() {
        let v = mass_loop_integral([1.5, -2.0], &circle(64));
        assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
    }
}
