use alloc::vec::Vec;
use core::f64::consts::PI;

use super::GridError;
use crate::clifford::{Multivector, Signature};

/// Closed planar curve sampled for quadrature, traversed counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Contour {
    Circle { center: [f64; 2], radius: f64, samples: usize },
    /// Closed polygon through the points (last joins first).
    Points(Vec<[f64; 2]>),
}

impl Contour {
    pub fn points(&self) -> Vec<[f64; 2]> {
        match self {
            Contour::Circle { center, radius, samples } => (0..*samples)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / *samples as f64;
                    [center[0] + radius * libm::cos(t), center[1] + radius * libm::sin(t)]
                })
                .collect(),
            Contour::Points(p) => p.clone(),
        }
    }

    /// Tangent times parameter step at each sample, so `Σ tangent_k`
    /// approximates `∮ dx` by the trapezoid rule.
    pub fn tangents(&self) -> Vec<[f64; 2]> {
        match self {
            Contour::Circle { radius, samples, .. } => {
                let dt = 2.0 * PI / *samples as f64;
                (0..*samples)
                    .map(|k| {
                        let t = dt * k as f64;
                        [-radius * libm::sin(t) * dt, radius * libm::cos(t) * dt]
                    })
                    .collect()
            }
            Contour::Points(p) => {
                let n = p.len();
                (0..n)
                    .map(|k| {
                        let a = p[(k + n - 1) % n];
                        let b = p[(k + 1) % n];
                        [(b[0] - a[0]) / 2.0, (b[1] - a[1]) / 2.0]
                    })
                    .collect()
            }
        }
    }

    /// Longest gap between consecutive samples.
    pub fn max_spacing(&self) -> f64 {
        let p = self.points();
        (0..p.len())
            .map(|k| {
                let b = p[(k + 1) % p.len()];
                libm::hypot(b[0] - p[k][0], b[1] - p[k][1])
            })
            .fold(0.0, f64::max)
    }

    /// Winding number of the polygon around `y` (0 outside).
    pub fn winding_around(&self, y: [f64; 2]) -> i64 {
        let p = self.points();
        let mut total = 0.0;
        for k in 0..p.len() {
            let a = p[k];
            let b = p[(k + 1) % p.len()];
            let (ax, ay) = (a[0] - y[0], a[1] - y[1]);
            let (bx, by) = (b[0] - y[0], b[1] - y[1]);
            total += libm::atan2(ax * by - ay * bx, ax * bx + ay * by);
        }
        libm::round(total / (2.0 * PI)) as i64
    }

    /// Shortest distance from `y` to the polygon.
    pub fn distance_to(&self, y: [f64; 2]) -> f64 {
        let p = self.points();
        let mut best = f64::INFINITY;
        for k in 0..p.len() {
            let a = p[k];
            let b = p[(k + 1) % p.len()];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len2 = dx * dx + dy * dy;
            let t = if len2 > 0.0 { (((y[0] - a[0]) * dx + (y[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
            best = best.min(libm::hypot(a[0] + t * dx - y[0], a[1] + t * dy - y[1]));
        }
        best
    }
}

/// Value at `y` of a field monogenic inside the contour, from its samples
/// on the contour:
/// `f(y) = (1/2π) I⁻¹ Σ_k (x_k − y)/|x_k − y|² · dx_k · f(x_k)`.
///
/// `values[k]` is the field at `contour.points()[k]` and must lie in
/// Euclidean `Cl(2)`.
pub fn cauchy_reconstruct(contour: &Contour, values: &[Multivector], y: [f64; 2]) -> Result<Multivector, GridError> {
    let sig = Signature::euclidean(2)?;
    let points = contour.points();
    if points.len() < 3 {
        return Err(GridError::ContourTooShort(3));
    }
    if values.len() != points.len() {
        return Err(GridError::ValueCount { expected: points.len(), got: values.len() });
    }
    if values.iter().any(|v| v.signature() != sig) {
        return Err(GridError::NotPlanar);
    }
    if contour.winding_around(y) == 0 {
        return Err(GridError::OutsideContour);
    }
    let distance = contour.distance_to(y);
    let min = 2.0 * contour.max_spacing();
    if distance <= min {
        return Err(GridError::TooCloseToContour { distance, min });
    }
    let mut sum = Multivector::zero(sig);
    for ((x, t), f) in points.iter().zip(contour.tangents()).zip(values) {
        let (rx, ry) = (x[0] - y[0], x[1] - y[1]);
        let r2 = rx * rx + ry * ry;
        let kernel = Multivector::vector(sig, &[rx / r2, ry / r2])?;
        let dx = Multivector::vector(sig, &t)?;
        sum = sum.try_add(&kernel.geometric_product(&dx)?.geometric_product(f)?)?;
    }
    let i_inv = Multivector::pseudoscalar(sig).blade_inverse()?;
    Ok(i_inv.geometric_product(&sum)?.scale(1.0 / (2.0 * PI)))
}
