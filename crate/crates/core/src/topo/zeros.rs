use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::winding::{born_sommerfeld_integral, winding_number, LoopRoute, MIN_SAMPLES};
use super::{PlaneField, TopoError};
use crate::grid::Contour;

/// Brute-force zero search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroOracle {
    /// Lattice points per axis over the contour's bounding box.
    pub lattice: usize,
}

impl Default for ZeroOracle {
    fn default() -> Self {
        Self { lattice: 161 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleZero {
    pub at: [f64; 2],
    pub multiplicity: i64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    /// `(1/2πi) ∮ dφ/φ`, rounded.
    pub argument: i64,
    /// The same before rounding.
    pub argument_raw: f64,
    pub oracle: Vec<OracleZero>,
    pub oracle_total: i64,
    pub agrees: bool,
    /// Relative size of `∂φ/∂x̄` inside the contour; near zero for
    /// holomorphic (monogenic) fields.
    pub holomorphy_defect: f64,
}

fn bbox(points: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    (lo, hi)
}

struct Lattice {
    lo: [f64; 2],
    h: [f64; 2],
    m: usize,
}

impl Lattice {
    fn new(contour: &Contour, m: usize) -> Self {
        let (lo, hi) = bbox(&contour.points());
        let m = m.max(8);
        Self { lo, h: [(hi[0] - lo[0]) / (m - 1) as f64, (hi[1] - lo[1]) / (m - 1) as f64], m }
    }

    fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.lo[0] + i as f64 * self.h[0], self.lo[1] + j as f64 * self.h[1]]
    }
}

/// Local minima of `|φ|` inside the contour whose small-circle winding is
/// nonzero.
fn oracle_zeros<F: PlaneField + ?Sized>(f: &F, contour: &Contour, cfg: ZeroOracle) -> Vec<OracleZero> {
    let lat = Lattice::new(contour, cfg.lattice);
    let m = lat.m;
    let mag: Vec<f64> = (0..m * m)
        .map(|k| {
            let p = lat.point(k % m, k / m);
            let v = f.eval(p[0], p[1]).norm();
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let mut candidates: Vec<(f64, [f64; 2])> = Vec::new();
    for j in 1..m - 1 {
        for i in 1..m - 1 {
            let c = mag[j * m + i];
            if !c.is_finite() {
                continue;
            }
            let mut strict = false;
            let mut minimum = true;
            for (di, dj) in [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
                let n = mag[(j as isize + dj) as usize * m + (i as isize + di) as usize];
                if n < c {
                    minimum = false;
                    break;
                }
                strict |= n > c;
            }
            let p = lat.point(i, j);
            if minimum && strict && contour.winding_around(p) != 0 {
                candidates.push((c, p));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let h = lat.h[0].max(lat.h[1]);
    let mut accepted: Vec<OracleZero> = Vec::new();
    for (c, p) in candidates {
        if accepted.iter().any(|z| libm::hypot(z.at[0] - p[0], z.at[1] - p[1]) < 2.5 * h) {
            continue;
        }
        let local = [1.5, 1.7, 1.9].iter().find_map(|r| {
            let small = Contour::Circle { center: p, radius: r * h, samples: 2 * MIN_SAMPLES };
            winding_number(f, &small).ok()
        });
        if let Some(w) = local.filter(|w| *w != 0) {
            accepted.push(OracleZero { at: p, multiplicity: w, magnitude: c });
        }
    }
    accepted
}

/// `max |φ_x + iφ_y| / max |∇φ|` over lattice nodes inside the contour,
/// with central differences.
pub fn holomorphy_defect<F: PlaneField + ?Sized>(f: &F, contour: &Contour, lattice: usize) -> f64 {
    let lat = Lattice::new(contour, lattice.min(41));
    let delta = 1e-5 * (lat.h[0].max(lat.h[1]) * (lat.m - 1) as f64);
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for j in 0..lat.m {
        for i in 0..lat.m {
            let p = lat.point(i, j);
            if contour.winding_around(p) == 0 {
                continue;
            }
            let fx = (f.eval(p[0] + delta, p[1]) - f.eval(p[0] - delta, p[1])) / (2.0 * delta);
            let fy = (f.eval(p[0], p[1] + delta) - f.eval(p[0], p[1] - delta)) / (2.0 * delta);
            let dbar = (fx + Complex64::i() * fy).norm();
            let grad = libm::sqrt(fx.norm_sqr() + fy.norm_sqr());
            if dbar.is_finite() && grad.is_finite() {
                num = num.max(dbar);
                den = den.max(grad);
            }
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Zero count inside the contour by the argument principle, with the
/// brute-force oracle alongside. Disagreement is reported in `agrees`, not
/// treated as an error.
pub fn count_zeros<F: PlaneField + ?Sized>(f: &F, contour: &Contour, cfg: ZeroOracle) -> Result<ZeroCount, TopoError> {
    let raw = born_sommerfeld_integral(f, contour, 1.0, LoopRoute::Gradient)? / (2.0 * PI);
    let argument = libm::round(raw);
    if (raw - argument).abs() > 0.01 {
        return Err(TopoError::NotInteger(raw));
    }
    let oracle = oracle_zeros(f, contour, cfg);
    let oracle_total = oracle.iter().map(|z| z.multiplicity).sum();
    Ok(ZeroCount {
        argument: argument as i64,
        argument_raw: raw,
        agrees: oracle_total == argument as i64,
        oracle_total,
        oracle,
        holomorphy_defect: holomorphy_defect(f, contour, cfg.lattice),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    /// `ω(φ)` from phase increments.
    pub winding: i64,
    /// `N(ρ)` from the argument principle.
    pub zeros: i64,
    pub oracle_zeros: i64,
    pub oracle_agrees: bool,
    /// `∮ ∇S·dx` in action units.
    pub loop_integral: f64,
    pub hbar: f64,
    /// `loop_integral / 2πħ`.
    pub quantum_number: f64,
    pub holomorphy_defect: f64,
    /// `N = ω` and `∮∇S·dx = ω·2πħ` to 1e-6 relative.
    pub consistent: bool,
}

pub fn verify_dbs<F: PlaneField + ?Sized>(f: &F, contour: &Contour, hbar: f64) -> Result<WindingReport, TopoError> {
    let winding = winding_number(f, contour)?;
    let count = count_zeros(f, contour, ZeroOracle::default())?;
    let loop_integral = born_sommerfeld_integral(f, contour, hbar, LoopRoute::Gradient)?;
    let h = 2.0 * PI * hbar;
    let target = winding as f64 * h;
    let quantised = (loop_integral - target).abs() <= 1e-6 * h * (winding.unsigned_abs().max(1) as f64);
    Ok(WindingReport {
        winding,
        zeros: count.argument,
        oracle_zeros: count.oracle_total,
        oracle_agrees: count.agrees,
        loop_integral,
        hbar,
        quantum_number: loop_integral / h,
        holomorphy_defect: count.holomorphy_defect,
        consistent: count.argument == winding && quantised,
    })
}

/// `φ(z)·e^{iθ}` with `θ = arg(z − c)`: adds one unit of winding around `c`
/// without adding a zero of `|φ|`.
pub fn gauge_shift<F: PlaneField + ?Sized>(f: &F, c: Complex64) -> impl Fn(Complex64) -> Complex64 + '_ {
    move |z| {
        let d = z - c;
        let r = d.norm();
        let phase = if r > 0.0 { d / r } else { Complex64::new(0.0, 0.0) };
        f.eval(z.re, z.im) * phase
    }
}

/// `φ(z)·(z − c)`: the holomorphic way to add one unit of winding, which
/// also adds a zero at `c`.
pub fn holomorphic_shift<F: PlaneField + ?Sized>(f: &F, c: Complex64) -> impl Fn(Complex64) -> Complex64 + '_ {
    move |z| f.eval(z.re, z.im) * (z - c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Contour {
        Contour::Circle { center: [0.0, 0.0], radius: 1.0, samples: 256 }
    }

    #[test]
    fn counts_with_multiplicity() {
        let sq = |z: Complex64| z * z;
        let c = count_zeros(&sq, &unit(), ZeroOracle::default()).unwrap();
        assert_eq!((c.argument, c.oracle_total), (2, 2));
        assert_eq!(c.oracle.len(), 1);
        assert!(c.holomorphy_defect < 1e-6);
    }

    #[test]
    fn two_roots_and_outside_root() {
        let two = |z: Complex64| (z - 0.3) * (z + Complex64::new(0.0, 0.4));
        let c = count_zeros(&two, &unit(), ZeroOracle::default()).unwrap();
        assert_eq!((c.argument, c.oracle_total, c.oracle.len()), (2, 2, 2));
        let outside = |z: Complex64| z - 2.0;
        let c = count_zeros(&outside, &unit(), ZeroOracle::default()).unwrap();
        assert_eq!((c.argument, c.oracle_total), (0, 0));
    }

    #[test]
    fn dbs_report() {
        let sq = |z: Complex64| z * z;
        let r = verify_dbs(&sq, &unit(), 1.0).unwrap();
        assert!(r.consistent && r.winding == 2 && r.zeros == 2);
        assert!((r.loop_integral - 4.0 * PI).abs() < 1e-6);
        let k = |_: Complex64| Complex64::new(3.0, -1.0);
        let r = verify_dbs(&k, &unit(), 1.0).unwrap();
        assert!(r.consistent && r.winding == 0 && r.loop_integral.abs() < 1e-12);
    }

    #[test]
    fn gauge_shift_raises_winding() {
        let sq = |z: Complex64| z * z;
        let shifted = gauge_shift(&sq, Complex64::new(0.0, 0.0));
        let r = verify_dbs(&shifted, &unit(), 1.0).unwrap();
        assert_eq!((r.winding, r.zeros), (3, 3));
        assert!(r.consistent);
        let holo = holomorphic_shift(&sq, Complex64::new(0.2, 0.1));
        let c = count_zeros(&holo, &unit(), ZeroOracle::default()).unwrap();
        assert_eq!((c.argument, c.oracle_total), (3, 3));
    }
}
