//! Named test fields and potentials, e.g. `z_pow_3`, `gaussian sigma=0.5 k=2`
//! or `plane p=4 E0=5 M=3`. Parameters follow the name after whitespace, a
//! comma or a colon, as `key=value` pairs.

use std::collections::BTreeMap;

use monogen_core::bohm::WaveParams;
use monogen_core::grid::{ComplexField, Grid, GridField};
use monogen_core::{Blade, Complex64, Multivector, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Error;

#[derive(Debug, Clone, PartialEq)]
struct Spec {
    name: String,
    params: BTreeMap<String, f64>,
}

impl Spec {
    fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let split = text.find(|c: char| c == ':' || c == ',' || c.is_whitespace()).unwrap_or(text.len());
        let name = text[..split].to_string();
        if name.is_empty() {
            return Err(Error::Usage("empty field name".into()));
        }
        let mut params = BTreeMap::new();
        for item in text[split..].split(|c: char| c == ':' || c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("`{name}`: expected key=value, found `{item}`")))?;
            let v: f64 = v.parse().map_err(|_| Error::Usage(format!("`{name}`: `{k}` is not a number")))?;
            if !v.is_finite() {
                return Err(Error::Usage(format!("`{name}`: `{k}` must be finite")));
            }
            params.insert(canonical_key(k).to_string(), v);
        }
        Ok(Self { name, params })
    }

    fn take(&mut self, key: &str, default: f64) -> f64 {
        self.params.remove(key).unwrap_or(default)
    }

    fn finish(self) -> Result<(), Error> {
        match self.params.keys().next() {
            Some(k) => Err(Error::Usage(format!("`{}` takes no parameter `{k}`", self.name))),
            None => Ok(()),
        }
    }
}

fn canonical_key(k: &str) -> &str {
    match k {
        "σ" => "sigma",
        "E0" | "E₀" => "e0",
        "ħ" => "hbar",
        other => other,
    }
}

/// A test field; everything except [`Builtin::ExpGauge`] is a complex scalar
/// function of `z = x + iy` (on 1-D grids `y = 0`).
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    ZPow(u32),
    ExpZ,
    ConjZ,
    /// `(z − a)(z − b)`.
    TwoRoot { a: Complex64, b: Complex64 },
    /// `z − c`.
    ZShift(Complex64),
    /// `(z − c)/|z − c|`, the unit-winding phase.
    UnitPhase(Complex64),
    Const(Complex64),
    /// `exp(−|z − c|²/2σ²) e^{ik·x}`.
    Gaussian { sigma: f64, center: f64, k: f64 },
    /// `e^{ipx/ħ}` with the energy and mass parameter kept for dispersion checks.
    Plane(WaveParams),
    /// `g(x + a)e^{ikx} − g(a − x)e^{−ikx}`: odd in `x`, two packets moving
    /// towards each other for `k > 0`.
    TwoGaussian { a: f64, sigma: f64, k: f64 },
    SinMode(f64),
    /// `Σ (aₘ sin mx + bₘ cos mx)/m²` with coefficients from a seeded stream.
    SmoothRandom { seed: u64, modes: usize },
    /// `exp(A1 x1 + A3 x3) e1∧e2` in Euclidean `Cl(3)`.
    ExpGauge { a1: f64, a3: f64 },
}

pub const NAMES: &[&str] = &[
    "z_pow_<n>",
    "exp_z",
    "conj_z",
    "two_root",
    "z_shift",
    "unit_phase",
    "const",
    "gaussian",
    "plane",
    "two_gaussian",
    "sin_mode",
    "smooth_random",
    "exp_gauge",
];

impl Builtin {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut s = Spec::parse(text)?;
        let c = |s: &mut Spec, re: &str, im: &str, d: Complex64| Complex64::new(s.take(re, d.re), s.take(im, d.im));
        let f = match s.name.as_str() {
            name if name.starts_with("z_pow_") => {
                let n = name["z_pow_".len()..]
                    .parse()
                    .map_err(|_| Error::Usage(format!("`{name}`: expected z_pow_<n> with n ≥ 0")))?;
                Builtin::ZPow(n)
            }
            "exp_z" => Builtin::ExpZ,
            "conj_z" => Builtin::ConjZ,
            "two_root" => Builtin::TwoRoot {
                a: c(&mut s, "a_re", "a_im", Complex64::new(0.3, 0.2)),
                b: c(&mut s, "b_re", "b_im", Complex64::new(-0.4, -0.1)),
            },
            "z_shift" => Builtin::ZShift(c(&mut s, "c_re", "c_im", Complex64::new(0.0, 0.0))),
            "unit_phase" => Builtin::UnitPhase(c(&mut s, "c_re", "c_im", Complex64::new(0.0, 0.0))),
            "const" => Builtin::Const(c(&mut s, "re", "im", Complex64::new(1.0, 0.0))),
            "gaussian" => {
                let sigma = s.take("sigma", 1.0);
                Builtin::Gaussian { sigma, center: s.take("center", 0.0), k: s.take("k", 0.0) }
            }
            "plane" => {
                let p = s.take("p", 1.0);
                let e0 = s.take("e0", 1.0);
                let big_m = s.take("M", 0.0);
                Builtin::Plane(WaveParams { e0, p: vec![p], big_m, hbar: s.take("hbar", 1.0) })
            }
            "two_gaussian" => {
                let a = s.take("a", 3.0);
                let sigma = s.take("sigma", 1.0);
                Builtin::TwoGaussian { a, sigma, k: s.take("k", 0.0) }
            }
            "sin_mode" => Builtin::SinMode(s.take("m", 1.0)),
            "smooth_random" => {
                let seed = s.take("seed", 0.0);
                let modes = s.take("modes", 5.0);
                if seed < 0.0 || seed.fract() != 0.0 || modes < 1.0 || modes.fract() != 0.0 {
                    return Err(Error::Usage("smooth_random: seed and modes must be whole numbers, modes ≥ 1".into()));
                }
                Builtin::SmoothRandom { seed: seed as u64, modes: modes as usize }
            }
            "exp_gauge" => {
                let a1 = s.take("A1", 0.5);
                Builtin::ExpGauge { a1, a3: s.take("A3", -0.3) }
            }
            other => {
                return Err(Error::Usage(format!("unknown field `{other}`; known: {}", NAMES.join(", "))));
            }
        };
        if let Builtin::Gaussian { sigma, .. } | Builtin::TwoGaussian { sigma, .. } = f {
            if sigma <= 0.0 {
                return Err(Error::Usage("sigma must be positive".into()));
            }
        }
        if let Builtin::Plane(w) = &f {
            if w.e0 <= 0.0 || w.hbar <= 0.0 || w.big_m < 0.0 {
                return Err(Error::Usage("plane: need E0 > 0, hbar > 0, M ≥ 0".into()));
            }
        }
        s.finish()?;
        Ok(f)
    }

    /// Value at `z = x + iy`, or `None` for fields that are not complex scalars.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        let gauss = |x: f64, s: f64| (-x * x / (2.0 * s * s)).exp();
        Some(match *self {
            Builtin::ZPow(n) => z.powu(n),
            Builtin::ExpZ => z.exp(),
            Builtin::ConjZ => z.conj(),
            Builtin::TwoRoot { a, b } => (z - a) * (z - b),
            Builtin::ZShift(c) => z - c,
            Builtin::UnitPhase(c) => {
                let d = z - c;
                if d.norm() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    d / d.norm()
                }
            }
            Builtin::Const(c) => c,
            Builtin::Gaussian { sigma, center, k } => {
                let r2 = (z.re - center).powi(2) + z.im * z.im;
                Complex64::from_polar((-r2 / (2.0 * sigma * sigma)).exp(), k * z.re)
            }
            Builtin::Plane(ref w) => Complex64::from_polar(1.0, w.p[0] * z.re / w.hbar),
            Builtin::TwoGaussian { a, sigma, k } => {
                let x = z.re;
                Complex64::from_polar(gauss(x + a, sigma), k * x) - Complex64::from_polar(gauss(a - x, sigma), -k * x)
            }
            Builtin::SinMode(m) => Complex64::new((m * z.re).sin(), 0.0),
            Builtin::SmoothRandom { seed, modes } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v = 0.0;
                for m in 1..=modes {
                    let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    let mf = m as f64;
                    v += (a * (mf * z.re).sin() + b * (mf * z.re).cos()) / (mf * mf);
                }
                Complex64::new(v, 0.0)
            }
            Builtin::ExpGauge { .. } => return None,
        })
    }

    pub fn is_complex(&self) -> bool {
        !matches!(self, Builtin::ExpGauge { .. })
    }

    pub fn wave_params(&self) -> Option<&WaveParams> {
        match self {
            Builtin::Plane(w) => Some(w),
            _ => None,
        }
    }

    /// Complex values at the nodes of a 1-D or 2-D grid.
    pub fn sample_complex(&self, grid: &Grid) -> Result<ComplexField, Error> {
        if !self.is_complex() {
            return Err(Error::Usage("this field is not a complex scalar".into()));
        }
        if grid.dim() > 2 {
            return Err(Error::Usage("complex fields need a 1-D or 2-D grid".into()));
        }
        let values = (0..grid.node_count())
            .map(|n| {
                let x = grid.coords(n);
                self.eval(Complex64::new(x[0], x[1])).expect("complex field")
            })
            .collect();
        Ok(ComplexField::new(grid.clone(), values)?)
    }

    /// Real part at the nodes of a 1-D grid (heat-flow initial data).
    pub fn sample_real(&self, grid: &Grid) -> Result<Vec<f64>, Error> {
        let f = self.sample_complex(grid)?;
        if f.values().iter().any(|z| z.im != 0.0) {
            return Err(Error::Usage("expected a real-valued field".into()));
        }
        Ok(f.values().iter().map(|z| z.re).collect())
    }

    /// The field as a multivector grid field: complex values through
    /// `u + v e1∧e2`, the gauge example in `Cl(3)`.
    pub fn sample(&self, grid: &Grid) -> Result<GridField, Error> {
        match *self {
            Builtin::ExpGauge { a1, a3 } => {
                if grid.dim() != 3 {
                    return Err(Error::Usage("exp_gauge needs a 3-D grid".into()));
                }
                let sig = Signature::euclidean(3)?;
                Ok(GridField::from_fn(grid.clone(), sig, |x| {
                    Multivector::from_blade(sig, Blade::from_mask(0b011), (a1 * x[0] + a3 * x[2]).exp())
                        .expect("valid blade")
                })?)
            }
            _ => Ok(self.sample_complex(grid)?.to_grid_field()?),
        }
    }
}

/// Field by name; see [`Builtin::parse`].
pub fn builtin_field(spec: &str, grid: &Grid) -> Result<GridField, Error> {
    Builtin::parse(spec)?.sample(grid)
}

/// Real potential `U(x)` on a 1-D grid: `free`, `const value=…`,
/// `harmonic k=… center=…` (`½k(x − c)²`), `barrier height=… lo=… hi=…`,
/// `cos amp=… k=…`.
pub fn potential(spec: &str, grid: &Grid) -> Result<Vec<f64>, Error> {
    let mut s = Spec::parse(spec)?;
    let xs: Vec<f64> = (0..grid.node_count()).map(|n| grid.coords(n)[0]).collect();
    let u: Vec<f64> = match s.name.as_str() {
        "free" => vec![0.0; xs.len()],
        "const" => {
            let v = s.take("value", 0.0);
            vec![v; xs.len()]
        }
        "harmonic" => {
            let (k, c) = (s.take("k", 1.0), s.take("center", 0.0));
            xs.iter().map(|x| 0.5 * k * (x - c) * (x - c)).collect()
        }
        "barrier" => {
            let (h, lo, hi) = (s.take("height", 1.0), s.take("lo", -0.5), s.take("hi", 0.5));
            xs.iter().map(|&x| if (lo..=hi).contains(&x) { h } else { 0.0 }).collect()
        }
        "cos" => {
            let (a, k) = (s.take("amp", 1.0), s.take("k", 1.0));
            xs.iter().map(|x| a * (k * x).cos()).collect()
        }
        other => return Err(Error::Usage(format!("unknown potential `{other}`; known: free, const, harmonic, barrier, cos"))),
    };
    s.finish()?;
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use monogen_core::bohm::plane_wave_residual;
    use monogen_core::grid::Boundary;

    #[test]
    fn documented_values() {
        let z = Complex64::new(0.5, 0.0);
        assert_eq!(Builtin::parse("z_pow_2").unwrap().eval(z).unwrap(), Complex64::new(0.25, 0.0));
        let g = Builtin::parse("gaussian σ=1").unwrap();
        assert_eq!(g.eval(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let p = Builtin::parse("plane p=4 E0=5 M=3").unwrap();
        assert_eq!(plane_wave_residual(p.wave_params().unwrap()), 0.0);
    }

    #[test]
    fn parameter_syntax() {
        assert_eq!(Builtin::parse("z_shift:c_re=0.5,c_im=-1").unwrap(), Builtin::ZShift(Complex64::new(0.5, -1.0)));
        assert!(Builtin::parse("gaussian width=2").is_err());
        assert!(Builtin::parse("gaussian sigma=abc").is_err());
        assert!(Builtin::parse("gaussian sigma=0").is_err());
        assert!(Builtin::parse("z_pow_x").is_err());
        assert!(Builtin::parse("nope").is_err());
    }

    #[test]
    fn two_gaussian_is_odd() {
        let f = Builtin::parse("two_gaussian a=2 k=1.5").unwrap();
        for x in [0.3, 1.0, 2.7] {
            let a = f.eval(Complex64::new(x, 0.0)).unwrap();
            let b = f.eval(Complex64::new(-x, 0.0)).unwrap();
            assert!((a + b).norm() < 1e-15);
        }
        assert_eq!(f.eval(Complex64::new(0.0, 0.0)).unwrap().norm(), 0.0);
    }

    #[test]
    fn sampling_embeds_in_even_subalgebra() {
        let g = Grid::uniform(2, 5, -1.0, 1.0, Boundary::Clamped).unwrap();
        let f = builtin_field("z_pow_1", &g).unwrap();
        let n = g.node(&[4, 0]);
        assert_eq!(f.value(n).get(Blade::SCALAR), 1.0);
        assert_eq!(f.value(n).get(Blade::from_mask(0b11)), -1.0);
        let g3 = Grid::uniform(3, 4, 0.0, 1.0, Boundary::Clamped).unwrap();
        assert!(builtin_field("exp_gauge", &g3).is_ok());
        assert!(builtin_field("exp_gauge", &g).is_err());
        assert!(builtin_field("z_pow_1", &g3).is_err());
    }

    #[test]
    fn random_field_is_deterministic() {
        let g = Grid::uniform(1, 16, 0.0, 2.0 * PI, Boundary::Periodic).unwrap();
        let a = Builtin::parse("smooth_random seed=7").unwrap().sample_real(&g).unwrap();
        let b = Builtin::parse("smooth_random seed=7").unwrap().sample_real(&g).unwrap();
        let c = Builtin::parse("smooth_random seed=8").unwrap().sample_real(&g).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn potentials() {
        let g = Grid::uniform(1, 5, -1.0, 1.0, Boundary::Clamped).unwrap();
        assert_eq!(potential("harmonic k=2", &g).unwrap(), vec![1.0, 0.25, 0.0, 0.25, 1.0]);
        assert_eq!(potential("barrier height=3 lo=0 hi=0.5", &g).unwrap(), vec![0.0, 0.0, 3.0, 3.0, 0.0]);
        assert!(potential("well", &g).is_err());
    }
}
