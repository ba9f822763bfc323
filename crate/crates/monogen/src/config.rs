//! Experiment configuration. A run's settings are layered: values from a
//! TOML config file win over command-line flags, which win over the
//! per-command defaults. The merged result is echoed into every report.

use std::path::PathBuf;

use monogen_core::grid::Boundary;
use serde::{Deserialize, Serialize};

use crate::io::Format;
use crate::Error;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "MONOGEN_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "monogen-out";

macro_rules! experiment_config {
    ($($(#[$meta:meta])* $name:ident: $ty:ty,)*) => {
        /// Every setting any subcommand reads. Unset fields fall through to
        /// the next layer.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct ExperimentConfig {
            $($(#[$meta])* #[serde(default, skip_serializing_if = "Option::is_none")] pub $name: Option<$ty>,)*
        }

        impl ExperimentConfig {
            /// Fill every unset field of `self` from `lower`.
            pub fn over(self, lower: ExperimentConfig) -> ExperimentConfig {
                ExperimentConfig { $($name: self.$name.or(lower.$name),)* }
            }
        }
    };
}

experiment_config! {
    command: String,
    /// Built-in field, see [`crate::builtin`].
    field: String,
    /// Grid-field file (JSON container).
    input: PathBuf,
    /// Evolution manifest written by `bohm-evolve`.
    manifest: PathBuf,
    dim: usize,
    n: usize,
    lo: f64,
    hi: f64,
    boundary: Boundary,
    /// `cx,cy,r,samples`.
    circle: String,
    /// Point-list contour file.
    contour_file: PathBuf,
    /// Cauchy evaluation point `x,y`.
    point: String,
    /// `p,q`.
    signature: String,
    a: String,
    b: String,
    op: String,
    expect: String,
    /// Random triples per algebra for the axiom suite.
    axioms: usize,
    seed: u64,
    suite: String,
    expr: String,
    /// `f:1,2;g:1,3`: the coordinates each symbol depends on.
    deps: String,
    hbar: f64,
    mass: f64,
    e0: f64,
    #[serde(rename = "M")]
    big_m: f64,
    /// `standard` or `modified`.
    variant: String,
    p: Vec<f64>,
    kappa: f64,
    dt: f64,
    steps: usize,
    save_every: usize,
    potential: String,
    /// `explicit` or `crank-nicolson`.
    scheme: String,
    seeds: Vec<f64>,
    substeps: usize,
    max_grade: usize,
    tolerance: f64,
    /// Residual summaries skip nodes with `ρ < floor · max ρ`.
    floor: f64,
    min_order: f64,
    criteria: Vec<u32>,
    out_dir: PathBuf,
    format: Format,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Defaults for one subcommand, including the output directory taken
    /// from [`OUT_DIR_ENV`] when set.
    pub fn defaults(command: &str, env_out_dir: Option<PathBuf>) -> ExperimentConfig {
        let mut d = ExperimentConfig {
            command: Some(command.into()),
            hbar: Some(1.0),
            format: Some(Format::Json),
            out_dir: Some(env_out_dir.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))),
            ..Default::default()
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let line = |d: &mut ExperimentConfig, n: usize, lo: f64, hi: f64, b: Boundary| {
            d.dim = Some(1);
            d.n = Some(n);
            d.lo = Some(lo);
            d.hi = Some(hi);
            d.boundary = Some(b);
        };
        match command {
            "ga-eval" => {
                d.signature = Some("3,0".into());
                d.op = Some("geometric".into());
                d.seed = Some(0);
                d.tolerance = Some(1e-10);
            }
            "sym-verify" => {
                d.signature = Some("3,0".into());
                d.deps = Some("f:1,2;g:1,3".into());
            }
            "grid-analyze" => {
                d.field = Some("z_pow_2".into());
                d.dim = Some(2);
                d.n = Some(65);
                d.lo = Some(-1.0);
                d.hi = Some(1.0);
                d.boundary = Some(Boundary::Clamped);
                d.tolerance = Some(1e-6);
            }
            "topo-winding" | "topo-zeros" => {
                d.circle = Some("0,0,1,256".into());
                d.tolerance = Some(1e-6);
            }
            "topo-betti" => {
                d.dim = Some(2);
                d.n = Some(32);
                d.lo = Some(0.0);
                d.hi = Some(1.0);
                d.boundary = Some(Boundary::Periodic);
            }
            "bohm-evolve" | "bohm-diagnose" | "bohm-trajectories" => {
                line(&mut d, 481, -12.0, 12.0, Boundary::Clamped);
                d.field = Some("gaussian sigma=1".into());
                d.variant = Some("standard".into());
                d.mass = Some(1.0);
                d.dt = Some(0.005);
                d.steps = Some(400);
                d.save_every = Some(1);
                d.potential = Some("free".into());
                d.seeds = Some(vec![-1.0, 1.0]);
                d.substeps = Some(4);
                d.floor = Some(1e-3);
                d.tolerance = Some(1e-10);
            }
            "rel-dispersion" => {
                line(&mut d, 512, 0.0, two_pi, Boundary::Periodic);
                d.e0 = Some(5.0);
                d.p = Some(vec![4.0]);
                d.big_m = Some(3.0);
                d.dt = Some(1e-3);
                d.steps = Some(1000);
                d.save_every = Some(10);
                d.tolerance = Some(1e-3);
            }
            "heat-flow" => {
                line(&mut d, 128, 0.0, two_pi, Boundary::Periodic);
                d.field = Some("sin_mode m=1".into());
                d.kappa = Some(0.5);
                d.dt = Some(1e-3);
                d.steps = Some(1000);
                d.scheme = Some("explicit".into());
                d.tolerance = Some(0.01);
            }
            _ => {}
        }
        d
    }

    /// Positive tolerances, existing input files.
    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [("tolerance", self.tolerance), ("floor", self.floor), ("hbar", self.hbar)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("`{name}` must be positive, got {v}")));
                }
            }
        }
        for path in [&self.input, &self.manifest, &self.contour_file].into_iter().flatten() {
            if !path.exists() {
                return Err(Error::Config(format!("{} does not exist", path.display())));
            }
        }
        Ok(())
    }
}

/// `"a,b,c"` as numbers.
pub fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Usage(format!("{what}: `{s}` is not a number"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering_order() {
        let file = ExperimentConfig { n: Some(10), ..Default::default() };
        let flags = ExperimentConfig { n: Some(20), lo: Some(-3.0), ..Default::default() };
        let merged = file.over(flags).over(ExperimentConfig::defaults("grid-analyze", None));
        assert_eq!(merged.n, Some(10));
        assert_eq!(merged.lo, Some(-3.0));
        assert_eq!(merged.hi, Some(1.0));
        assert_eq!(merged.out_dir, Some(PathBuf::from(DEFAULT_OUT_DIR)));
    }

    #[test]
    fn env_directory_is_only_a_default() {
        let d = ExperimentConfig::defaults("topo-zeros", Some("/tmp/x".into()));
        assert_eq!(d.out_dir, Some(PathBuf::from("/tmp/x")));
        let flags = ExperimentConfig { out_dir: Some("here".into()), ..Default::default() };
        assert_eq!(flags.over(d).out_dir, Some(PathBuf::from("here")));
    }

    #[test]
    fn toml_round_trip_is_lossless() {
        for cmd in ["ga-eval", "grid-analyze", "bohm-evolve", "rel-dispersion", "heat-flow", "topo-betti"] {
            let mut c = ExperimentConfig::defaults(cmd, None);
            c.seeds = Some(vec![0.1, -1.0 / 3.0, 6.02214076e23]);
            c.big_m = Some(3.0);
            c.criteria = Some(vec![1, 5]);
            let text = c.to_toml();
            assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c, "{text}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(ExperimentConfig::from_toml("nn = 3"), Err(Error::Config(_))));
        assert_eq!(ExperimentConfig::from_toml("M = 2.0").unwrap().big_m, Some(2.0));
    }

    #[test]
    fn validation() {
        let bad = ExperimentConfig { tolerance: Some(-1.0), ..Default::default() };
        assert!(bad.validate().is_err());
        let missing = ExperimentConfig { input: Some("/definitely/not/here.json".into()), ..Default::default() };
        assert!(missing.validate().is_err());
        assert!(ExperimentConfig::defaults("heat-flow", None).validate().is_ok());
    }
}
