//! The `monogen` command line. Exit status: 0 when every check passes, 1
//! when a check fails, 2 for usage, configuration or IO errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use monogen_core::bohm::{
    bohm_trajectories, de_broglie, evolve, fit_frequency, heat_gradient_flow_check, hj_and_continuity_residuals, norm,
    plane_wave_residual, unwrap_path, EvolutionSeries, HeatScheme, Termination, Variant, WaveParams,
};
use monogen_core::grid::{
    dirac_op, dirac_squared, laplacian, monogenic_residual, Boundary, ComplexField, Contour, Grid, GridField, ScalarMap,
    SUMMARY_MARGIN,
};
use monogen_core::symbolic::{parse_field, Dependencies};
use monogen_core::topo::{betti_numbers, count_zeros, phase_walk, verify_dbs, winding_number, PlaneField, ZeroOracle, ZERO_TOL};
use monogen_core::{Check, Complex64, Multivector, Signature};
use serde::Serialize;
use serde_json::json;

use crate::builtin::{potential, Builtin};
use crate::config::{parse_list, ExperimentConfig, OUT_DIR_ENV};
use crate::io::{self, Format};
use crate::report::RunReport;
use crate::suite;
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "monogen", version, about = "Dirac-operator, winding and Bohm-dynamics experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a multivector product, or run the randomized axiom suite.
    GaEval {
        /// Left operand, e.g. "1 + 2*e1^e2" (optionally with a "Cl(p,q)" header).
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<String>,
        /// geometric, inner, outer, add, sub, projection, rejection,
        /// reverse, involute, inverse or grade:<k>.
        #[arg(long)]
        op: Option<String>,
        /// "p,q".
        #[arg(long)]
        signature: Option<String>,
        /// Expected result; compared within the tolerance.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        /// Random triples per run of the axiom suite.
        #[arg(long)]
        axioms: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Verify symbolic identities, or differentiate a symbolic field.
    SymVerify {
        /// Built-in identity suite (paper-section-2).
        #[arg(long)]
        suite: Option<String>,
        /// Field to differentiate, e.g. "f e1^e2".
        #[arg(long, allow_hyphen_values = true)]
        expr: Option<String>,
        #[arg(long)]
        signature: Option<String>,
        /// Symbol dependencies, e.g. "f:1,2;g:1,3".
        #[arg(long)]
        deps: Option<String>,
        /// Expected Dirac derivative of --expr.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Dirac, Laplace and monogenic-residual analysis of a sampled field.
    GridAnalyze {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        contour: ContourArgs,
        /// Cauchy-reconstruct the field at "x,y" from the contour.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Expected interior monogenic residual.
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        /// Required convergence order of the residual under refinement.
        #[arg(long)]
        min_order: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Winding number of a planar field along a contour.
    TopoWinding {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        contour: ContourArgs,
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Zero count, winding number and quantised loop integral.
    TopoZeros {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        contour: ContourArgs,
        #[arg(long)]
        hbar: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Betti numbers of a periodic grid from harmonic kernels.
    TopoBetti {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        max_grade: Option<usize>,
        /// Expected numbers, e.g. "1,2,1".
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Crank-Nicolson evolution; writes a manifest and one file per frame.
    BohmEvolve {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        physics: PhysicsArgs,
        #[command(flatten)]
        evolution: EvolutionArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Hamilton-Jacobi and continuity residuals of an evolution.
    BohmDiagnose {
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        floor: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Bohm trajectories through an evolution.
    BohmTrajectories {
        #[command(flatten)]
        series: SeriesArgs,
        /// Starting positions, e.g. "-1,0.5,2".
        #[arg(long, allow_hyphen_values = true)]
        seeds: Option<String>,
        #[arg(long)]
        substeps: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Plane-wave dispersion and de Broglie frequency check.
    RelDispersion {
        #[arg(long)]
        e0: Option<f64>,
        /// Momentum components, e.g. "4" or "1,2,2".
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long = "big-m", alias = "M")]
        big_m: Option<f64>,
        #[arg(long)]
        hbar: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        evolution: EvolutionArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Heat equation energy decay.
    HeatFlow {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// explicit or crank-nicolson.
        #[arg(long)]
        scheme: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance criteria.
    PaperSuite {
        /// Subset of criteria, e.g. "1,5,8".
        #[arg(long)]
        criteria: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// TOML config file; its values override flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $MONOGEN_OUT_DIR or ./monogen-out].
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct FieldArgs {
    /// Built-in field, e.g. "z_pow_3" or "gaussian sigma=0.5 k=2".
    #[arg(long)]
    pub field: Option<String>,
    /// Grid-field file; takes precedence over --field.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct GridArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    /// Points per axis.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    #[arg(long, value_parser = parse_boundary)]
    pub boundary: Option<Boundary>,
}

#[derive(Debug, Args, Default)]
pub struct ContourArgs {
    /// "cx,cy,r,samples".
    #[arg(long, allow_hyphen_values = true)]
    pub circle: Option<String>,
    /// Point-list contour file.
    #[arg(long)]
    pub contour_file: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct PhysicsArgs {
    #[arg(long)]
    pub hbar: Option<f64>,
    /// standard or modified.
    #[arg(long)]
    pub variant: Option<String>,
    #[arg(long)]
    pub mass: Option<f64>,
    #[arg(long)]
    pub e0: Option<f64>,
    #[arg(long = "big-m", alias = "M")]
    pub big_m: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct EvolutionArgs {
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub save_every: Option<usize>,
    /// free, const, harmonic, barrier or cos, with key=value parameters.
    #[arg(long)]
    pub potential: Option<String>,
}

/// Either a stored series or the settings to evolve one on the fly.
#[derive(Debug, Args, Default)]
pub struct SeriesArgs {
    /// Manifest written by bohm-evolve.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub evolution: EvolutionArgs,
}

fn parse_boundary(s: &str) -> Result<Boundary, String> {
    match s {
        "periodic" => Ok(Boundary::Periodic),
        "clamped" => Ok(Boundary::Clamped),
        _ => Err(format!("expected `periodic` or `clamped`, got `{s}`")),
    }
}

impl Common {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.out_dir = self.out.clone();
        c.format = self.format;
        c.tolerance = self.tolerance;
    }
}

impl FieldArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.field = self.field.clone();
        c.input = self.input.clone();
    }
}

impl GridArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.dim = self.dim;
        c.n = self.n;
        c.lo = self.lo;
        c.hi = self.hi;
        c.boundary = self.boundary;
    }
}

impl ContourArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.circle = self.circle.clone();
        c.contour_file = self.contour_file.clone();
    }
}

impl PhysicsArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.hbar = self.hbar;
        c.variant = self.variant.clone();
        c.mass = self.mass;
        c.e0 = self.e0;
        c.big_m = self.big_m;
    }
}

impl EvolutionArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.dt = self.dt;
        c.steps = self.steps;
        c.save_every = self.save_every;
        c.potential = self.potential.clone();
    }
}

impl SeriesArgs {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.manifest = self.manifest.clone();
        self.field.apply(c);
        self.grid.apply(c);
        self.physics.apply(c);
        self.evolution.apply(c);
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GaEval { .. } => "ga-eval",
            Command::SymVerify { .. } => "sym-verify",
            Command::GridAnalyze { .. } => "grid-analyze",
            Command::TopoWinding { .. } => "topo-winding",
            Command::TopoZeros { .. } => "topo-zeros",
            Command::TopoBetti { .. } => "topo-betti",
            Command::BohmEvolve { .. } => "bohm-evolve",
            Command::BohmDiagnose { .. } => "bohm-diagnose",
            Command::BohmTrajectories { .. } => "bohm-trajectories",
            Command::RelDispersion { .. } => "rel-dispersion",
            Command::HeatFlow { .. } => "heat-flow",
            Command::PaperSuite { .. } => "paper-suite",
        }
    }

    /// The flag layer of the configuration, plus the config-file path.
    pub fn flags(&self) -> Result<(ExperimentConfig, Option<PathBuf>), Error> {
        let mut c = ExperimentConfig { command: Some(self.name().into()), ..Default::default() };
        let common = match self {
            Command::GaEval { a, b, op, signature, expect, axioms, seed, common } => {
                c.a = a.clone();
                c.b = b.clone();
                c.op = op.clone();
                c.signature = signature.clone();
                c.expect = expect.clone();
                c.axioms = *axioms;
                c.seed = *seed;
                common
            }
            Command::SymVerify { suite, expr, signature, deps, expect, common } => {
                c.suite = suite.clone();
                c.expr = expr.clone();
                c.signature = signature.clone();
                c.deps = deps.clone();
                c.expect = expect.clone();
                common
            }
            Command::GridAnalyze { field, grid, contour, point, expect, min_order, common } => {
                field.apply(&mut c);
                grid.apply(&mut c);
                contour.apply(&mut c);
                c.point = point.clone();
                c.expect = expect.clone();
                c.min_order = *min_order;
                common
            }
            Command::TopoWinding { field, contour, expect, common } => {
                field.apply(&mut c);
                contour.apply(&mut c);
                c.expect = expect.clone();
                common
            }
            Command::TopoZeros { field, contour, hbar, expect, common } => {
                field.apply(&mut c);
                contour.apply(&mut c);
                c.hbar = *hbar;
                c.expect = expect.clone();
                common
            }
            Command::TopoBetti { grid, max_grade, expect, common } => {
                grid.apply(&mut c);
                c.max_grade = *max_grade;
                c.expect = expect.clone();
                common
            }
            Command::BohmEvolve { field, grid, physics, evolution, common } => {
                field.apply(&mut c);
                grid.apply(&mut c);
                physics.apply(&mut c);
                evolution.apply(&mut c);
                common
            }
            Command::BohmDiagnose { series, floor, common } => {
                series.apply(&mut c);
                c.floor = *floor;
                common
            }
            Command::BohmTrajectories { series, seeds, substeps, common } => {
                series.apply(&mut c);
                c.seeds = seeds.as_deref().map(|s| parse_list(s, "--seeds")).transpose()?;
                c.substeps = *substeps;
                common
            }
            Command::RelDispersion { e0, p, big_m, hbar, grid, evolution, common } => {
                c.e0 = *e0;
                c.p = p.as_deref().map(|s| parse_list(s, "--p")).transpose()?;
                c.big_m = *big_m;
                c.hbar = *hbar;
                grid.apply(&mut c);
                evolution.apply(&mut c);
                common
            }
            Command::HeatFlow { field, grid, kappa, dt, steps, scheme, common } => {
                field.apply(&mut c);
                grid.apply(&mut c);
                c.kappa = *kappa;
                c.dt = *dt;
                c.steps = *steps;
                c.scheme = scheme.clone();
                common
            }
            Command::PaperSuite { criteria, common } => {
                c.criteria = criteria
                    .as_deref()
                    .map(|s| {
                        s.split(',')
                            .map(|k| k.trim().parse::<u32>().map_err(|_| Error::Usage(format!("--criteria: `{k}` is not an id"))))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?;
                common
            }
        };
        common.apply(&mut c);
        Ok((c, common.config.clone()))
    }
}

/// Layer config file over flags over defaults.
pub fn resolve(command: &Command, env_out_dir: Option<PathBuf>) -> Result<ExperimentConfig, Error> {
    let (flags, config_path) = command.flags()?;
    let file = match config_path {
        Some(p) => ExperimentConfig::from_toml(&io::read_text(&p)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(cmd) = &file.command {
        if cmd != command.name() {
            return Err(Error::Config(format!("config is for `{cmd}`, not `{}`", command.name())));
        }
    }
    let merged = file.over(flags).over(ExperimentConfig::defaults(command.name(), env_out_dir));
    merged.validate()?;
    Ok(merged)
}

/// Parse `argv` (program name first), run, print, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    match execute(&cli.command, env_out) {
        Ok(report) => {
            print!("{}", report.table());
            if let Some(p) = report.outputs.last() {
                println!("report: {}", p.display());
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("monogen {}: {e}", cli.command.name());
            2
        }
    }
}

/// Run one command to a written report.
pub fn execute(command: &Command, env_out_dir: Option<PathBuf>) -> Result<RunReport, Error> {
    let start = Instant::now();
    let config = resolve(command, env_out_dir)?;
    let mut ctx = Ctx::new(command.name(), config);
    match command {
        Command::GaEval { .. } => ga_eval(&mut ctx)?,
        Command::SymVerify { .. } => sym_verify(&mut ctx)?,
        Command::GridAnalyze { .. } => grid_analyze(&mut ctx)?,
        Command::TopoWinding { .. } => topo_winding(&mut ctx)?,
        Command::TopoZeros { .. } => topo_zeros(&mut ctx)?,
        Command::TopoBetti { .. } => topo_betti(&mut ctx)?,
        Command::BohmEvolve { .. } => bohm_evolve(&mut ctx)?,
        Command::BohmDiagnose { .. } => bohm_diagnose(&mut ctx)?,
        Command::BohmTrajectories { .. } => bohm_trajectories_cmd(&mut ctx)?,
        Command::RelDispersion { .. } => rel_dispersion(&mut ctx)?,
        Command::HeatFlow { .. } => heat_flow(&mut ctx)?,
        Command::PaperSuite { .. } => paper_suite(&mut ctx)?,
    }
    ctx.report.wall_clock_seconds = start.elapsed().as_secs_f64();
    let dir = ctx.out_dir();
    let format = ctx.format();
    ctx.report.write(&dir, format)?;
    Ok(ctx.report)
}

struct Ctx {
    c: ExperimentConfig,
    report: RunReport,
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T, Error> {
    v.clone().ok_or_else(|| Error::Usage(format!("missing --{what}")))
}

impl Ctx {
    fn new(command: &str, c: ExperimentConfig) -> Self {
        Self { report: RunReport::new(command, c.clone()), c }
    }

    fn out_dir(&self) -> PathBuf {
        self.c.out_dir.clone().expect("defaulted")
    }

    fn format(&self) -> Format {
        self.c.format.expect("defaulted")
    }

    fn tol(&self) -> Result<f64, Error> {
        need(&self.c.tolerance, "tolerance")
    }

    fn data_path(&self, what: &str) -> PathBuf {
        self.out_dir().join(format!("{}.{what}.{}", self.report.command, self.format().extension()))
    }

    fn records<T: Serialize>(&mut self, what: &str, rows: &[T]) -> Result<(), Error> {
        let path = self.data_path(what);
        io::write_records(&path, rows, self.format())?;
        self.report.outputs.push(path);
        Ok(())
    }

    fn field_file(&mut self, what: &str, f: &GridField) -> Result<(), Error> {
        let path = self.data_path(what);
        io::write_field(&path, f, self.format())?;
        self.report.outputs.push(path);
        Ok(())
    }

    fn signature(&self) -> Result<Signature, Error> {
        let s = need(&self.c.signature, "signature")?;
        let v = parse_list(&s, "--signature")?;
        if v.len() != 2 || v.iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
            return Err(Error::Usage(format!("--signature: expected p,q, got `{s}`")));
        }
        Ok(Signature::new(v[0] as usize, v[1] as usize)?)
    }

    fn grid(&self) -> Result<Grid, Error> {
        Ok(Grid::uniform(
            need(&self.c.dim, "dim")?,
            need(&self.c.n, "n")?,
            need(&self.c.lo, "lo")?,
            need(&self.c.hi, "hi")?,
            need(&self.c.boundary, "boundary")?,
        )?)
    }

    fn builtin(&self) -> Result<Option<Builtin>, Error> {
        if self.c.input.is_some() {
            return Ok(None);
        }
        Ok(Some(Builtin::parse(&need(&self.c.field, "field")?)?))
    }

    /// The input file if given, else the built-in field sampled on the grid.
    fn field(&self) -> Result<GridField, Error> {
        match &self.c.input {
            Some(p) => io::read_field(p),
            None => self.builtin()?.expect("no input file").sample(&self.grid()?),
        }
    }

    fn complex_field(&self) -> Result<ComplexField, Error> {
        match &self.c.input {
            Some(p) => Ok(ComplexField::from_grid_field(&io::read_field(p)?, 0.0)?),
            None => self.builtin()?.expect("no input file").sample_complex(&self.grid()?),
        }
    }

    /// A planar field evaluated exactly (built-ins) or by bilinear
    /// interpolation of an input file.
    fn plane_field(&self) -> Result<Box<dyn PlaneField>, Error> {
        match self.builtin()? {
            Some(b) => {
                if !b.is_complex() {
                    return Err(Error::Usage("a complex planar field is needed".into()));
                }
                Ok(Box::new(move |z: Complex64| b.eval(z).expect("complex field")))
            }
            None => {
                let f = ComplexField::from_grid_field(&io::read_field(self.c.input.as_ref().expect("input"))?, 0.0)?;
                if f.grid().dim() != 2 {
                    return Err(Error::Usage("contour analysis needs a 2-D field".into()));
                }
                Ok(Box::new(f))
            }
        }
    }

    fn contour(&self) -> Result<Contour, Error> {
        if let Some(p) = &self.c.contour_file {
            return io::parse_contour_points(&io::read_text(p)?);
        }
        let s = need(&self.c.circle, "circle")?;
        let v = parse_list(&s, "--circle")?;
        if v.len() != 4 || v[3] < 0.0 || v[3].fract() != 0.0 || v[2] <= 0.0 {
            return Err(Error::Usage(format!("--circle: expected cx,cy,r,samples with r > 0, got `{s}`")));
        }
        Ok(Contour::Circle { center: [v[0], v[1]], radius: v[2], samples: v[3] as usize })
    }

    fn variant(&self) -> Result<Variant, Error> {
        let v = match need(&self.c.variant, "variant")?.as_str() {
            "standard" => Variant::Standard { mass: need(&self.c.mass, "mass")? },
            "modified" => Variant::Modified { e0: need(&self.c.e0, "e0")?, big_m: need(&self.c.big_m, "big-m")? },
            other => return Err(Error::Usage(format!("--variant: expected standard or modified, got `{other}`"))),
        };
        v.validate()?;
        Ok(v)
    }

    fn evolve(&self) -> Result<EvolutionSeries, Error> {
        let init = self.complex_field()?;
        let grid = init.grid().clone();
        let pot_spec = need(&self.c.potential, "potential")?;
        let u = potential(&pot_spec, &grid)?;
        let mut values = init.values().to_vec();
        if grid.boundary()[0] == Boundary::Clamped {
            // tails below the zero tolerance are pinned to the boundary value
            for i in [0, values.len() - 1] {
                if values[i].norm() <= 1e-12 {
                    values[i] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(evolve(
            &ComplexField::new(grid, values)?,
            &u,
            &pot_spec,
            need(&self.c.hbar, "hbar")?,
            self.variant()?,
            need(&self.c.dt, "dt")?,
            need(&self.c.steps, "steps")?,
            need(&self.c.save_every, "save-every")?,
        )?)
    }

    fn series(&self) -> Result<EvolutionSeries, Error> {
        match &self.c.manifest {
            Some(m) => io::read_series(m),
            None => self.evolve(),
        }
    }

    fn expect_int(&self) -> Result<Option<i64>, Error> {
        self.c
            .expect
            .as_deref()
            .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Usage(format!("--expect: `{s}` is not an integer"))))
            .transpose()
    }
}

fn parse_operand(sig: Signature, text: &str) -> Result<Multivector, Error> {
    if text.trim_start().starts_with("Cl(") {
        let mv: Multivector = text.parse()?;
        if mv.signature() != sig {
            return Err(Error::Usage(format!("operand is in {}, --signature says {sig}", mv.signature())));
        }
        Ok(mv)
    } else {
        Ok(Multivector::parse_terms(sig, text)?)
    }
}

#[derive(Serialize)]
struct TermRow {
    mask: u16,
    label: String,
    coefficient: f64,
}

fn ga_eval(ctx: &mut Ctx) -> Result<(), Error> {
    let sig = ctx.signature()?;
    if ctx.c.a.is_none() && ctx.c.axioms.is_none() {
        return Err(Error::Usage("give --a (with --op/--b) or --axioms".into()));
    }
    if let Some(n) = ctx.c.axioms {
        let seed = need(&ctx.c.seed, "seed")?;
        ctx.report.extend(suite::axiom_checks(sig, n, seed));
    }
    if let Some(a) = ctx.c.a.clone() {
        let a = parse_operand(sig, &a)?;
        let b = ctx.c.b.as_deref().map(|t| parse_operand(sig, t)).transpose()?;
        let op = need(&ctx.c.op, "op")?;
        let need_b = || b.clone().ok_or_else(|| Error::Usage(format!("--op {op} needs --b")));
        let result = match op.as_str() {
            "geometric" => a.geometric_product(&need_b()?)?,
            "inner" => a.inner_product(&need_b()?)?,
            "outer" => a.outer_product(&need_b()?)?,
            "add" => a.try_add(&need_b()?)?,
            "sub" => a.try_sub(&need_b()?)?,
            "projection" => a.projection(&need_b()?)?,
            "rejection" => a.rejection(&need_b()?)?,
            "reverse" => a.reverse(),
            "involute" => a.involute(),
            "inverse" => a.blade_inverse()?,
            g if g.starts_with("grade:") => {
                let k = g["grade:".len()..].parse().map_err(|_| Error::Usage(format!("--op: bad grade in `{g}`")))?;
                a.grade_project(k)
            }
            other => return Err(Error::Usage(format!("unknown --op `{other}`"))),
        };
        println!("{result}");
        if let Some(e) = ctx.c.expect.clone() {
            let want = parse_operand(sig, &e)?;
            ctx.report.push(Check::at_most(format!("{op} result"), ctx.tol()?, result.max_abs_diff(&want)));
        }
        ctx.report.results = json!({ "result": result.to_string() });
        let rows: Vec<TermRow> =
            result.terms().map(|(b, c)| TermRow { mask: b.mask(), label: b.to_string(), coefficient: c }).collect();
        ctx.records("result", &rows)?;
    }
    Ok(())
}

fn parse_deps(text: &str) -> Result<Dependencies, Error> {
    let mut d = Dependencies::new();
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, idx) = item.split_once(':').ok_or_else(|| Error::Usage(format!("--deps: expected name:i,j in `{item}`")))?;
        let set: BTreeSet<u8> = idx
            .split(',')
            .map(|i| i.trim().parse::<u8>().map_err(|_| Error::Usage(format!("--deps: bad index in `{item}`"))))
            .collect::<Result<_, _>>()?;
        d.insert(name.trim().to_string(), set);
    }
    Ok(d)
}

#[derive(Serialize)]
struct NamedValue {
    name: String,
    value: String,
}

fn sym_verify(ctx: &mut Ctx) -> Result<(), Error> {
    match ctx.c.expr.clone() {
        Some(expr) => {
            let sig = ctx.signature()?;
            let deps = parse_deps(&need(&ctx.c.deps, "deps")?)?;
            let f = parse_field(&expr, sig, &deps)?;
            let d = f.dirac();
            let mut rows = vec![
                NamedValue { name: "field".into(), value: f.to_string() },
                NamedValue { name: "dirac".into(), value: d.to_string() },
                NamedValue { name: "interior".into(), value: f.interior().to_string() },
                NamedValue { name: "exterior".into(), value: f.exterior().to_string() },
            ];
            if let Ok((i, e)) = f.flux_ratios() {
                rows.push(NamedValue { name: "interior ratio".into(), value: i.to_string() });
                rows.push(NamedValue { name: "exterior ratio".into(), value: e.to_string() });
            }
            for r in &rows {
                println!("{:>14}: {}", r.name, r.value);
            }
            if let Some(e) = ctx.c.expect.clone() {
                let want = parse_field(&e, sig, &deps)?;
                ctx.report.push(Check::flag("dirac derivative", &want, &d, want == d));
            }
            ctx.report.results = serde_json::to_value(rows.iter().map(|r| (&r.name, &r.value)).collect::<std::collections::BTreeMap<_, _>>())
                .expect("map serializes");
            ctx.records("derivatives", &rows)
        }
        None => {
            let s = ctx.c.suite.clone().unwrap_or_else(|| "paper-section-2".into());
            if s != "paper-section-2" {
                return Err(Error::Usage(format!("unknown suite `{s}`; available: paper-section-2")));
            }
            ctx.c.suite = Some(s.clone());
            ctx.report.config.suite = Some(s);
            ctx.report.extend(suite::symbolic_checks()?);
            Ok(())
        }
    }
}

fn scalar_field(map: &ScalarMap) -> Result<GridField, Error> {
    let sig = Signature::euclidean(map.grid.dim())?;
    Ok(GridField::from_fn(map.grid.clone(), sig, |_| Multivector::zero(sig))
        .and_then(|mut f| {
            for (n, v) in map.values.iter().enumerate() {
                f.set(n, &Multivector::scalar(sig, *v))?;
            }
            Ok(f)
        })?)
}

/// l2 norm of `map` over nodes inside the box `[lo, hi]` per axis.
fn window_l2(map: &ScalarMap, lo: &[f64], hi: &[f64]) -> f64 {
    let g = &map.grid;
    let eps = 1e-9 * g.spacing().iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let mut s = 0.0;
    for n in 0..g.node_count() {
        let x = g.coords(n);
        if (0..g.dim()).all(|a| x[a] >= lo[a] - eps && x[a] <= hi[a] + eps) {
            s += map.values[n] * map.values[n];
        }
    }
    (s * g.cell_volume()).sqrt()
}

fn grid_analyze(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.field()?;
    let g = f.grid().clone();
    let residual = monogenic_residual(&f);
    let d = dirac_op(&f);
    let lap = laplacian(&f);
    let d2 = dirac_squared(&f);
    let interior_max = residual.max_with_margin(SUMMARY_MARGIN);
    let interior_l2 = residual.l2_with_margin(SUMMARY_MARGIN);
    let square_gap = (0..g.node_count())
        .filter(|&n| g.clamped_edge_distance(n) >= SUMMARY_MARGIN)
        .map(|n| d2.value(n).max_abs_diff(&lap.value(n)))
        .fold(0.0, f64::max);
    let mut results = json!({
        "nodes": g.node_count(),
        "signature": f.signature().to_string(),
        "residual_interior_max": interior_max,
        "residual_interior_l2": interior_l2,
        "dirac_squared_minus_laplacian_interior_max": square_gap,
    });
    if let Some(e) = &ctx.c.expect {
        let want: f64 = e.trim().parse().map_err(|_| Error::Usage(format!("--expect: `{e}` is not a number")))?;
        ctx.report.push(Check::within("interior monogenic residual", want, interior_max, ctx.tol()?));
    }
    if let Some(min) = ctx.c.min_order {
        let b = ctx.builtin()?.ok_or_else(|| Error::Usage("--min-order needs a built-in field".into()))?;
        let fine = b.sample(&g.refined()?)?;
        let fine_res = monogenic_residual(&fine);
        let m = SUMMARY_MARGIN as f64;
        let lo: Vec<f64> = (0..g.dim()).map(|a| g.origin()[a] + m * g.spacing()[a]).collect();
        let hi: Vec<f64> = (0..g.dim()).map(|a| g.origin()[a] + (g.shape()[a] as f64 - 1.0 - m) * g.spacing()[a]).collect();
        let order = (window_l2(&residual, &lo, &hi) / window_l2(&fine_res, &lo, &hi)).log2();
        results["residual_order"] = json!(order);
        ctx.report.push(Check::at_least("residual convergence order", min, order));
    }
    if let Some(p) = &ctx.c.point {
        let y = parse_list(p, "--point")?;
        if y.len() != 2 {
            return Err(Error::Usage("--point: expected x,y".into()));
        }
        let b = ctx.builtin()?.ok_or_else(|| Error::Usage("--point needs a built-in field".into()))?;
        let got = suite::reconstruct(&b, &ctx.contour()?, [y[0], y[1]])?;
        let want = b.eval(Complex64::new(y[0], y[1])).expect("complex field");
        results["cauchy"] = json!({ "re": got.re, "im": got.im, "exact_re": want.re, "exact_im": want.im });
        ctx.report.push(Check::at_most("Cauchy reconstruction error", ctx.tol()?, (got - want).norm()));
    }
    ctx.report.results = results;
    ctx.field_file("dirac", &d)?;
    ctx.field_file("laplacian", &lap)?;
    ctx.field_file("residual", &scalar_field(&residual)?)?;
    Ok(())
}

#[derive(Serialize)]
struct WalkRow {
    k: usize,
    x: f64,
    y: f64,
    re: f64,
    im: f64,
    increment: f64,
}

fn topo_winding(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.plane_field()?;
    let contour = ctx.contour()?;
    let walk = phase_walk(f.as_ref(), &contour, ZERO_TOL)?;
    let w = winding_number(f.as_ref(), &contour)?;
    println!("winding number {w}");
    ctx.report.results = json!({ "winding": w, "total_phase": walk.total(), "samples": walk.points.len() });
    if let Some(e) = ctx.expect_int()? {
        ctx.report.push(Check::exact("winding number", e, w));
    }
    let rows: Vec<WalkRow> = (0..walk.points.len())
        .map(|k| WalkRow {
            k,
            x: walk.points[k][0],
            y: walk.points[k][1],
            re: walk.values[k].re,
            im: walk.values[k].im,
            increment: walk.increments[k],
        })
        .collect();
    ctx.records("phase", &rows)
}

fn topo_zeros(ctx: &mut Ctx) -> Result<(), Error> {
    let f = ctx.plane_field()?;
    let contour = ctx.contour()?;
    let hbar = need(&ctx.c.hbar, "hbar")?;
    let r = verify_dbs(f.as_ref(), &contour, hbar)?;
    let count = count_zeros(f.as_ref(), &contour, ZeroOracle::default())?;
    println!("N = {}, winding = {}, brute-force zeros = {}, loop integral = {}", r.zeros, r.winding, r.oracle_zeros, r.loop_integral);
    let h = 2.0 * std::f64::consts::PI * hbar;
    ctx.report.push(Check::exact("zero count = winding", r.winding, r.zeros));
    ctx.report.push(Check::exact("brute-force zeros = zero count", r.zeros, r.oracle_zeros));
    ctx.report.push(Check::within(
        "loop integral = winding * 2 pi hbar",
        r.winding as f64 * h,
        r.loop_integral,
        ctx.tol()? * h * r.winding.unsigned_abs().max(1) as f64,
    ));
    if let Some(e) = ctx.expect_int()? {
        ctx.report.push(Check::exact("zero count", e, r.zeros));
    }
    ctx.report.results = serde_json::to_value(&r).expect("report serializes");
    let rows: Vec<ZeroRow> =
        count.oracle.iter().map(|z| ZeroRow { x: z.at[0], y: z.at[1], multiplicity: z.multiplicity, magnitude: z.magnitude }).collect();
    ctx.records("zeros", &rows)
}

#[derive(Serialize)]
struct ZeroRow {
    x: f64,
    y: f64,
    multiplicity: i64,
    magnitude: f64,
}

fn topo_betti(ctx: &mut Ctx) -> Result<(), Error> {
    let g = ctx.grid()?;
    let sig = Signature::euclidean(g.dim())?;
    let max_grade = ctx.c.max_grade.unwrap_or(g.dim());
    ctx.c.max_grade = Some(max_grade);
    ctx.report.config.max_grade = Some(max_grade);
    let reports = betti_numbers(&g, sig, max_grade)?;
    let betti: Vec<usize> = reports.iter().map(|r| r.kernel_dim).collect();
    println!("Betti numbers {betti:?}");
    for r in &reports {
        ctx.report.push(Check::at_least(format!("grade {} gap ratio", r.grade), monogen_core::topo::GAP_RATIO_MIN, r.gap_ratio));
    }
    if let Some(e) = &ctx.c.expect {
        let want: Vec<usize> = parse_list(e, "--expect")?.into_iter().map(|x| x as usize).collect();
        ctx.report.push(Check::exact("Betti numbers", format!("{want:?}"), format!("{betti:?}")));
    }
    ctx.report.results = json!({ "betti": betti });
    ctx.records("kernels", &reports)
}

fn norm_drift(s: &EvolutionSeries) -> f64 {
    let n0 = norm(&s.frames[0]);
    s.frames.iter().map(|f| (norm(f) - n0).abs()).fold(0.0, f64::max)
}

fn bohm_evolve(ctx: &mut Ctx) -> Result<(), Error> {
    let s = ctx.evolve()?;
    let dir = ctx.out_dir().join("series");
    let written = io::write_series(&dir, &s, ctx.format())?;
    let drift = norm_drift(&s);
    ctx.report.push(Check::at_most("norm drift", ctx.tol()?, drift));
    ctx.report.results = json!({
        "frames": s.frames.len(),
        "final_time": s.time(s.frames.len() - 1),
        "initial_norm": norm(&s.frames[0]),
    });
    println!("{} frames written to {}", s.frames.len(), dir.display());
    ctx.report.outputs.extend(written);
    Ok(())
}

#[derive(Serialize)]
struct FrameSummaryRow {
    frame: usize,
    t: f64,
    nodes: usize,
    hj_max: f64,
    hj_weighted_l2: f64,
    continuity_max: f64,
    continuity_weighted_l2: f64,
}

fn bohm_diagnose(ctx: &mut Ctx) -> Result<(), Error> {
    let s = ctx.series()?;
    let floor = need(&ctx.c.floor, "floor")?;
    let diags = hj_and_continuity_residuals(&s)?;
    let rows: Vec<FrameSummaryRow> = diags
        .iter()
        .map(|d| {
            let (h, c) = (d.hj_summary(floor), d.continuity_summary(floor));
            FrameSummaryRow {
                frame: d.frame,
                t: d.time,
                nodes: h.nodes,
                hj_max: h.max,
                hj_weighted_l2: h.weighted_l2,
                continuity_max: c.max,
                continuity_weighted_l2: c.weighted_l2,
            }
        })
        .collect();
    let worst_hj = rows.iter().map(|r| r.hj_weighted_l2).fold(0.0, f64::max);
    let worst_co = rows.iter().map(|r| r.continuity_weighted_l2).fold(0.0, f64::max);
    let finite = rows.iter().all(|r| r.nodes > 0 && r.hj_weighted_l2.is_finite() && r.continuity_weighted_l2.is_finite());
    ctx.report.push(Check::flag("residuals finite on every frame", true, finite, finite));
    ctx.report.push(Check::at_most("norm drift", ctx.tol()?, norm_drift(&s)));
    println!("largest weighted residuals: Hamilton-Jacobi {worst_hj:e}, continuity {worst_co:e}");
    ctx.report.results = json!({ "frames": diags.len(), "max_hj_weighted_l2": worst_hj, "max_continuity_weighted_l2": worst_co });
    ctx.records("frames", &rows)?;
    ctx.records("nodes", &io::diagnostic_rows(&diags))
}

fn bohm_trajectories_cmd(ctx: &mut Ctx) -> Result<(), Error> {
    let s = ctx.series()?;
    let seeds = need(&ctx.c.seeds, "seeds")?;
    let paths = bohm_trajectories(&s, &seeds, need(&ctx.c.substeps, "substeps")?)?;
    let finite = paths.iter().all(|p| p.positions.iter().all(|x| x.is_finite()));
    ctx.report.push(Check::flag("positions finite", true, finite, finite));
    let summary: Vec<_> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| json!({ "seed_id": i, "seed": p.seed, "final": p.positions.last(), "termination": p.termination }))
        .collect();
    for p in &paths {
        let end = match p.termination {
            Termination::Completed => "completed".to_string(),
            Termination::EnteredNode { t, x } => format!("entered a node at t = {t}, x = {x}"),
            Termination::LeftDomain { t, x } => format!("left the domain at t = {t}, x = {x}"),
        };
        println!("seed {}: {} -> {} ({end})", p.seed, p.positions[0], p.positions.last().expect("start"));
    }
    ctx.report.results = json!(summary);
    let path = ctx.data_path("paths");
    io::write_trajectories(&path, &paths, ctx.format())?;
    ctx.report.outputs.push(path);
    Ok(())
}

#[derive(Serialize)]
struct PhaseRow {
    t: f64,
    phase: f64,
}

fn rel_dispersion(ctx: &mut Ctx) -> Result<(), Error> {
    let w = WaveParams {
        e0: need(&ctx.c.e0, "e0")?,
        p: need(&ctx.c.p, "p")?,
        big_m: need(&ctx.c.big_m, "big-m")?,
        hbar: need(&ctx.c.hbar, "hbar")?,
    };
    Variant::Modified { e0: w.e0, big_m: w.big_m }.validate()?;
    let residual = plane_wave_residual(&w);
    let (omega, k) = de_broglie(&w);
    ctx.report.push(Check::at_most("|E0 - (|p|^2 + M^2)/E0|", 4.0 * f64::EPSILON * w.e0, residual.abs()));
    let mut results = json!({ "residual": residual, "omega": omega, "k": k });
    if w.p.len() == 1 {
        let g = ctx.grid()?;
        let period = g.shape()[0] as f64 * g.spacing()[0];
        let turns = w.p[0] * period / (2.0 * std::f64::consts::PI * w.hbar);
        if g.boundary()[0] != Boundary::Periodic || (turns - turns.round()).abs() > 1e-9 {
            return Err(Error::Usage("the plane wave must be periodic on a periodic grid".into()));
        }
        let init = Builtin::Plane(w.clone()).sample_complex(&g)?;
        let s = evolve(
            &init,
            &vec![0.0; g.node_count()],
            "free",
            w.hbar,
            Variant::Modified { e0: w.e0, big_m: w.big_m },
            need(&ctx.c.dt, "dt")?,
            need(&ctx.c.steps, "steps")?,
            need(&ctx.c.save_every, "save-every")?,
        )?;
        let node = g.node_count() / 3;
        let fitted = fit_frequency(&s, node);
        ctx.report.push(Check::within("fitted frequency vs E0/hbar", omega, fitted, ctx.tol()? * omega));
        results["fitted_omega"] = json!(fitted);
        let samples: Vec<Complex64> = s.frames.iter().map(|f| f.values()[node]).collect();
        let rows: Vec<PhaseRow> =
            unwrap_path(&samples, 1.0).into_iter().enumerate().map(|(i, phase)| PhaseRow { t: s.time(i), phase }).collect();
        ctx.records("phase", &rows)?;
    }
    println!("E0 - (|p|^2 + M^2)/E0 = {residual:e}, omega = {omega}");
    ctx.report.results = results;
    Ok(())
}

#[derive(Serialize)]
struct EnergyRow {
    t: f64,
    energy: f64,
}

fn heat_flow(ctx: &mut Ctx) -> Result<(), Error> {
    let g = ctx.grid()?;
    let b = ctx.builtin()?;
    let init: Vec<f64> = match &b {
        Some(b) => b.sample_real(&g)?,
        None => {
            let f = ctx.complex_field()?;
            if f.values().iter().any(|z| z.im != 0.0) {
                return Err(Error::Usage("heat-flow needs a real field".into()));
            }
            f.values().iter().map(|z| z.re).collect()
        }
    };
    let scheme = match need(&ctx.c.scheme, "scheme")?.as_str() {
        "explicit" => HeatScheme::Explicit,
        "crank-nicolson" | "cn" => HeatScheme::CrankNicolson,
        other => return Err(Error::Usage(format!("--scheme: expected explicit or crank-nicolson, got `{other}`"))),
    };
    let kappa = need(&ctx.c.kappa, "kappa")?;
    let r = heat_gradient_flow_check(&g, &init, kappa, need(&ctx.c.dt, "dt")?, need(&ctx.c.steps, "steps")?, scheme)?;
    ctx.report.push(Check::flag("energy nonincreasing every frame", true, r.monotone, r.monotone));
    let mut results = json!({ "initial_energy": r.energies[0], "final_energy": r.energies.last(), "max_increase": r.max_increase });
    if let Some(Builtin::SinMode(m)) = b {
        let last = r.energies.len() - 1;
        if r.energies[0] > 0.0 && r.energies[last] > 0.0 && last > 0 {
            let rate = -(r.energies[last] / r.energies[0]).ln() / r.times[last];
            let want = 2.0 * kappa * m * m;
            results["decay_rate"] = json!(rate);
            ctx.report.push(Check::within("sine-mode energy decay rate", want, rate, ctx.tol()? * want));
        }
    }
    ctx.report.results = results;
    let rows: Vec<EnergyRow> = r.times.iter().zip(&r.energies).map(|(&t, &energy)| EnergyRow { t, energy }).collect();
    ctx.records("energy", &rows)?;
    let sig = Signature::euclidean(1)?;
    let fin = GridField::scalar_fn(g.clone(), sig, {
        let vals = r.final_field.clone();
        let grid = g.clone();
        move |x| vals[((x[0] - grid.origin()[0]) / grid.spacing()[0]).round() as usize % vals.len()]
    })?;
    ctx.field_file("final", &fin)
}

#[derive(Serialize)]
struct CriterionRow {
    id: u32,
    title: String,
    passed: bool,
    checks: usize,
}

fn paper_suite(ctx: &mut Ctx) -> Result<(), Error> {
    let ids: Vec<u32> = ctx.c.criteria.clone().unwrap_or_else(|| suite::CRITERIA.iter().map(|(k, _)| *k).collect());
    let mut results = Vec::new();
    for id in ids {
        let r = suite::run_criterion(id)?;
        println!("{}", r.line());
        for c in &r.checks {
            let mut c = c.clone();
            c.name = format!("C{id} {}", c.name);
            ctx.report.push(c);
        }
        results.push(r);
    }
    let rows: Vec<CriterionRow> = results
        .iter()
        .map(|r| CriterionRow { id: r.id, title: r.title.clone(), passed: r.passed, checks: r.checks.len() })
        .collect();
    ctx.report.results = json!(results
        .iter()
        .map(|r| json!({ "id": r.id, "passed": r.passed, "seconds": r.seconds }))
        .collect::<Vec<_>>());
    ctx.records("criteria", &rows)
}
