//! On-disk formats: grid fields (JSON container or flat CSV), contour point
//! lists, evolution series (manifest plus one field file per frame),
//! trajectories and per-node diagnostics.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use monogen_core::bohm::{EvolutionSeries, FrameDiagnostics, Termination, Trajectory, Variant};
use monogen_core::grid::{Boundary, ComplexField, Contour, Grid, GridField};
use monogen_core::{Blade, Multivector, Signature};
use serde::{Deserialize, Serialize};

use crate::Error;

pub const FIELD_FORMAT: &str = "monogen-gridfield";
pub const SERIES_FORMAT: &str = "monogen-evolution";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureRecord {
    pub p: usize,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BladeRecord {
    pub mask: u16,
    pub label: String,
    pub values: Vec<f64>,
}

/// The JSON container for a [`GridField`]. Blades that are zero everywhere
/// are left out; missing blades read back as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    pub format: String,
    pub version: u32,
    pub dimension: usize,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub boundary: Vec<Boundary>,
    pub signature: SignatureRecord,
    pub blades: Vec<BladeRecord>,
}

impl FieldFile {
    pub fn from_field(f: &GridField) -> Self {
        let g = f.grid();
        let sig = f.signature();
        let blades = f
            .active_blades()
            .into_iter()
            .map(|b| BladeRecord { mask: b.mask(), label: b.to_string(), values: f.component_values(b) })
            .collect();
        Self {
            format: FIELD_FORMAT.into(),
            version: VERSION,
            dimension: g.dim(),
            shape: g.shape().to_vec(),
            spacing: g.spacing().to_vec(),
            origin: g.origin().to_vec(),
            boundary: g.boundary().to_vec(),
            signature: SignatureRecord { p: sig.p(), q: sig.q() },
            blades,
        }
    }

    pub fn into_field(self) -> Result<GridField, Error> {
        if self.format != FIELD_FORMAT {
            return Err(Error::Format(format!("expected format `{FIELD_FORMAT}`, found `{}`", self.format)));
        }
        if self.version != VERSION {
            return Err(Error::Format(format!("unsupported field version {}", self.version)));
        }
        if self.dimension != self.shape.len() {
            return Err(Error::Format("dimension disagrees with shape".into()));
        }
        let grid = Grid::new(self.shape, self.spacing, self.origin, self.boundary)?;
        let sig = Signature::new(self.signature.p, self.signature.q)?;
        let width = sig.blade_count();
        let nodes = grid.node_count();
        let mut data = vec![0.0; nodes * width];
        for b in self.blades {
            let blade = Blade::from_mask(b.mask);
            if !blade.is_valid_for(sig) {
                return Err(Error::Format(format!("blade mask {} outside {sig}", b.mask)));
            }
            if b.values.len() != nodes {
                return Err(Error::Format(format!("blade {} has {} values for {nodes} nodes", b.label, b.values.len())));
            }
            for (n, v) in b.values.into_iter().enumerate() {
                data[n * width + b.mask as usize] = v;
            }
        }
        Ok(GridField::from_data(grid, sig, data)?)
    }
}

pub fn field_to_json(f: &GridField) -> String {
    serde_json::to_string_pretty(&FieldFile::from_field(f)).expect("field serializes")
}

pub fn field_from_json(text: &str) -> Result<GridField, Error> {
    let file: FieldFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_field()
}

/// One row per node: coordinates `x1..xn`, then one column per active blade.
pub fn field_to_csv(f: &GridField) -> String {
    let g = f.grid();
    let blades = f.active_blades();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=g.dim()).map(|i| format!("x{i}")).collect();
    header.extend(blades.iter().map(|b| b.to_string()));
    w.write_record(&header).expect("in-memory write");
    for n in 0..g.node_count() {
        let x = g.coords(n);
        let mut row: Vec<String> = x[..g.dim()].iter().map(|c| c.to_string()).collect();
        row.extend(blades.iter().map(|&b| f.component(n, b).to_string()));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Reads [`field_to_csv`] output back; the grid and signature come from
/// elsewhere (a series manifest) since CSV carries no header block.
pub fn field_from_csv(text: &str, grid: &Grid, sig: Signature) -> Result<GridField, Error> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| Error::Format(e.to_string()))?.clone();
    let d = grid.dim();
    if headers.len() < d {
        return Err(Error::Format("missing coordinate columns".into()));
    }
    let mut blades = Vec::new();
    for label in headers.iter().skip(d) {
        let mv = Multivector::parse_terms(sig, label)?;
        let (blade, c) = mv.terms().next().ok_or_else(|| Error::Format(format!("bad blade column `{label}`")))?;
        if c != 1.0 || mv.terms().count() != 1 {
            return Err(Error::Format(format!("bad blade column `{label}`")));
        }
        blades.push(blade);
    }
    let mut field = GridField::zeros(grid.clone(), sig)?;
    let mut rows = 0;
    for (n, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        if n >= grid.node_count() {
            return Err(Error::Format("more rows than grid nodes".into()));
        }
        let mut v = Multivector::zero(sig);
        for (k, &b) in blades.iter().enumerate() {
            let c: f64 = rec
                .get(d + k)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Format(format!("row {}: bad value", n + 1)))?;
            v.add_term(b, c)?;
        }
        field.set(n, &v)?;
        rows += 1;
    }
    if rows != grid.node_count() {
        return Err(Error::Format(format!("{rows} rows for {} nodes", grid.node_count())));
    }
    Ok(field)
}

pub fn write_field(path: &Path, f: &GridField, format: Format) -> Result<(), Error> {
    let text = match format {
        Format::Json => field_to_json(f),
        Format::Csv => field_to_csv(f),
    };
    write_text(path, &text)
}

pub fn read_field(path: &Path) -> Result<GridField, Error> {
    field_from_json(&read_text(path)?)
}

/// Closed polyline as whitespace- or comma-separated `x y` pairs, one per
/// line. Blank lines and `#` comments are skipped.
pub fn parse_contour_points(text: &str) -> Result<Contour, Error> {
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::Format(format!("contour line {}: expected two numbers", i + 1)))?;
        if nums.len() != 2 {
            return Err(Error::Format(format!("contour line {}: expected two numbers", i + 1)));
        }
        pts.push([nums[0], nums[1]]);
    }
    Ok(Contour::Points(pts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub index: usize,
    pub time: f64,
    pub file: String,
}

/// Everything about an [`EvolutionSeries`] except the frame values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesManifest {
    pub format: String,
    pub version: u32,
    pub grid: Grid,
    pub hbar: f64,
    pub variant: Variant,
    /// Spacing between stored frames.
    pub dt: f64,
    /// Integrator step.
    pub step: f64,
    pub potential_label: String,
    pub potential: Vec<f64>,
    pub frame_format: Format,
    pub frames: Vec<FrameRecord>,
}

/// Writes `manifest.json` plus `frame_NNNNN.{json,csv}` into `dir`; returns
/// every path written.
pub fn write_series(dir: &Path, s: &EvolutionSeries, format: Format) -> Result<Vec<PathBuf>, Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut frames = Vec::new();
    for (i, f) in s.frames.iter().enumerate() {
        let name = format!("frame_{i:05}.{}", format.extension());
        let path = dir.join(&name);
        write_field(&path, &f.to_grid_field()?, format)?;
        frames.push(FrameRecord { index: i, time: s.time(i), file: name });
        written.push(path);
    }
    let manifest = SeriesManifest {
        format: SERIES_FORMAT.into(),
        version: VERSION,
        grid: s.grid.clone(),
        hbar: s.hbar,
        variant: s.variant,
        dt: s.dt,
        step: s.step,
        potential_label: s.potential_label.clone(),
        potential: s.potential.clone(),
        frame_format: format,
        frames,
    };
    let path = dir.join("manifest.json");
    write_text(&path, &serde_json::to_string_pretty(&manifest).expect("manifest serializes"))?;
    written.insert(0, path);
    Ok(written)
}

/// Loads a series from its manifest; frame paths are relative to the
/// manifest's directory.
pub fn read_series(manifest_path: &Path) -> Result<EvolutionSeries, Error> {
    let m: SeriesManifest =
        serde_json::from_str(&read_text(manifest_path)?).map_err(|e| Error::Format(format!("{}: {e}", manifest_path.display())))?;
    if m.format != SERIES_FORMAT || m.version != VERSION {
        return Err(Error::Format(format!("{} is not a version-{VERSION} evolution manifest", manifest_path.display())));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let sig = Signature::euclidean(2)?;
    let mut frames = Vec::with_capacity(m.frames.len());
    for (i, rec) in m.frames.iter().enumerate() {
        if rec.index != i {
            return Err(Error::Format("frames out of order".into()));
        }
        let path = base.join(&rec.file);
        let text = read_text(&path)?;
        let field = match m.frame_format {
            Format::Json => field_from_json(&text)?,
            Format::Csv => field_from_csv(&text, &m.grid, sig)?,
        };
        if field.grid() != &m.grid {
            return Err(Error::Format(format!("{}: grid differs from manifest", path.display())));
        }
        frames.push(ComplexField::from_grid_field(&field, 0.0)?);
    }
    Ok(EvolutionSeries {
        grid: m.grid,
        hbar: m.hbar,
        variant: m.variant,
        dt: m.dt,
        step: m.step,
        potential: m.potential,
        potential_label: m.potential_label,
        frames,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub seed_id: usize,
    pub t: f64,
    pub x: f64,
}

pub fn trajectory_rows(paths: &[Trajectory]) -> Vec<TrajectoryRow> {
    let mut rows = Vec::new();
    for (id, p) in paths.iter().enumerate() {
        for (&t, &x) in p.times.iter().zip(&p.positions) {
            rows.push(TrajectoryRow { seed_id: id, t, x });
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed_id: usize,
    pub seed: f64,
    pub termination: Termination,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
}

pub fn write_trajectories(path: &Path, paths: &[Trajectory], format: Format) -> Result<(), Error> {
    match format {
        Format::Csv => write_rows(path, &trajectory_rows(paths)),
        Format::Json => {
            let recs: Vec<TrajectoryRecord> = paths
                .iter()
                .enumerate()
                .map(|(id, p)| TrajectoryRecord {
                    seed_id: id,
                    seed: p.seed,
                    termination: p.termination,
                    times: p.times.clone(),
                    positions: p.positions.clone(),
                })
                .collect();
            write_json(path, &recs)
        }
    }
}

/// Per-node residual fields of one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub frame: usize,
    pub t: f64,
    pub x: f64,
    pub rho: f64,
    /// NaN (empty in CSV) where the amplitude is below tolerance.
    pub quantum_potential: Option<f64>,
    pub hj: Option<f64>,
    pub continuity: Option<f64>,
}

pub fn diagnostic_rows(diags: &[FrameDiagnostics]) -> Vec<DiagnosticRow> {
    let finite = |v: f64| v.is_finite().then_some(v);
    let mut rows = Vec::new();
    for d in diags {
        let g = &d.hj.grid;
        for n in 0..g.node_count() {
            rows.push(DiagnosticRow {
                frame: d.frame,
                t: d.time,
                x: g.coords(n)[0],
                rho: d.rho[n],
                quantum_potential: finite(d.quantum_potential.values[n]),
                hj: finite(d.hj.values[n]),
                continuity: finite(d.continuity.values[n]),
            });
        }
    }
    rows
}

/// Serializable records as JSON (an array) or CSV (one row each).
pub fn write_records<T: Serialize>(path: &Path, rows: &[T], format: Format) -> Result<(), Error> {
    match format {
        Format::Json => write_json(path, rows),
        Format::Csv => write_rows(path, rows),
    }
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    write_text(path, &String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
