//! File formats, configuration, built-in test fields, verification suites
//! and the `monogen` command line on top of `monogen-core`.

use std::path::{Path, PathBuf};

pub mod builtin;
pub mod cli;
pub mod config;
pub mod io;
pub mod report;
pub mod suite;

pub use config::ExperimentConfig;
pub use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("format: {0}")]
    Format(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Clifford(#[from] monogen_core::clifford::CliffordError),
    #[error(transparent)]
    Symbolic(#[from] monogen_core::symbolic::SymError),
    #[error(transparent)]
    Grid(#[from] monogen_core::grid::GridError),
    #[error(transparent)]
    Topo(#[from] monogen_core::topo::TopoError),
    #[error(transparent)]
    Bohm(#[from] monogen_core::bohm::BohmError),
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }
}
