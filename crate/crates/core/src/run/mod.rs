//! Run configuration, single runs, convergence sweeps and their CSV and SVG
//! outputs.

mod config;
mod csv_out;
mod pipeline;
mod svg;
mod sweep;

pub use config::{ConfigOverrides, RunConfig, QUAD_DEGREE_ENV};
pub use csv_out::{
    format_error, format_order, parse_csv, records, to_csv_string, write_csv, write_records, CsvError, CsvRecord,
    CSV_HEADER,
};
pub use pipeline::{CaseResult, LevelContext};
pub use svg::plot_svg;
pub use sweep::{run_convergence, run_convergence_with, run_single, RunReport, SweepProgress};

use thiserror::Error;

use crate::forms::FormError;
use crate::mesh::MeshError;
use crate::solver::SolverError;
use crate::spaces::SpaceError;
use crate::verify::VerifyError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("mesh error: {0}")]
    Mesh(#[from] MeshError),
    #[error("space construction failed: {0}")]
    Space(#[from] SpaceError),
    #[error("invalid coefficients: {0}")]
    Form(#[from] FormError),
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error("error evaluation failed: {0}")]
    Verify(#[from] VerifyError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] CsvError),
}

impl RunError {
    /// Machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            RunError::Config(_) => "config",
            RunError::Mesh(_) => "mesh",
            RunError::Space(_) | RunError::Form(_) => "discretization",
            RunError::Solver(_) => "solver",
            RunError::Verify(_) => "verify",
            RunError::Io(_) | RunError::Csv(_) => "io",
        }
    }

    /// Process exit code for the category; 0 is reserved for success and 1
    /// for unexpected failures.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "mesh" => 3,
            "discretization" => 4,
            "solver" => 5,
            "verify" => 6,
            _ => 7,
        }
    }
}
