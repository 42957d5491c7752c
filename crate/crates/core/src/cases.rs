//! Named experiment presets: a manufactured case, a mesh family and the
//! sweep over levels, orders and `epsilon`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{build_distorted_grid, build_hanging_grid, build_square_grid, import_polygon_mesh, MeshError, PrimalMesh};
use crate::verify::CaseId;

/// Seed used by every distorted-grid preset.
pub const DISTORTED_SEED: u64 = 42;
/// Relative vertex perturbation used by every distorted-grid preset.
pub const DISTORTED_DELTA: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFamily {
    Square,
    Distorted,
    Hanging,
    File,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 4] = [MeshFamily::Square, MeshFamily::Distorted, MeshFamily::Hanging, MeshFamily::File];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Square => "square",
            MeshFamily::Distorted => "distorted",
            MeshFamily::Hanging => "hanging",
            MeshFamily::File => "file",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CaseError {
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("mesh file: {0}")]
    MeshFile(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPreset {
    pub name: String,
    pub description: String,
    pub mesh: MeshFamily,
    /// Cells per side of the coarse grid, increasing.
    pub levels: Vec<usize>,
    pub orders: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub alpha: f64,
    pub case: CaseId,
    pub delta: f64,
    pub seed: u64,
}

const TABLE_EPSILONS: [f64; 4] = [1.0, 1e-2, 1e-4, 1e-8];

fn table(index: usize) -> ExperimentPreset {
    let eps = TABLE_EPSILONS[(index - 1) % 4];
    let mesh = if index <= 4 { MeshFamily::Square } else { MeshFamily::Distorted };
    ExperimentPreset {
        name: format!("table{index}"),
        description: format!("trig case, epsilon = {eps:e}, {} grids", mesh.name()),
        mesh,
        levels: vec![2, 4, 8, 16, 32],
        orders: vec![1, 2, 3],
        epsilons: vec![eps],
        alpha: 1.0,
        case: CaseId::Trig,
        delta: if mesh == MeshFamily::Distorted { DISTORTED_DELTA } else { 0.0 },
        seed: DISTORTED_SEED,
    }
}

/// All registered presets, in listing order.
pub fn presets() -> Vec<ExperimentPreset> {
    let mut all: Vec<_> = (1..=8).map(table).collect();
    all.push(ExperimentPreset {
        name: "hanging".into(),
        description: "trig case, epsilon = 1, half-refined grids with hanging vertices".into(),
        mesh: MeshFamily::Hanging,
        levels: vec![4, 8, 16],
        orders: vec![1, 2],
        epsilons: vec![1.0],
        alpha: 1.0,
        case: CaseId::Trig,
        delta: 0.0,
        seed: DISTORTED_SEED,
    });
    all
}

pub fn preset(name: &str) -> Result<ExperimentPreset, CaseError> {
    presets().into_iter().find(|p| p.name == name).ok_or_else(|| CaseError::UnknownPreset(name.to_string()))
}

/// Builds the primal mesh of a generated family at `level` cells per side,
/// or reads `file` for [`MeshFamily::File`].
pub fn build_mesh(
    family: MeshFamily,
    level: usize,
    delta: f64,
    seed: u64,
    file: Option<&Path>,
) -> Result<PrimalMesh, CaseError> {
    Ok(match family {
        MeshFamily::Square => build_square_grid(level)?,
        MeshFamily::Distorted => build_distorted_grid(level, delta, seed)?,
        MeshFamily::Hanging => build_hanging_grid(level)?,
        MeshFamily::File => {
            let path = file.ok_or_else(|| CaseError::MeshFile("no path given".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| CaseError::MeshFile(format!("{}: {e}", path.display())))?;
            import_polygon_mesh(&text)?
        }
    })
}
