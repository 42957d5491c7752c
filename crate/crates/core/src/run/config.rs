use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::cases::{preset, ExperimentPreset, MeshFamily, DISTORTED_DELTA, DISTORTED_SEED};
use crate::forms::default_data_degree;
use crate::polybasis::MAX_QUADRATURE_DEGREE;
use crate::spaces::MAX_SPACE_ORDER;
use crate::verify::CaseId;

/// Environment variable overriding the data and error quadrature degree.
pub const QUAD_DEGREE_ENV: &str = "SDG_QUAD_DEGREE";

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub k: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub alpha: f64,
    pub mesh: MeshFamily,
    pub mesh_file: Option<PathBuf>,
    pub levels: Vec<usize>,
    pub delta: f64,
    pub seed: u64,
    pub case: CaseId,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub quad_degree: Option<usize>,
    pub serial: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            k: vec![1],
            epsilon: vec![1.0],
            alpha: 1.0,
            mesh: MeshFamily::Square,
            mesh_file: None,
            levels: vec![2, 4, 8],
            delta: DISTORTED_DELTA,
            seed: DISTORTED_SEED,
            case: CaseId::Trig,
            out_csv: None,
            out_svg: None,
            quad_degree: None,
            serial: false,
        }
    }
}

/// A partial configuration: a JSON config document or a set of command-line
/// flags. Unset fields leave the layer below untouched.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigOverrides {
    pub preset: Option<String>,
    pub k: Option<Vec<usize>>,
    pub epsilon: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub mesh: Option<MeshFamily>,
    pub mesh_file: Option<PathBuf>,
    pub levels: Option<Vec<usize>>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub case: Option<CaseId>,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub quad_degree: Option<usize>,
    pub serial: Option<bool>,
}

impl ConfigOverrides {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(vec![format!("config file: {e}")]))
    }

    fn apply(&self, c: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = &self.$f { c.$f = v.clone(); })* };
        }
        set!(k, epsilon, alpha, mesh, levels, delta, seed, case, serial);
        macro_rules! set_opt {
            ($($f:ident),*) => { $(if self.$f.is_some() { c.$f = self.$f.clone(); })* };
        }
        set_opt!(mesh_file, out_csv, out_svg, quad_degree);
    }
}

impl From<&ExperimentPreset> for RunConfig {
    fn from(p: &ExperimentPreset) -> Self {
        Self {
            preset: Some(p.name.clone()),
            k: p.orders.clone(),
            epsilon: p.epsilons.clone(),
            alpha: p.alpha,
            mesh: p.mesh,
            levels: p.levels.clone(),
            delta: p.delta,
            seed: p.seed,
            case: p.case,
            ..Self::default()
        }
    }
}

impl RunConfig {
    /// Layers, lowest first: defaults, preset, `SDG_QUAD_DEGREE`, config
    /// file, command-line flags. The preset named on the command line wins
    /// over the one named in the file.
    pub fn resolve(file: Option<&ConfigOverrides>, flags: &ConfigOverrides) -> Result<Self, RunError> {
        let env = std::env::var(QUAD_DEGREE_ENV).ok();
        Self::resolve_with_env(file, flags, env.as_deref())
    }

    pub fn resolve_with_env(
        file: Option<&ConfigOverrides>,
        flags: &ConfigOverrides,
        quad_env: Option<&str>,
    ) -> Result<Self, RunError> {
        let mut problems = Vec::new();
        let name = flags.preset.clone().or_else(|| file.and_then(|f| f.preset.clone()));
        let mut config = match &name {
            Some(n) => match preset(n) {
                Ok(p) => RunConfig::from(&p),
                Err(e) => {
                    problems.push(e.to_string());
                    RunConfig::default()
                }
            },
            None => RunConfig::default(),
        };
        if let Some(raw) = quad_env {
            match raw.trim().parse::<usize>() {
                Ok(d) => config.quad_degree = Some(d),
                Err(_) => problems.push(format!("{QUAD_DEGREE_ENV}: expected a non-negative integer, got {raw:?}")),
            }
        }
        if let Some(f) = file {
            f.apply(&mut config);
        }
        flags.apply(&mut config);
        config.preset = name;
        problems.extend(config.problems());
        if problems.is_empty() {
            Ok(config)
        } else {
            Err(RunError::Config(problems))
        }
    }

    /// Every validation failure, in field order.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if self.k.is_empty() {
            p.push("k: at least one order is required".into());
        }
        for &k in &self.k {
            if k > MAX_SPACE_ORDER {
                p.push(format!("k: order {k} exceeds the supported maximum {MAX_SPACE_ORDER}"));
            }
        }
        if self.epsilon.is_empty() {
            p.push("epsilon: at least one value is required".into());
        }
        for &e in &self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                p.push(format!("epsilon: {e} must be positive and finite"));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            p.push(format!("alpha: {} must be positive and finite", self.alpha));
        }
        if self.levels.is_empty() {
            p.push("levels: at least one level is required".into());
        }
        if self.levels.contains(&0) {
            p.push("levels: levels must be positive".into());
        }
        if !self.levels.windows(2).all(|w| w[0] < w[1]) {
            p.push("levels: levels must be strictly increasing".into());
        }
        match self.mesh {
            MeshFamily::Distorted if !(0.0..0.5).contains(&self.delta) => {
                p.push(format!("delta: {} must lie in [0, 0.5)", self.delta));
            }
            MeshFamily::Hanging if self.levels.iter().any(|l| l % 2 != 0) => {
                p.push("levels: hanging-node grids need even levels".into());
            }
            MeshFamily::File => {
                match &self.mesh_file {
                    None => p.push("mesh_file: required when mesh is 'file'".into()),
                    Some(path) if !path.is_file() => p.push(format!("mesh_file: {} does not exist", path.display())),
                    _ => {}
                }
            }
            _ => {}
        }
        if let Some(d) = self.quad_degree {
            if d > MAX_QUADRATURE_DEGREE {
                p.push(format!("quad_degree: {d} exceeds the largest tabulated degree {MAX_QUADRATURE_DEGREE}"));
            }
        }
        p
    }

    /// Levels actually run: a mesh file is a single level, numbered 1.
    pub fn run_levels(&self) -> Vec<usize> {
        if self.mesh == MeshFamily::File {
            vec![1]
        } else {
            self.levels.clone()
        }
    }

    /// Quadrature degree for data and errors at order `k`; never below the
    /// degree needed by the bilinear forms.
    pub fn data_degree(&self, k: usize) -> usize {
        self.quad_degree.unwrap_or_else(|| default_data_degree(k)).clamp(2 * k + 2, MAX_QUADRATURE_DEGREE)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
