use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sdg_brinkman::cases::{build_mesh, presets, MeshFamily};
use sdg_brinkman::mesh::{build_staggered, EdgeKind, MeshError};
use sdg_brinkman::run::{
    plot_svg, run_convergence_with, run_single, write_csv, ConfigOverrides, RunConfig, RunError,
};
use sdg_brinkman::spaces::{DofMap, SpaceKind, StaggeredSpaces};
use sdg_brinkman::verify::{CaseId, ConvergenceTable};

#[derive(Parser)]
#[command(name = "sdg", version, about = "Staggered DG solver for the Brinkman problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and print errors, norms and timings.
    Solve(RunArgs),
    /// Run a convergence study and write a CSV table and an SVG plot.
    Converge(RunArgs),
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        command: MeshCommand,
    },
    /// Experiment presets.
    Preset {
        #[command(subcommand)]
        command: PresetCommand,
    },
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Build the meshes of a configuration and check their invariants.
    Check(RunArgs),
}

#[derive(Subcommand)]
enum PresetCommand {
    /// List registered presets.
    List {
        /// Print the full presets as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeshArg {
    Square,
    Distorted,
    Hanging,
    File,
}

impl From<MeshArg> for MeshFamily {
    fn from(m: MeshArg) -> Self {
        match m {
            MeshArg::Square => MeshFamily::Square,
            MeshArg::Distorted => MeshFamily::Distorted,
            MeshArg::Hanging => MeshFamily::Hanging,
            MeshArg::File => MeshFamily::File,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Trig,
    ZeroData,
    LinearPressure,
}

impl From<CaseArg> for CaseId {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Trig => CaseId::Trig,
            CaseArg::ZeroData => CaseId::ZeroData,
            CaseArg::LinearPressure => CaseId::LinearPressure,
        }
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON configuration document.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset, expanded before all other settings.
    #[arg(long)]
    preset: Option<String>,
    /// Polynomial order(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Diffusion coefficient(s), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    epsilon: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    mesh: Option<MeshArg>,
    /// Polygon mesh file, with `--mesh file`.
    #[arg(long)]
    mesh_file: Option<PathBuf>,
    /// Cells per side, comma separated.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<usize>>,
    /// Vertex perturbation of distorted grids, relative to h.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    case: Option<CaseArg>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Quadrature degree for data and errors (also `SDG_QUAD_DEGREE`).
    #[arg(long)]
    quad_degree: Option<usize>,
    /// Assemble sequentially.
    #[arg(long)]
    serial: bool,
}

impl RunArgs {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            preset: self.preset.clone(),
            k: self.k.clone(),
            epsilon: self.epsilon.clone(),
            alpha: self.alpha,
            mesh: self.mesh.map(Into::into),
            mesh_file: self.mesh_file.clone(),
            levels: self.levels.clone(),
            delta: self.delta,
            seed: self.seed,
            case: self.case.map(Into::into),
            out_csv: self.out_csv.clone(),
            out_svg: self.out_svg.clone(),
            quad_degree: self.quad_degree,
            serial: self.serial.then_some(true),
        }
    }

    fn resolve(&self) -> Result<RunConfig, RunError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| RunError::Config(vec![format!("config {}: {e}", path.display())]))?;
                Some(ConfigOverrides::from_json(&text)?)
            }
            None => None,
        };
        RunConfig::resolve(file.as_ref(), &self.overrides())
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn emit_tables(config: &RunConfig, tables: &[ConvergenceTable], title: &str) -> Result<(), RunError> {
    let mut csv = Vec::new();
    write_csv(&mut csv, tables)?;
    match &config.out_csv {
        Some(path) => write_file(path, &csv)?,
        None => std::io::stdout().write_all(&csv)?,
    }
    if let Some(path) = &config.out_svg {
        write_file(path, plot_svg(tables, title).as_bytes())?;
    }
    Ok(())
}

fn title(config: &RunConfig) -> String {
    let name = config.preset.clone().unwrap_or_else(|| "custom".into());
    format!("{name}: {} grids, {} case", config.mesh.name(), config.case.name())
}

fn solve(args: &RunArgs) -> Result<(), RunError> {
    let config = args.resolve()?;
    let report = run_single(&config)?;
    println!("{}", report.summary());
    if let Some(path) = &config.out_csv {
        let mut csv = Vec::new();
        write_csv(&mut csv, &[report.table()])?;
        write_file(path, &csv)?;
    }
    Ok(())
}

fn converge(args: &RunArgs) -> Result<(), RunError> {
    let config = args.resolve()?;
    let tables = run_convergence_with(&config, |p| {
        eprintln!(
            "k={} eps={:e} level={} unknowns={} setup {:.2}s solve {:.2}s errors {:.2}s",
            p.k, p.epsilon, p.level, p.n_dof, p.setup_seconds, p.solve_seconds, p.error_seconds
        );
    })?;
    emit_tables(&config, &tables, &title(&config))
}

fn mesh_error(message: String) -> RunError {
    RunError::Mesh(MeshError::InvalidParameter(message))
}

fn mesh_check(args: &RunArgs) -> Result<(), RunError> {
    let config = args.resolve()?;
    for level in config.run_levels() {
        let primal = build_mesh(config.mesh, level, config.delta, config.seed, config.mesh_file.as_deref())?;
        let mesh = build_staggered(&primal);
        mesh.check().map_err(mesh_error)?;
        println!(
            "level {level}: polygons {}, triangles {}, primal edges {} ({} interior), dual edges {}, h {:.4e}, area {:.12}",
            primal.polygons.len(),
            mesh.n_triangles(),
            mesh.n_primal_edges(),
            mesh.count(EdgeKind::PrimalInterior),
            mesh.count(EdgeKind::Dual),
            mesh.h,
            mesh.total_area()
        );
        for &k in &config.k {
            let spaces = StaggeredSpaces::new(mesh.clone(), k)?;
            let dims = [SpaceKind::W, SpaceKind::U, SpaceKind::P].map(|kind| spaces.dofmap(kind).n_dofs);
            for (kind, n) in [SpaceKind::W, SpaceKind::U, SpaceKind::P].into_iter().zip(dims) {
                let expected = DofMap::expected_dim(kind, &mesh, k);
                if n != expected {
                    return Err(mesh_error(format!("k={k}: dim {kind:?} is {n}, expected {expected}")));
                }
            }
            println!("  k={k}: dim W {}, dim U {}, dim P {}, unknowns {}", dims[0], dims[1], dims[2], spaces.n_unknowns());
        }
    }
    Ok(())
}

fn preset_list(json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(&presets()).expect("presets serialize"));
        return;
    }
    for p in presets() {
        println!("{:<8} {}", p.name, p.description);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Converge(args) => converge(args),
        Command::Mesh { command: MeshCommand::Check(args) } => mesh_check(args),
        Command::Preset { command: PresetCommand::List { json } } => {
            preset_list(*json);
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
