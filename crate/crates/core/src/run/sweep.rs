use std::fmt::Write;

use super::{CaseResult, LevelContext, RunConfig, RunError};
use crate::cases::{build_mesh, CaseError};
use crate::forms::AssemblyMode;
use crate::mesh::{build_staggered, StaggeredMesh, Vec2};
use crate::spaces::{DiscreteField, Sample, SpaceKind};
use crate::verify::{error_l2, field_norm, ConvergenceRow, ConvergenceTable, ManufacturedCase, NormId, SolutionErrors};

impl From<CaseError> for RunError {
    fn from(e: CaseError) -> Self {
        match e {
            CaseError::Mesh(m) => RunError::Mesh(m),
            CaseError::UnknownPreset(_) => RunError::Config(vec![e.to_string()]),
            CaseError::MeshFile(_) => RunError::Io(std::io::Error::other(e.to_string())),
        }
    }
}

fn mode(config: &RunConfig) -> AssemblyMode {
    if config.serial {
        AssemblyMode::Serial
    } else {
        AssemblyMode::Parallel
    }
}

fn level_mesh(config: &RunConfig, level: usize) -> Result<StaggeredMesh, RunError> {
    let primal = build_mesh(config.mesh, level, config.delta, config.seed, config.mesh_file.as_deref())?;
    Ok(build_staggered(&primal))
}

fn row(level: usize, h: f64, n_dof: usize, e: &SolutionErrors) -> ConvergenceRow {
    ConvergenceRow {
        level,
        h,
        n_dof,
        err_u: e.u,
        err_l: e.l,
        err_p: e.p,
        err_super: e.superconvergence,
        err_z2_scaled: e.z2_scaled,
    }
}

/// Result of a single solve.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub k: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub level: usize,
    pub h: f64,
    pub n_dof: usize,
    pub n_triangles: usize,
    pub errors: SolutionErrors,
    /// `L2` norms of `(u_h, L_h, p_h)`.
    pub solution_norms: [f64; 3],
    /// `L2` norms of the exact `(u, L, p)`.
    pub exact_norms: [f64; 3],
    pub residual: f64,
    pub multiplier: f64,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub error_seconds: f64,
}

impl RunReport {
    /// One-row table, for CSV output.
    pub fn table(&self) -> ConvergenceTable {
        ConvergenceTable {
            k: self.k,
            epsilon: self.epsilon,
            rows: vec![row(self.level, self.h, self.n_dof, &self.errors)],
        }
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "k = {}, epsilon = {:e}, alpha = {}, level = {}, h = {:.4e}", self.k, self.epsilon, self.alpha, self.level, self.h);
        let _ = writeln!(s, "triangles {}, unknowns {}", self.n_triangles, self.n_dof);
        let e = &self.errors;
        let _ = writeln!(s, "||u - u_h||_0         {:.3e}", e.u);
        let _ = writeln!(s, "||L - L_h||_0         {:.3e}", e.l);
        let _ = writeln!(s, "||p - p_h||_0         {:.3e}", e.p);
        let _ = writeln!(s, "||J_h u - u_h||_0     {:.3e}", e.superconvergence);
        let _ = writeln!(s, "sqrt(eps)|u - u_h|_Z2 {:.3e}", e.z2_scaled);
        let _ = writeln!(s, "sqrt(eps)|u - u_h|_Z1 {:.3e}", e.z1_scaled);
        let [nu, nl, np] = self.solution_norms;
        let _ = writeln!(s, "||u_h||_0 {nu:.3e}, ||L_h||_0 {nl:.3e}, ||p_h||_0 {np:.3e}");
        let [xu, xl, xp] = self.exact_norms;
        let _ = writeln!(s, "||u||_0 {xu:.3e}, ||L||_0 {xl:.3e}, ||p||_0 {xp:.3e}");
        let _ = writeln!(s, "relative residual {:.2e}, multiplier {:.2e}", self.residual, self.multiplier);
        let _ = write!(s, "setup {:.2}s, solve {:.2}s, errors {:.2}s", self.setup_seconds, self.solve_seconds, self.error_seconds);
        s
    }
}

fn single<T: Copy>(name: &str, values: &[T]) -> Result<T, String> {
    match values {
        [v] => Ok(*v),
        _ => Err(format!("{name}: a single solve needs exactly one value, got {}", values.len())),
    }
}

/// Solves once; the configuration must name exactly one order, `epsilon` and
/// level.
pub fn run_single(config: &RunConfig) -> Result<RunReport, RunError> {
    let picked = (single("k", &config.k), single("epsilon", &config.epsilon), single("levels", &config.run_levels()));
    let (k, epsilon, level) = match picked {
        (Ok(k), Ok(e), Ok(l)) => (k, e, l),
        (a, b, c) => {
            let problems = [a.err(), b.err(), c.err()].into_iter().flatten().collect();
            return Err(RunError::Config(problems));
        }
    };
    let mesh = level_mesh(config, level)?;
    let h = mesh.h;
    let ctx = LevelContext::new(mesh, k, mode(config))?;
    let case = ManufacturedCase::new(config.case, epsilon, config.alpha);
    let degree = config.data_degree(k);
    let CaseResult { solution, errors, solve_seconds, error_seconds } = ctx.solve(&case, degree)?;
    let s = &ctx.spaces;
    let norm = |f| field_norm(s, f, NormId::L2, degree);
    // the exact norms are the errors of the zero field
    let exact_norm = |kind, exact: &(dyn Fn(Vec2) -> Sample + Sync)| error_l2(s, &DiscreteField::zeros(s, kind), exact, degree);
    Ok(RunReport {
        k,
        epsilon,
        alpha: config.alpha,
        level,
        h,
        n_dof: ctx.n_dof(),
        n_triangles: s.mesh.n_triangles(),
        errors,
        solution_norms: [norm(&solution.u)?, norm(&solution.l)?, norm(&solution.p)?],
        exact_norms: [
            exact_norm(SpaceKind::U, &|x| case.u_sample(x)),
            exact_norm(SpaceKind::W, &|x| case.l_sample(x)),
            exact_norm(SpaceKind::P, &|x| case.p_sample(x)),
        ],
        residual: solution.residual,
        multiplier: solution.multiplier,
        setup_seconds: ctx.setup_seconds,
        solve_seconds,
        error_seconds,
    })
}

/// Progress event emitted after each solve of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepProgress {
    pub k: usize,
    pub epsilon: f64,
    pub level: usize,
    pub n_dof: usize,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub error_seconds: f64,
}

/// One table per `(k, epsilon)`, ordered by `k` then `epsilon` as listed in
/// the configuration. Spaces and matrix blocks are built once per
/// `(level, k)` and reused for every `epsilon`.
pub fn run_convergence(config: &RunConfig) -> Result<Vec<ConvergenceTable>, RunError> {
    run_convergence_with(config, |_| {})
}

pub fn run_convergence_with<F>(config: &RunConfig, mut progress: F) -> Result<Vec<ConvergenceTable>, RunError>
where
    F: FnMut(&SweepProgress),
{
    let mut tables = Vec::new();
    for &k in &config.k {
        let mut per_eps: Vec<ConvergenceTable> = config.epsilon.iter().map(|&e| ConvergenceTable::new(k, e)).collect();
        for level in config.run_levels() {
            let mesh = level_mesh(config, level)?;
            let h = mesh.h;
            let ctx = LevelContext::new(mesh, k, mode(config))?;
            for table in per_eps.iter_mut() {
                let case = ManufacturedCase::new(config.case, table.epsilon, config.alpha);
                let r = ctx.solve(&case, config.data_degree(k))?;
                table.rows.push(row(level, h, ctx.n_dof(), &r.errors));
                progress(&SweepProgress {
                    k,
                    epsilon: table.epsilon,
                    level,
                    n_dof: ctx.n_dof(),
                    setup_seconds: ctx.setup_seconds,
                    solve_seconds: r.solve_seconds,
                    error_seconds: r.error_seconds,
                });
            }
        }
        tables.extend(per_eps);
    }
    Ok(tables)
}
