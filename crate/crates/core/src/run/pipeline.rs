use std::time::Instant;

use crate::forms::{assemble_rhs, AssemblyMode, ProblemCoefficients};
use crate::mesh::StaggeredMesh;
use crate::solver::{build_system, solve, Blocks, DiscreteSolution};
use crate::spaces::StaggeredSpaces;
use crate::verify::{solution_errors, ManufacturedCase, SolutionErrors};

use super::RunError;

/// Spaces and coefficient-independent blocks on one mesh and order; reused
/// across `epsilon`, `alpha` and data.
pub struct LevelContext {
    pub spaces: StaggeredSpaces,
    pub blocks: Blocks,
    pub setup_seconds: f64,
}

impl LevelContext {
    pub fn new(mesh: StaggeredMesh, k: usize, mode: AssemblyMode) -> Result<Self, RunError> {
        let start = Instant::now();
        let spaces = StaggeredSpaces::new(mesh, k)?;
        let blocks = Blocks::assemble(&spaces, mode);
        Ok(Self { spaces, blocks, setup_seconds: start.elapsed().as_secs_f64() })
    }

    pub fn n_dof(&self) -> usize {
        self.spaces.n_unknowns()
    }

    pub fn solve(&self, case: &ManufacturedCase, degree: usize) -> Result<CaseResult, RunError> {
        let start = Instant::now();
        let coefficients = ProblemCoefficients::new(case.epsilon, case.alpha)?;
        let (f, g) = assemble_rhs(&self.spaces, |x| case.f(x), |x| case.g(x), degree);
        let system = build_system(&self.blocks, coefficients, &f, &g)?;
        let solution = solve(&system)?;
        let solve_seconds = start.elapsed().as_secs_f64();
        let start = Instant::now();
        let errors = solution_errors(&self.spaces, &solution, case, degree)?;
        Ok(CaseResult { solution, errors, solve_seconds, error_seconds: start.elapsed().as_secs_f64() })
    }
}

pub struct CaseResult {
    pub solution: DiscreteSolution,
    pub errors: SolutionErrors,
    pub solve_seconds: f64,
    pub error_seconds: f64,
}
