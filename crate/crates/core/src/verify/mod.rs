//! Manufactured solutions, canonical projections, discrete norms and
//! convergence tables.

mod cases;
mod norms;
mod table;

pub use cases::{trig_pressure_shift, CaseId, ManufacturedCase};
pub use norms::{norm_eval, NormId};
pub use table::{ConvergenceRow, ConvergenceTable, Metric};

use thiserror::Error;

use crate::mesh::Vec2;
use crate::solver::DiscreteSolution;
use crate::spaces::{DiscreteField, FieldEvaluator, Sample, SpaceError, SpaceKind, StaggeredSpaces};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("norm {norm:?} is not defined on the {kind:?} space")]
    IncompatibleNorm { norm: NormId, kind: SpaceKind },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Basis(#[from] crate::polybasis::BasisError),
}

fn pad2(v: [f64; 2]) -> [f64; 4] {
    [v[0], v[1], 0.0, 0.0]
}

/// `I_h p`: pressure DOFs set to the moments of the exact pressure.
pub fn project_ih(case: &ManufacturedCase, spaces: &StaggeredSpaces, degree: usize) -> DiscreteField {
    spaces.interpolate(SpaceKind::P, |x| [case.p(x), 0.0, 0.0, 0.0], degree).expect("interpolation")
}

/// `J_h u`: velocity DOFs set to the moments of the exact velocity.
pub fn project_jh(case: &ManufacturedCase, spaces: &StaggeredSpaces, degree: usize) -> DiscreteField {
    spaces.interpolate(SpaceKind::U, |x| pad2(case.u(x)), degree).expect("interpolation")
}

/// Natural DOF interpolant of the exact `L` into the gradient space.
pub fn interpolate_l(case: &ManufacturedCase, spaces: &StaggeredSpaces, degree: usize) -> DiscreteField {
    spaces.interpolate(SpaceKind::W, |x| case.l_sample(x).value, degree).expect("interpolation")
}

fn difference(a: &Sample, b: &Sample) -> Sample {
    let mut out = *a;
    for c in 0..4 {
        out.value[c] -= b.value[c];
        out.grad[c][0] -= b.grad[c][0];
        out.grad[c][1] -= b.grad[c][1];
    }
    out
}

/// Norm of `exact - field`.
pub fn error_norm<E>(
    spaces: &StaggeredSpaces,
    field: &DiscreteField,
    exact: E,
    norm: NormId,
    degree: usize,
) -> Result<f64, VerifyError>
where
    E: Fn(Vec2) -> Sample + Sync,
{
    let ev = FieldEvaluator::new(spaces, field);
    norm_eval(spaces, field.kind, norm, |t, x| difference(&exact(x), &ev.eval(t, x)), degree)
}

pub fn error_l2<E>(spaces: &StaggeredSpaces, field: &DiscreteField, exact: E, degree: usize) -> f64
where
    E: Fn(Vec2) -> Sample + Sync,
{
    error_norm(spaces, field, exact, NormId::L2, degree).expect("L2 is defined on every space")
}

/// Norm of a discrete field.
pub fn field_norm(spaces: &StaggeredSpaces, field: &DiscreteField, norm: NormId, degree: usize) -> Result<f64, VerifyError> {
    let ev = FieldEvaluator::new(spaces, field);
    norm_eval(spaces, field.kind, norm, |t, x| ev.eval(t, x), degree)
}

/// `||J_h u - u_h||_0`.
pub fn superconvergence_error(u_h: &DiscreteField, case: &ManufacturedCase, spaces: &StaggeredSpaces, degree: usize) -> f64 {
    let jh = project_jh(case, spaces, degree);
    let diff = DiscreteField {
        kind: SpaceKind::U,
        coeffs: jh.coeffs.iter().zip(&u_h.coeffs).map(|(a, b)| a - b).collect(),
    };
    field_norm(spaces, &diff, NormId::L2, degree).expect("L2 is defined on every space")
}

/// Errors of a discrete solution against a manufactured case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionErrors {
    pub u: f64,
    pub l: f64,
    pub p: f64,
    pub superconvergence: f64,
    /// `sqrt(eps) ||u - u_h||_{Z2}`.
    pub z2_scaled: f64,
    /// `sqrt(eps) ||u - u_h||_{Z1}`.
    pub z1_scaled: f64,
}

pub fn solution_errors(
    spaces: &StaggeredSpaces,
    sol: &DiscreteSolution,
    case: &ManufacturedCase,
    degree: usize,
) -> Result<SolutionErrors, VerifyError> {
    let se = case.epsilon.sqrt();
    let us = |x| case.u_sample(x);
    Ok(SolutionErrors {
        u: error_l2(spaces, &sol.u, us, degree),
        l: error_l2(spaces, &sol.l, |x| case.l_sample(x), degree),
        p: error_l2(spaces, &sol.p, |x| case.p_sample(x), degree),
        superconvergence: superconvergence_error(&sol.u, case, spaces, degree),
        z2_scaled: se * error_norm(spaces, &sol.u, us, NormId::Z2, degree)?,
        z1_scaled: se * error_norm(spaces, &sol.u, us, NormId::Z1, degree)?,
    })
}
