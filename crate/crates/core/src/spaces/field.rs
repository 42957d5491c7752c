use rayon::prelude::*;

use super::local::functional_rule;
use super::{SpaceError, SpaceKind, StaggeredSpaces};
use crate::mesh::Vec2;
use crate::polybasis::MAX_QUADRATURE_DEGREE;

/// Coefficient vector of a function in one of the discrete spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    pub kind: SpaceKind,
    pub coeffs: Vec<f64>,
}

/// Point value of a field: components (tensors row-major) and their
/// gradients. Unused components are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sample {
    pub value: [f64; 4],
    pub grad: [[f64; 2]; 4],
}

impl DiscreteField {
    pub fn zeros(spaces: &StaggeredSpaces, kind: SpaceKind) -> Self {
        Self { kind, coeffs: vec![0.0; spaces.dofmap(kind).n_dofs] }
    }
}

impl StaggeredSpaces {
    /// Modal coefficients (`n_comp * dim P^k`) of a field restricted to a triangle.
    pub fn local_modal(&self, field: &DiscreteField, tri: usize) -> Vec<f64> {
        let map = self.dofmap(field.kind);
        let dual = &self.duals(field.kind)[tri];
        let mut out = vec![0.0; dual.coeffs.nrows()];
        for (a, d) in map.local[tri].iter().enumerate() {
            let c = field.coeffs[d.global];
            if c != 0.0 {
                for (o, m) in out.iter_mut().zip(dual.coeffs.column(a).iter()) {
                    *o += c * m;
                }
            }
        }
        out
    }

    /// Evaluates the restriction of `field` to triangle `tri` at `x`
    /// (which may lie outside the triangle; the polynomial is extended).
    pub fn eval_field(&self, field: &DiscreteField, tri: usize, x: Vec2) -> Sample {
        self.eval_modal(field.kind, tri, &self.local_modal(field, tri), &[x])[0]
    }

    /// Evaluates a local modal expansion at several points.
    pub fn eval_modal(&self, kind: SpaceKind, tri: usize, modal: &[f64], points: &[Vec2]) -> Vec<Sample> {
        let basis = &self.bases.tri;
        let nb = basis.dim();
        let mut psi = vec![0.0; nb];
        let mut dpsi = vec![[0.0; 2]; nb];
        points
            .iter()
            .map(|x| {
                self.geometry[tri].modal_with_grad(basis, *x, &mut psi, &mut dpsi);
                let mut s = Sample::default();
                for c in 0..kind.components() {
                    for j in 0..nb {
                        let m = modal[c * nb + j];
                        s.value[c] += m * psi[j];
                        s.grad[c][0] += m * dpsi[j][0];
                        s.grad[c][1] += m * dpsi[j][1];
                    }
                }
                s
            })
            .collect()
    }

    /// Canonical interpolant: every DOF functional applied to `f`,
    /// integrated with a rule of the given degree.
    pub fn interpolate<F>(&self, kind: SpaceKind, f: F, degree: usize) -> Result<DiscreteField, SpaceError>
    where
        F: Fn(Vec2) -> [f64; 4] + Sync,
    {
        self.interpolate_piecewise(kind, |_, x| f(x), degree)
    }

    /// Interpolant of a triangle-wise defined function `f(tri, x)`. Edge
    /// functionals shared by two triangles are taken from the first one.
    pub fn interpolate_piecewise<F>(&self, kind: SpaceKind, f: F, degree: usize) -> Result<DiscreteField, SpaceError>
    where
        F: Fn(usize, Vec2) -> [f64; 4] + Sync,
    {
        let degree = degree.clamp(self.bases.exact_degree(), MAX_QUADRATURE_DEGREE);
        let map = self.dofmap(kind);
        let coeffs = map
            .owners()
            .par_iter()
            .map(|&(t, a)| {
                let functional = map.local[t][a].functional;
                let rule = functional_rule(&self.mesh, &self.bases, &self.geometry[t], kind, &functional, degree);
                let mut acc = 0.0;
                for (x, w) in rule.points.iter().zip(&rule.weights) {
                    let v = f(t, *x);
                    let dot: f64 = (0..kind.components()).map(|c| rule.components[c] * v[c]).sum();
                    acc += w * dot;
                }
                acc
            })
            .collect();
        Ok(DiscreteField { kind, coeffs })
    }
}

/// Evaluates a field at arbitrary points with per-triangle modal
/// coefficients computed once.
pub struct FieldEvaluator<'a> {
    spaces: &'a StaggeredSpaces,
    kind: SpaceKind,
    modal: Vec<Vec<f64>>,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(spaces: &'a StaggeredSpaces, field: &DiscreteField) -> Self {
        let modal = (0..spaces.mesh.n_triangles()).into_par_iter().map(|t| spaces.local_modal(field, t)).collect();
        Self { spaces, kind: field.kind, modal }
    }

    pub fn eval(&self, tri: usize, x: Vec2) -> Sample {
        self.spaces.eval_modal(self.kind, tri, &self.modal[tri], &[x])[0]
    }
}
