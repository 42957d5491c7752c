//! Staggered discontinuous Galerkin solver for the Brinkman problem
//! `-eps lap u + alpha u + grad p = f`, `div u = g` on polygonal meshes.

pub mod cases;
pub mod forms;
pub mod mesh;
pub mod polybasis;
pub mod run;
pub mod solver;
pub mod spaces;
pub mod verify;

/// Scalar type used by assembly and solvers.
pub type Real = f64;
pub type TriBasis = polybasis::TriBasis<Real>;
pub type EdgeBasis = polybasis::EdgeBasis<Real>;
pub type QuadratureRule = polybasis::QuadratureRule<Real>;
pub type AffineMap = polybasis::AffineMap<Real>;
