//! The three staggered spaces for the velocity gradient (`W`), velocity
//! (`U`) and pressure (`P`).
//!
//! Each space is described by a [`DofMap`] listing, for every triangle, the
//! linear functionals (edge or interior moments) whose values are the
//! degrees of freedom. Functionals attached to an edge and listed by both
//! adjacent triangles share one global id, which is exactly what enforces
//! the staggered continuity of each space:
//!
//! | space | shared functionals                       | continuity                   |
//! |-------|------------------------------------------|------------------------------|
//! | `W`   | `(G n)` on primal, `t.(G n)` on dual edges | `G n` on interior primal edges, `t.(G n)` on dual edges |
//! | `U`   | `v.n` on dual edges                       | `v.n` on dual edges          |
//! | `P`   | `q` on primal edges                       | `q` on interior primal edges |
//!
//! Per-triangle [`LocalDualBasis`] coefficients turn the functionals into
//! basis functions expressed in the orthonormal modal basis.

mod dofmap;
mod field;
mod local;

pub use dofmap::{build_dofmap_p, build_dofmap_u, build_dofmap_w, DofMap, Functional, LocalDof, Selector};
pub use field::{DiscreteField, FieldEvaluator, Sample};
pub use local::{local_dual_basis, LocalDualBasis, LocalTable, TriGeometry};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{StaggeredMesh, Vec2};
use crate::polybasis::{edge_basis, tri_basis, BasisError, EdgeBasis, TriBasis};

/// Highest supported polynomial order of the discrete spaces.
pub const MAX_SPACE_ORDER: usize = 3;

/// Condition number above which a local dual basis is rejected.
pub const CONDITION_LIMIT: f64 = 1e8;
/// Condition number above which a warning is recorded.
pub const CONDITION_WARN: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    /// Velocity gradient, 2x2 tensors stored row-major.
    W,
    /// Velocity, 2-vectors.
    U,
    /// Pressure, scalars.
    P,
}

impl SpaceKind {
    pub const fn components(self) -> usize {
        match self {
            SpaceKind::W => 4,
            SpaceKind::U => 2,
            SpaceKind::P => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("polynomial order {0} not supported (0..={MAX_SPACE_ORDER})")]
    UnsupportedOrder(usize),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error("{kind:?} space: local system on triangle {triangle} is singular")]
    Singular { kind: SpaceKind, triangle: usize },
    #[error("{kind:?} space: triangle {triangle} has condition number {condition:.3e}")]
    IllConditioned { kind: SpaceKind, triangle: usize, condition: f64 },
    #[error("{kind:?} space: no unisolvent functional set on triangle {triangle}")]
    NotUnisolvent { kind: SpaceKind, triangle: usize },
}

/// Reference bases shared by all triangles for a given order.
#[derive(Debug, Clone)]
pub struct ReferenceBases {
    pub k: usize,
    pub tri: TriBasis,
    /// Basis of `P^{k-1}` used for interior moments; `None` when `k = 0`.
    pub lower: Option<TriBasis>,
    pub edge: EdgeBasis,
}

impl ReferenceBases {
    pub fn new(k: usize) -> Result<Self, SpaceError> {
        if k > MAX_SPACE_ORDER {
            return Err(SpaceError::UnsupportedOrder(k));
        }
        Ok(Self {
            k,
            tri: tri_basis(k)?,
            lower: if k > 0 { Some(tri_basis(k - 1)?) } else { None },
            edge: edge_basis(k)?,
        })
    }

    /// Degree for integrating products of two degree-`k` polynomials.
    pub fn exact_degree(&self) -> usize {
        2 * self.k + 2
    }
}

/// DOF maps and local dual bases of all three spaces on one mesh.
#[derive(Debug, Clone)]
pub struct StaggeredSpaces {
    pub mesh: StaggeredMesh,
    pub bases: ReferenceBases,
    pub geometry: Vec<TriGeometry>,
    pub w: DofMap,
    pub u: DofMap,
    pub p: DofMap,
    pub w_dual: Vec<LocalDualBasis>,
    pub u_dual: Vec<LocalDualBasis>,
    pub p_dual: Vec<LocalDualBasis>,
    /// Triangles whose local condition number exceeded [`CONDITION_WARN`].
    pub warnings: Vec<(SpaceKind, usize, f64)>,
}

impl StaggeredSpaces {
    pub fn new(mesh: StaggeredMesh, k: usize) -> Result<Self, SpaceError> {
        let bases = ReferenceBases::new(k)?;
        let geometry = (0..mesh.n_triangles())
            .map(|t| TriGeometry::new(&mesh, t))
            .collect::<Result<Vec<_>, _>>()?;
        let w = build_dofmap_w(&mesh, k)?;
        let u = build_dofmap_u(&mesh, k)?;
        let p = build_dofmap_p(&mesh, k)?;
        let duals = |map: &DofMap| -> Result<Vec<LocalDualBasis>, SpaceError> {
            (0..mesh.n_triangles())
                .into_par_iter()
                .map(|t| local_dual_basis(&mesh, &bases, &geometry[t], map, t))
                .collect()
        };
        let w_dual = duals(&w)?;
        let u_dual = duals(&u)?;
        let p_dual = duals(&p)?;
        let mut warnings = Vec::new();
        for (kind, list) in [(SpaceKind::W, &w_dual), (SpaceKind::U, &u_dual), (SpaceKind::P, &p_dual)] {
            for (t, d) in list.iter().enumerate() {
                if d.condition > CONDITION_WARN {
                    warnings.push((kind, t, d.condition));
                }
            }
        }
        Ok(Self { mesh, bases, geometry, w, u, p, w_dual, u_dual, p_dual, warnings })
    }

    pub fn k(&self) -> usize {
        self.bases.k
    }

    pub fn dofmap(&self, kind: SpaceKind) -> &DofMap {
        match kind {
            SpaceKind::W => &self.w,
            SpaceKind::U => &self.u,
            SpaceKind::P => &self.p,
        }
    }

    pub fn duals(&self, kind: SpaceKind) -> &[LocalDualBasis] {
        match kind {
            SpaceKind::W => &self.w_dual,
            SpaceKind::U => &self.u_dual,
            SpaceKind::P => &self.p_dual,
        }
    }

    /// Physical quadrature points and weights on a triangle.
    pub fn triangle_rule(&self, tri: usize, degree: usize) -> Result<(Vec<Vec2>, Vec<f64>), SpaceError> {
        let rule = crate::polybasis::tri_quadrature::<f64>(degree)?;
        let g = &self.geometry[tri];
        let pts = rule.points.iter().map(|&xi| g.to_physical(xi)).collect();
        let wts = rule.weights.iter().map(|w| w * g.map.det).collect();
        Ok((pts, wts))
    }

    /// Physical quadrature points and weights on an edge.
    pub fn edge_rule(&self, edge: usize, degree: usize) -> Result<(Vec<Vec2>, Vec<f64>), SpaceError> {
        let rule = crate::polybasis::edge_quadrature::<f64>(degree)?;
        let half = 0.5 * self.mesh.edges[edge].length;
        let pts = rule.points.iter().map(|p| self.mesh.edge_point(edge, p[0])).collect();
        let wts = rule.weights.iter().map(|w| w * half).collect();
        Ok((pts, wts))
    }

    /// Values (and gradients) of every local basis function of `kind` on
    /// triangle `tri` at the given physical points.
    pub fn tabulate(&self, kind: SpaceKind, tri: usize, points: &[Vec2]) -> LocalTable {
        LocalTable::build(&self.bases.tri, &self.geometry[tri], &self.duals(kind)[tri], kind, points)
    }

    /// Total number of unknowns of the saddle-point system, including the
    /// pressure mean multiplier.
    pub fn n_unknowns(&self) -> usize {
        self.w.n_dofs + self.u.n_dofs + self.p.n_dofs + 1
    }
}
