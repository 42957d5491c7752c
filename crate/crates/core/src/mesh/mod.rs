//! Primal polygonal meshes and their staggered triangular refinement.
//!
//! A [`PrimalMesh`] is the user-facing partition of the domain into
//! star-shaped polygons. [`build_staggered`] splits every polygon into
//! triangles by joining an interior point to its vertices; the polygon sides
//! become *primal* edges and the new spokes become *dual* edges.

mod generators;
mod io;
mod primal;
mod staggered;

pub use generators::{build_distorted_grid, build_hanging_grid, build_square_grid};
pub use io::{export_polygon_mesh, import_polygon_mesh};
pub use primal::{Polygon, PrimalMesh, DEFAULT_RHO};
pub use staggered::{build_staggered, eval_jump, Adjacent, Edge, EdgeKind, StaggeredMesh, Triangle};

use thiserror::Error;

pub type Vec2 = nalgebra::Vector2<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("polygon {polygon}: vertex index {index} out of range")]
    InvalidIndex { polygon: usize, index: usize },
    #[error("polygon {polygon}: fewer than three distinct vertices")]
    Degenerate { polygon: usize },
    #[error("polygon {polygon}: vertices are not counterclockwise")]
    Orientation { polygon: usize },
    #[error("polygon {polygon}: boundary is self-intersecting")]
    NotSimple { polygon: usize },
    #[error("polygon {polygon}: not star-shaped with respect to its interior point")]
    NotStarShaped { polygon: usize },
    #[error("polygon {polygon}: side to diameter ratio {ratio:.3e} below {rho}")]
    ShortEdge { polygon: usize, ratio: f64, rho: f64 },
    #[error("edge ({0}, {1}) is not shared conformingly between polygons")]
    NonConforming(usize, usize),
    #[error("no admissible perturbation for vertex {vertex} after {attempts} attempts")]
    Regularity { vertex: usize, attempts: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge {edge}: expected {expected} trace(s), got {got}")]
    JumpArity { edge: usize, expected: usize, got: usize },
}

pub(crate) fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
