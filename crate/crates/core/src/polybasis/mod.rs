//! Reference-element polynomial bases and quadrature rules.
//!
//! Everything in this module is generic over the floating point type so the
//! same tables can be produced in `f32` for quick inspection or `f64` for the
//! solver. The reference triangle is `(0,0), (1,0), (0,1)` and the reference
//! interval is `[-1, 1]`.

mod affine;
mod edge;
mod jacobi;
mod quadrature;
mod tri;

pub use affine::{affine_map, AffineMap};
pub use edge::{edge_basis, EdgeBasis};
pub use jacobi::{gauss_legendre, jacobi, legendre};
pub use quadrature::{edge_quadrature, tri_quadrature, QuadratureRule};
pub use tri::{tri_basis, TriBasis};

use num_traits::Float;
use thiserror::Error;

/// Highest polynomial order accepted by [`tri_basis`] and [`edge_basis`].
pub const MAX_ORDER: usize = 6;
/// Highest exactness degree accepted by the quadrature constructors.
pub const MAX_QUADRATURE_DEGREE: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("unsupported polynomial order {0} (supported: 0..={MAX_ORDER})")]
    UnsupportedOrder(usize),
    #[error("unsupported quadrature degree {0} (supported: 0..={MAX_QUADRATURE_DEGREE})")]
    UnsupportedDegree(usize),
    #[error("degenerate triangle (signed area {0:e})")]
    DegenerateTriangle(f64),
}

/// Dimension of `P^k` on a triangle.
pub const fn tri_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

#[inline]
pub(crate) fn lit<T: Float>(x: f64) -> T {
    T::from(x).expect("literal representable in target float type")
}
