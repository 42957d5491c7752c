use nalgebra::{DMatrix, SVD};

use super::dofmap::{selector_weights, DofMap, Functional};
use super::{ReferenceBases, SpaceError, SpaceKind, CONDITION_LIMIT};
use crate::mesh::{StaggeredMesh, Vec2};
use crate::polybasis::{affine_map, edge_quadrature, tri_quadrature, AffineMap, TriBasis};

/// Affine map of a triangle plus the scaling that makes the modal basis
/// orthonormal in the physical `L2` product.
#[derive(Debug, Clone)]
pub struct TriGeometry {
    pub map: AffineMap,
    pub scale: f64,
}

impl TriGeometry {
    pub fn new(mesh: &StaggeredMesh, tri: usize) -> Result<Self, SpaceError> {
        let [a, b, c] = mesh.triangle_points(tri);
        let map = affine_map([[a.x, a.y], [b.x, b.y], [c.x, c.y]])?;
        let scale = 1.0 / map.det.sqrt();
        Ok(Self { map, scale })
    }

    pub fn to_physical(&self, xi: [f64; 2]) -> Vec2 {
        let x = self.map.map(xi);
        Vec2::new(x[0], x[1])
    }

    pub fn to_reference(&self, x: Vec2) -> [f64; 2] {
        self.map.inverse_map([x.x, x.y])
    }

    pub fn modal(&self, basis: &TriBasis, x: Vec2, values: &mut [f64]) {
        basis.eval(self.to_reference(x), values);
        values.iter_mut().for_each(|v| *v *= self.scale);
    }

    pub fn modal_with_grad(&self, basis: &TriBasis, x: Vec2, values: &mut [f64], grads: &mut [[f64; 2]]) {
        basis.eval_with_grad(self.to_reference(x), values, grads);
        for (v, g) in values.iter_mut().zip(grads.iter_mut()) {
            *v *= self.scale;
            let pg = self.map.push_gradient(*g);
            *g = [pg[0] * self.scale, pg[1] * self.scale];
        }
    }
}

/// Quadrature points, weights (including the test polynomial) and
/// component weights realising a functional on a triangle. Moments are
/// divided by the edge length or triangle area so that the dual basis
/// functions stay of unit size under refinement.
pub(crate) struct FunctionalRule {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
    pub components: [f64; 4],
}

pub(crate) fn functional_rule(
    mesh: &StaggeredMesh,
    bases: &ReferenceBases,
    geom: &TriGeometry,
    kind: SpaceKind,
    f: &Functional,
    degree: usize,
) -> FunctionalRule {
    match *f {
        Functional::Edge { edge, mode, selector } => {
            let rule = edge_quadrature::<f64>(degree).expect("quadrature degree checked by caller");
            let e = &mesh.edges[edge];
            let mut ell = vec![0.0; bases.edge.dim()];
            let mut points = Vec::with_capacity(rule.len());
            let mut weights = Vec::with_capacity(rule.len());
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                bases.edge.eval(p[0], &mut ell);
                points.push(mesh.edge_point(edge, p[0]));
                weights.push(0.5 * w * ell[mode]);
            }
            FunctionalRule { points, weights, components: selector_weights(kind, selector, e.normal, e.tangent) }
        }
        Functional::Interior { mode, component } => {
            let lower = bases.lower.as_ref().expect("interior moments need k >= 1");
            let rule = tri_quadrature::<f64>(degree).expect("quadrature degree checked by caller");
            let mut vals = vec![0.0; lower.dim()];
            let mut points = Vec::with_capacity(rule.len());
            let mut weights = Vec::with_capacity(rule.len());
            for (xi, w) in rule.points.iter().zip(&rule.weights) {
                lower.eval(*xi, &mut vals);
                points.push(geom.to_physical(*xi));
                weights.push(2.0 * w * vals[mode]);
            }
            let mut components = [0.0; 4];
            components[component] = 1.0;
            FunctionalRule { points, weights, components }
        }
    }
}

/// `V[i, c*nb + j] = l_i(e_c psi_j)` for the modal basis `psi` of `P^k`.
pub(crate) fn vandermonde(
    mesh: &StaggeredMesh,
    bases: &ReferenceBases,
    geom: &TriGeometry,
    kind: SpaceKind,
    functionals: &[Functional],
) -> DMatrix<f64> {
    let nb = bases.tri.dim();
    let nc = kind.components();
    let mut v = DMatrix::zeros(functionals.len(), nc * nb);
    let mut psi = vec![0.0; nb];
    for (i, f) in functionals.iter().enumerate() {
        let rule = functional_rule(mesh, bases, geom, kind, f, bases.exact_degree());
        for (x, w) in rule.points.iter().zip(&rule.weights) {
            geom.modal(&bases.tri, *x, &mut psi);
            for c in 0..nc {
                let wc = w * rule.components[c];
                if wc == 0.0 {
                    continue;
                }
                for j in 0..nb {
                    v[(i, c * nb + j)] += wc * psi[j];
                }
            }
        }
    }
    v
}

/// Modal coefficients of the local nodal basis: column `a` holds the
/// coefficients of the basis function dual to local functional `a`.
#[derive(Debug, Clone)]
pub struct LocalDualBasis {
    pub coeffs: DMatrix<f64>,
    pub condition: f64,
    /// `max |V C - I|`.
    pub residual: f64,
}

pub fn local_dual_basis(
    mesh: &StaggeredMesh,
    bases: &ReferenceBases,
    geom: &TriGeometry,
    map: &DofMap,
    tri: usize,
) -> Result<LocalDualBasis, SpaceError> {
    let functionals: Vec<Functional> = map.local[tri].iter().map(|d| d.functional).collect();
    let v = vandermonde(mesh, bases, geom, map.kind, &functionals);
    let sv = SVD::new(v.clone(), false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    if !(smin > 0.0) {
        return Err(SpaceError::Singular { kind: map.kind, triangle: tri });
    }
    let condition = smax / smin;
    if condition > CONDITION_LIMIT {
        return Err(SpaceError::IllConditioned { kind: map.kind, triangle: tri, condition });
    }
    let coeffs = v.clone().lu().try_inverse().ok_or(SpaceError::Singular { kind: map.kind, triangle: tri })?;
    let n = v.nrows();
    let residual = (&v * &coeffs - DMatrix::<f64>::identity(n, n)).amax();
    Ok(LocalDualBasis { coeffs, condition, residual })
}

/// Values and gradients of all local basis functions at a set of points.
/// Entry `(q, a, c)` is component `c` of basis function `a` at point `q`.
#[derive(Debug, Clone)]
pub struct LocalTable {
    pub n_local: usize,
    pub n_comp: usize,
    pub n_points: usize,
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

impl LocalTable {
    pub(crate) fn build(
        basis: &TriBasis,
        geom: &TriGeometry,
        dual: &LocalDualBasis,
        kind: SpaceKind,
        points: &[Vec2],
    ) -> Self {
        let nb = basis.dim();
        let nc = kind.components();
        let nl = dual.coeffs.ncols();
        let mut values = vec![0.0; points.len() * nl * nc];
        let mut grads = vec![[0.0; 2]; points.len() * nl * nc];
        let mut psi = vec![0.0; nb];
        let mut dpsi = vec![[0.0; 2]; nb];
        for (q, x) in points.iter().enumerate() {
            geom.modal_with_grad(basis, *x, &mut psi, &mut dpsi);
            for a in 0..nl {
                let col = dual.coeffs.column(a);
                for c in 0..nc {
                    let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
                    for j in 0..nb {
                        let cj = col[c * nb + j];
                        v += cj * psi[j];
                        gx += cj * dpsi[j][0];
                        gy += cj * dpsi[j][1];
                    }
                    let idx = (q * nl + a) * nc + c;
                    values[idx] = v;
                    grads[idx] = [gx, gy];
                }
            }
        }
        Self { n_local: nl, n_comp: nc, n_points: points.len(), values, grads }
    }

    #[inline]
    pub fn value(&self, q: usize, a: usize, c: usize) -> f64 {
        self.values[(q * self.n_local + a) * self.n_comp + c]
    }

    #[inline]
    pub fn grad(&self, q: usize, a: usize, c: usize) -> [f64; 2] {
        self.grads[(q * self.n_local + a) * self.n_comp + c]
    }
}
