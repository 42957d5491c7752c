use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::local::{vandermonde, TriGeometry};
use super::{ReferenceBases, SpaceError, SpaceKind, MAX_SPACE_ORDER};
use crate::mesh::{EdgeKind, StaggeredMesh, Vec2};
use crate::polybasis::tri_dim;

/// Which scalar quantity of the trace an edge moment measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selector {
    /// Component `d` of `G n` (tensors) or of `v` (vectors).
    Component(usize),
    /// `t.(G n)` for tensors, `v.t` for vectors.
    Tangential,
    /// `v.n` for vectors.
    Normal,
    /// The scalar itself.
    Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Functional {
    /// `|e|^{-1} int_e sel(trace) l_mode ds` against the orthonormal Legendre basis in the edge parameter.
    Edge { edge: usize, mode: usize, selector: Selector },
    /// `|T|^{-1} int_T v_component p_mode dx` against the reference modal basis of `P^{k-1}`.
    Interior { mode: usize, component: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDof {
    pub global: usize,
    pub functional: Functional,
}

/// Local-to-global map of one space.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub kind: SpaceKind,
    pub order: usize,
    pub n_dofs: usize,
    /// Number of global DOFs attached to edges (numbered first).
    pub n_shared: usize,
    /// Per triangle, the local DOFs in the column order of its dual basis.
    pub local: Vec<Vec<LocalDof>>,
}

impl DofMap {
    pub fn n_local(&self, tri: usize) -> usize {
        self.local[tri].len()
    }

    pub fn globals(&self, tri: usize) -> impl Iterator<Item = usize> + '_ {
        self.local[tri].iter().map(|d| d.global)
    }

    /// First `(triangle, local index)` carrying each global DOF.
    pub fn owners(&self) -> Vec<(usize, usize)> {
        let mut owners = vec![(usize::MAX, 0); self.n_dofs];
        for (t, list) in self.local.iter().enumerate() {
            for (a, d) in list.iter().enumerate() {
                if owners[d.global].0 == usize::MAX {
                    owners[d.global] = (t, a);
                }
            }
        }
        owners
    }

    /// Expected dimension from the closed-form counting formula.
    pub fn expected_dim(kind: SpaceKind, mesh: &StaggeredMesh, k: usize) -> usize {
        let nt = mesh.n_triangles();
        let fu0 = mesh.count(EdgeKind::PrimalInterior);
        let fu = mesh.n_primal_edges();
        let fp = mesh.count(EdgeKind::Dual);
        match kind {
            SpaceKind::W => 2 * nt * (k + 1) * (k + 2) - 2 * fu0 * (k + 1) - fp * (k + 1),
            SpaceKind::U => nt * (k + 1) * (k + 1),
            SpaceKind::P => fu * (k + 1) + nt * k * (k + 1) / 2,
        }
    }
}

/// Component weights `omega` such that a functional reads
/// `sum_c omega_c v_c` at each quadrature point.
pub fn selector_weights(kind: SpaceKind, selector: Selector, n: Vec2, t: Vec2) -> [f64; 4] {
    let mut w = [0.0; 4];
    match (kind, selector) {
        (SpaceKind::W, Selector::Component(d)) => {
            w[2 * d] = n.x;
            w[2 * d + 1] = n.y;
        }
        (SpaceKind::W, Selector::Tangential) => {
            let (t, n) = ([t.x, t.y], [n.x, n.y]);
            for r in 0..2 {
                for s in 0..2 {
                    w[2 * r + s] = t[r] * n[s];
                }
            }
        }
        (SpaceKind::U, Selector::Component(d)) => w[d] = 1.0,
        (SpaceKind::U, Selector::Normal) => w[..2].copy_from_slice(&[n.x, n.y]),
        (SpaceKind::U, Selector::Tangential) => w[..2].copy_from_slice(&[t.x, t.y]),
        (SpaceKind::P, Selector::Scalar) => w[0] = 1.0,
        (kind, sel) => panic!("selector {sel:?} not defined for space {kind:?}"),
    }
    w
}

fn check_order(k: usize) -> Result<(), SpaceError> {
    if k > MAX_SPACE_ORDER {
        Err(SpaceError::UnsupportedOrder(k))
    } else {
        Ok(())
    }
}

fn edge_block(edge: usize, k: usize, selectors: &[Selector]) -> Vec<Functional> {
    selectors
        .iter()
        .flat_map(|&selector| (0..=k).map(move |mode| Functional::Edge { edge, mode, selector }))
        .collect()
}

fn interior_block(k: usize, components: usize) -> Vec<Functional> {
    let nl = if k == 0 { 0 } else { tri_dim(k - 1) };
    (0..components)
        .flat_map(|component| (0..nl).map(move |mode| Functional::Interior { mode, component }))
        .collect()
}

/// Shared selectors on an edge for each space.
fn shared_selectors(kind: SpaceKind, edge: EdgeKind) -> &'static [Selector] {
    match (kind, edge.is_primal()) {
        (SpaceKind::W, true) => &[Selector::Component(0), Selector::Component(1)],
        (SpaceKind::W, false) => &[Selector::Tangential],
        (SpaceKind::U, true) => &[],
        (SpaceKind::U, false) => &[Selector::Normal],
        (SpaceKind::P, true) => &[Selector::Scalar],
        (SpaceKind::P, false) => &[],
    }
}

/// Numbers shared edge functionals first (edge by edge), then the
/// per-triangle functionals, triangle by triangle.
fn number(kind: SpaceKind, mesh: &StaggeredMesh, k: usize, local: Vec<Vec<Functional>>) -> DofMap {
    let mut edge_start = vec![usize::MAX; mesh.edges.len()];
    let mut next = 0;
    for (e, edge) in mesh.edges.iter().enumerate() {
        let n = shared_selectors(kind, edge.kind).len() * (k + 1);
        if n > 0 {
            edge_start[e] = next;
            next += n;
        }
    }
    let n_shared = next;
    let local = local
        .into_iter()
        .map(|list| {
            list.into_iter()
                .map(|functional| {
                    let global = match functional {
                        Functional::Edge { edge, mode, selector } => {
                            let sels = shared_selectors(kind, mesh.edges[edge].kind);
                            match sels.iter().position(|&s| s == selector) {
                                Some(slot) => edge_start[edge] + slot * (k + 1) + mode,
                                None => {
                                    next += 1;
                                    next - 1
                                }
                            }
                        }
                        Functional::Interior { .. } => {
                            next += 1;
                            next - 1
                        }
                    };
                    LocalDof { global, functional }
                })
                .collect()
        })
        .collect();
    DofMap { kind, order: k, n_dofs: next, n_shared, local }
}

pub fn build_dofmap_w(mesh: &StaggeredMesh, k: usize) -> Result<DofMap, SpaceError> {
    check_order(k)?;
    let local = mesh
        .triangles
        .iter()
        .map(|tri| {
            let [e0, e1, e2] = tri.edges;
            let mut list = edge_block(e0, k, &[Selector::Component(0), Selector::Component(1)]);
            list.extend(edge_block(e1, k, &[Selector::Tangential]));
            list.extend(edge_block(e2, k, &[Selector::Tangential]));
            list.extend(interior_block(k, 4));
            list
        })
        .collect();
    Ok(number(SpaceKind::W, mesh, k, local))
}

pub fn build_dofmap_p(mesh: &StaggeredMesh, k: usize) -> Result<DofMap, SpaceError> {
    check_order(k)?;
    let local = mesh
        .triangles
        .iter()
        .map(|tri| {
            let mut list = edge_block(tri.edges[0], k, &[Selector::Scalar]);
            list.extend(interior_block(k, 1));
            list
        })
        .collect();
    Ok(number(SpaceKind::P, mesh, k, local))
}

/// Relative residual below which a candidate row is treated as dependent.
const RANK_TOL: f64 = 1e-8;

/// Velocity DOFs: shared normal moments on both dual edges plus interior
/// moments, completed if needed by per-side tangential moments on the dual
/// edges and full-vector moments on the primal edge. Candidates are taken
/// greedily in that order while they increase the rank.
pub fn build_dofmap_u(mesh: &StaggeredMesh, k: usize) -> Result<DofMap, SpaceError> {
    check_order(k)?;
    let bases = ReferenceBases::new(k)?;
    let target = 2 * tri_dim(k);
    let mut local = Vec::with_capacity(mesh.n_triangles());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let [e0, e1, e2] = tri.edges;
        let mut required = edge_block(e1, k, &[Selector::Normal]);
        required.extend(edge_block(e2, k, &[Selector::Normal]));
        required.extend(interior_block(k, 2));
        let mut fallback = edge_block(e1, k, &[Selector::Tangential]);
        fallback.extend(edge_block(e2, k, &[Selector::Tangential]));
        fallback.extend(edge_block(e0, k, &[Selector::Component(0), Selector::Component(1)]));

        let geom = TriGeometry::new(mesh, t)?;
        let candidates: Vec<Functional> = required.iter().chain(&fallback).copied().collect();
        let rows = vandermonde(mesh, &bases, &geom, SpaceKind::U, &candidates);
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(target);
        let mut chosen = Vec::with_capacity(target);
        for (i, f) in candidates.iter().enumerate() {
            if chosen.len() == target {
                break;
            }
            let mut r: DVector<f64> = rows.row(i).transpose();
            let norm = r.norm();
            if norm == 0.0 {
                continue;
            }
            r /= norm;
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&r);
                    r.axpy(-c, b, 1.0);
                }
            }
            let rn = r.norm();
            if rn > RANK_TOL {
                basis.push(r / rn);
                chosen.push(*f);
            } else if i < required.len() {
                return Err(SpaceError::NotUnisolvent { kind: SpaceKind::U, triangle: t });
            }
        }
        if chosen.len() != target {
            return Err(SpaceError::NotUnisolvent { kind: SpaceKind::U, triangle: t });
        }
        local.push(chosen);
    }
    Ok(number(SpaceKind::U, mesh, k, local))
}
