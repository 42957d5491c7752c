//! Sparse assembly of the bilinear forms and load vectors.
//!
//! Matrices are indexed `(test, trial)`:
//!
//! * `M[j', j] = (G_j, G_j')` on `W`;
//! * `B[i, j] = B_h(G_j, v_i)`, `U x W`;
//! * `A[i', i] = (alpha v_i, v_i')` on `U`;
//! * `D[m, i] = b_h(v_i, q_m)`, `P x U`.
//!
//! Edge terms are evaluated with traces from the triangle being visited.
//! This is exact because every edge term only involves trace components
//! that are continuous across that edge in the relevant space.

mod sparse;

pub use sparse::SparseMatrix;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{StaggeredMesh, Vec2};
use crate::polybasis::MAX_QUADRATURE_DEGREE;
use crate::spaces::{SpaceKind, StaggeredSpaces};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("invalid coefficient: {0}")]
    Coefficient(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemCoefficients {
    pub epsilon: f64,
    pub alpha: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl ProblemCoefficients {
    pub fn new(epsilon: f64, alpha: f64) -> Result<Self, FormError> {
        let c = Self { epsilon, alpha, alpha_min: alpha, alpha_max: alpha };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), FormError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(FormError::Coefficient(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.alpha_min > 0.0 && self.alpha_min <= self.alpha && self.alpha <= self.alpha_max && self.alpha_max.is_finite()) {
            return Err(FormError::Coefficient(format!(
                "alpha must satisfy 0 < {} <= {} <= {}",
                self.alpha_min, self.alpha, self.alpha_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AssemblyMode {
    #[default]
    Serial,
    Parallel,
}

/// Quadrature degree for integrals of smooth (non-polynomial) data.
pub fn default_data_degree(k: usize) -> usize {
    (2 * k + 6).max(12).min(MAX_QUADRATURE_DEGREE)
}

fn sign(mesh: &StaggeredMesh, edge: usize, tri: usize) -> f64 {
    mesh.edges[edge]
        .adjacency
        .iter()
        .find(|a| a.triangle == tri)
        .map(|a| a.sign)
        .expect("triangle adjacent to its own edge")
}

/// Computes one local matrix per triangle and scatters it. The parallel
/// mode only parallelises the local computations; the scatter order is the
/// same, so both modes give identical matrices.
fn assemble_local<F>(spaces: &StaggeredSpaces, rows: SpaceKind, cols: SpaceKind, mode: AssemblyMode, local: F) -> SparseMatrix
where
    F: Fn(usize) -> DMatrix<f64> + Sync,
{
    let nt = spaces.mesh.n_triangles();
    let blocks: Vec<DMatrix<f64>> = match mode {
        AssemblyMode::Serial => (0..nt).map(&local).collect(),
        AssemblyMode::Parallel => (0..nt).into_par_iter().map(&local).collect(),
    };
    let (rmap, cmap) = (spaces.dofmap(rows), spaces.dofmap(cols));
    let mut triplets = Vec::with_capacity(blocks.iter().map(|b| b.len()).sum());
    for (t, block) in blocks.iter().enumerate() {
        for (a, ra) in rmap.local[t].iter().enumerate() {
            for (b, cb) in cmap.local[t].iter().enumerate() {
                let v = block[(a, b)];
                if v != 0.0 {
                    triplets.push((ra.global, cb.global, v));
                }
            }
        }
    }
    SparseMatrix::from_triplets(rmap.n_dofs, cmap.n_dofs, &triplets)
}

fn bilinear_degree(spaces: &StaggeredSpaces) -> usize {
    spaces.bases.exact_degree()
}

fn volume_points(spaces: &StaggeredSpaces, tri: usize) -> (Vec<Vec2>, Vec<f64>) {
    spaces.triangle_rule(tri, bilinear_degree(spaces)).expect("supported degree")
}

fn edge_points(spaces: &StaggeredSpaces, edge: usize) -> (Vec<Vec2>, Vec<f64>) {
    spaces.edge_rule(edge, bilinear_degree(spaces)).expect("supported degree")
}

fn mass(spaces: &StaggeredSpaces, kind: SpaceKind, scale: f64, mode: AssemblyMode) -> SparseMatrix {
    let nc = kind.components();
    let mut m = assemble_local(spaces, kind, kind, mode, |t| {
        let (pts, wts) = volume_points(spaces, t);
        let tab = spaces.tabulate(kind, t, &pts);
        let n = tab.n_local;
        let mut loc = DMatrix::zeros(n, n);
        for (q, w) in wts.iter().enumerate() {
            for a in 0..n {
                for b in 0..n {
                    let s: f64 = (0..nc).map(|c| tab.value(q, a, c) * tab.value(q, b, c)).sum();
                    loc[(a, b)] += scale * w * s;
                }
            }
        }
        loc
    });
    m.symmetric = true;
    m
}

/// `(L, G)` on `W`.
pub fn assemble_mass_w(spaces: &StaggeredSpaces, mode: AssemblyMode) -> SparseMatrix {
    mass(spaces, SpaceKind::W, 1.0, mode)
}

/// `(alpha u, v)` on `U` for constant `alpha`.
pub fn assemble_mass_u(spaces: &StaggeredSpaces, alpha: f64, mode: AssemblyMode) -> SparseMatrix {
    mass(spaces, SpaceKind::U, alpha, mode)
}

/// `(p, q)` on `P`.
pub fn assemble_mass_p(spaces: &StaggeredSpaces, mode: AssemblyMode) -> SparseMatrix {
    mass(spaces, SpaceKind::P, 1.0, mode)
}

#[inline]
fn gn(tab: &crate::spaces::LocalTable, q: usize, b: usize, n: Vec2) -> [f64; 2] {
    [
        tab.value(q, b, 0) * n.x + tab.value(q, b, 1) * n.y,
        tab.value(q, b, 2) * n.x + tab.value(q, b, 3) * n.y,
    ]
}

#[inline]
fn vec2(tab: &crate::spaces::LocalTable, q: usize, a: usize) -> [f64; 2] {
    [tab.value(q, a, 0), tab.value(q, a, 1)]
}

#[inline]
fn dot(a: [f64; 2], b: Vec2) -> f64 {
    a[0] * b.x + a[1] * b.y
}

/// `B[i, j] = B_h(G_j, v_i)` with
/// `B_h(G, v) = (G, grad v) - sum_{F_u} int [v].(G n) - sum_{F_p} int [v.t] t.(G n)`.
/// Boundary primal edges are included with one-sided jumps.
pub fn assemble_b(spaces: &StaggeredSpaces, mode: AssemblyMode) -> SparseMatrix {
    let mesh = &spaces.mesh;
    assemble_local(spaces, SpaceKind::U, SpaceKind::W, mode, |t| {
        let nu = spaces.u.n_local(t);
        let nw = spaces.w.n_local(t);
        let mut loc = DMatrix::zeros(nu, nw);
        let (pts, wts) = volume_points(spaces, t);
        let tu = spaces.tabulate(SpaceKind::U, t, &pts);
        let tw = spaces.tabulate(SpaceKind::W, t, &pts);
        for (q, w) in wts.iter().enumerate() {
            for a in 0..nu {
                let gv = [tu.grad(q, a, 0), tu.grad(q, a, 1)];
                for b in 0..nw {
                    let mut s = 0.0;
                    for r in 0..2 {
                        for c in 0..2 {
                            s += tw.value(q, b, 2 * r + c) * gv[r][c];
                        }
                    }
                    loc[(a, b)] += w * s;
                }
            }
        }
        for (local, &e) in mesh.triangles[t].edges.iter().enumerate() {
            let edge = &mesh.edges[e];
            let delta = sign(mesh, e, t);
            let (pts, wts) = edge_points(spaces, e);
            let tu = spaces.tabulate(SpaceKind::U, t, &pts);
            let tw = spaces.tabulate(SpaceKind::W, t, &pts);
            for (q, w) in wts.iter().enumerate() {
                for a in 0..nu {
                    let v = vec2(&tu, q, a);
                    for b in 0..nw {
                        let g = gn(&tw, q, b, edge.normal);
                        let s = if local == 0 {
                            v[0] * g[0] + v[1] * g[1]
                        } else {
                            dot(v, edge.tangent) * dot(g, edge.tangent)
                        };
                        loc[(a, b)] -= delta * w * s;
                    }
                }
            }
        }
        loc
    })
}

/// Independent assembly of the adjoint form, stored so that it should
/// equal `B`: entry `[i, j] = B*_h(v_i, G_j)` with
/// `B*_h(v, G) = -(v, div G) + sum_{F_p} int (v.n) n.[G n]`.
pub fn assemble_b_adjoint(spaces: &StaggeredSpaces, mode: AssemblyMode) -> SparseMatrix {
    let mesh = &spaces.mesh;
    assemble_local(spaces, SpaceKind::U, SpaceKind::W, mode, |t| {
        let nu = spaces.u.n_local(t);
        let nw = spaces.w.n_local(t);
        let mut loc = DMatrix::zeros(nu, nw);
        let (pts, wts) = volume_points(spaces, t);
        let tu = spaces.tabulate(SpaceKind::U, t, &pts);
        let tw = spaces.tabulate(SpaceKind::W, t, &pts);
        for (q, w) in wts.iter().enumerate() {
            for b in 0..nw {
                let div = [
                    tw.grad(q, b, 0)[0] + tw.grad(q, b, 1)[1],
                    tw.grad(q, b, 2)[0] + tw.grad(q, b, 3)[1],
                ];
                for a in 0..nu {
                    loc[(a, b)] -= w * (tu.value(q, a, 0) * div[0] + tu.value(q, a, 1) * div[1]);
                }
            }
        }
        for &e in &mesh.triangles[t].edges[1..] {
            let edge = &mesh.edges[e];
            let delta = sign(mesh, e, t);
            let (pts, wts) = edge_points(spaces, e);
            let tu = spaces.tabulate(SpaceKind::U, t, &pts);
            let tw = spaces.tabulate(SpaceKind::W, t, &pts);
            for (q, w) in wts.iter().enumerate() {
                for a in 0..nu {
                    let vn = dot(vec2(&tu, q, a), edge.normal);
                    for b in 0..nw {
                        loc[(a, b)] += delta * w * vn * dot(gn(&tw, q, b, edge.normal), edge.normal);
                    }
                }
            }
        }
        loc
    })
}

/// `D[m, i] = b_h(v_i, q_m)` with `b_h(v, q) = (v, grad q) - sum_{F_p} int (v.n)[q]`.
pub fn assemble_d(spaces: &StaggeredSpaces, mode: AssemblyMode) -> SparseMatrix {
    let mesh = &spaces.mesh;
    assemble_local(spaces, SpaceKind::P, SpaceKind::U, mode, |t| {
        let np = spaces.p.n_local(t);
        let nu = spaces.u.n_local(t);
        let mut loc = DMatrix::zeros(np, nu);
        let (pts, wts) = volume_points(spaces, t);
        let tp = spaces.tabulate(SpaceKind::P, t, &pts);
        let tu = spaces.tabulate(SpaceKind::U, t, &pts);
        for (q, w) in wts.iter().enumerate() {
            for m in 0..np {
                let g = tp.grad(q, m, 0);
                for i in 0..nu {
                    loc[(m, i)] += w * (tu.value(q, i, 0) * g[0] + tu.value(q, i, 1) * g[1]);
                }
            }
        }
        for &e in &mesh.triangles[t].edges[1..] {
            let edge = &mesh.edges[e];
            let delta = sign(mesh, e, t);
            let (pts, wts) = edge_points(spaces, e);
            let tp = spaces.tabulate(SpaceKind::P, t, &pts);
            let tu = spaces.tabulate(SpaceKind::U, t, &pts);
            for (q, w) in wts.iter().enumerate() {
                for m in 0..np {
                    let qv = tp.value(q, m, 0);
                    for i in 0..nu {
                        loc[(m, i)] -= delta * w * qv * dot(vec2(&tu, q, i), edge.normal);
                    }
                }
            }
        }
        loc
    })
}

/// Independent assembly of the adjoint, stored so that it should equal
/// `D^T`: entry `[i, m] = b*_h(q_m, v_i)` with
/// `b*_h(q, v) = -(q, div v) + sum_{F_u} int q [v.n]`.
pub fn assemble_d_adjoint(spaces: &StaggeredSpaces, mode: AssemblyMode) -> SparseMatrix {
    let mesh = &spaces.mesh;
    assemble_local(spaces, SpaceKind::U, SpaceKind::P, mode, |t| {
        let nu = spaces.u.n_local(t);
        let np = spaces.p.n_local(t);
        let mut loc = DMatrix::zeros(nu, np);
        let (pts, wts) = volume_points(spaces, t);
        let tp = spaces.tabulate(SpaceKind::P, t, &pts);
        let tu = spaces.tabulate(SpaceKind::U, t, &pts);
        for (q, w) in wts.iter().enumerate() {
            for i in 0..nu {
                let div = tu.grad(q, i, 0)[0] + tu.grad(q, i, 1)[1];
                for m in 0..np {
                    loc[(i, m)] -= w * tp.value(q, m, 0) * div;
                }
            }
        }
        let e = mesh.triangles[t].edges[0];
        let edge = &mesh.edges[e];
        let delta = sign(mesh, e, t);
        let (pts, wts) = edge_points(spaces, e);
        let tp = spaces.tabulate(SpaceKind::P, t, &pts);
        let tu = spaces.tabulate(SpaceKind::U, t, &pts);
        for (q, w) in wts.iter().enumerate() {
            for i in 0..nu {
                let vn = dot(vec2(&tu, q, i), edge.normal);
                for m in 0..np {
                    loc[(i, m)] += delta * w * tp.value(q, m, 0) * vn;
                }
            }
        }
        loc
    })
}

/// `c_m = int q_m`.
pub fn assemble_mean(spaces: &StaggeredSpaces) -> Vec<f64> {
    let mut c = vec![0.0; spaces.p.n_dofs];
    for t in 0..spaces.mesh.n_triangles() {
        let (pts, wts) = volume_points(spaces, t);
        let tab = spaces.tabulate(SpaceKind::P, t, &pts);
        for (m, d) in spaces.p.local[t].iter().enumerate() {
            c[d.global] += wts.iter().enumerate().map(|(q, w)| w * tab.value(q, m, 0)).sum::<f64>();
        }
    }
    c
}

/// Load vector `int f . phi_i` for a field given triangle-wise as
/// `f(tri, x)`, integrated with a rule of the given degree.
pub fn assemble_load<F>(spaces: &StaggeredSpaces, kind: SpaceKind, f: F, degree: usize) -> Vec<f64>
where
    F: Fn(usize, Vec2) -> [f64; 4] + Sync,
{
    let degree = degree.clamp(bilinear_degree(spaces), MAX_QUADRATURE_DEGREE);
    let map = spaces.dofmap(kind);
    let nc = kind.components();
    let locals: Vec<Vec<f64>> = (0..spaces.mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let (pts, wts) = spaces.triangle_rule(t, degree).expect("supported degree");
            let tab = spaces.tabulate(kind, t, &pts);
            let mut loc = vec![0.0; tab.n_local];
            for (q, (x, w)) in pts.iter().zip(&wts).enumerate() {
                let fx = f(t, *x);
                for (a, l) in loc.iter_mut().enumerate() {
                    *l += w * (0..nc).map(|c| fx[c] * tab.value(q, a, c)).sum::<f64>();
                }
            }
            loc
        })
        .collect();
    let mut out = vec![0.0; map.n_dofs];
    for (t, loc) in locals.iter().enumerate() {
        for (d, v) in map.local[t].iter().zip(loc) {
            out[d.global] += v;
        }
    }
    out
}

/// `F_i = int f . v_i` and `G_m = int g q_m`.
pub fn assemble_rhs<F, G>(spaces: &StaggeredSpaces, f: F, g: G, degree: usize) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(Vec2) -> [f64; 2] + Sync,
    G: Fn(Vec2) -> f64 + Sync,
{
    let fv = assemble_load(
        spaces,
        SpaceKind::U,
        |_, x| {
            let v = f(x);
            [v[0], v[1], 0.0, 0.0]
        },
        degree,
    );
    let gv = assemble_load(spaces, SpaceKind::P, |_, x| [g(x), 0.0, 0.0, 0.0], degree);
    (fv, gv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_distorted_grid, build_hanging_grid, build_square_grid, build_staggered};
    use crate::spaces::DiscreteField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spaces(mesh: StaggeredMesh, k: usize) -> StaggeredSpaces {
        StaggeredSpaces::new(mesh, k).unwrap()
    }

    fn meshes() -> Vec<StaggeredMesh> {
        vec![
            build_staggered(&build_square_grid(2).unwrap()),
            build_staggered(&build_distorted_grid(3, 0.3, 9).unwrap()),
            build_staggered(&build_hanging_grid(2).unwrap()),
        ]
    }

    #[test]
    fn adjoint_pairs_are_transposes() {
        for mesh in meshes() {
            for k in 0..=3 {
                let s = spaces(mesh.clone(), k);
                let b = assemble_b(&s, AssemblyMode::Serial);
                let bs = assemble_b_adjoint(&s, AssemblyMode::Serial);
                assert!(b.max_abs_diff(&bs) <= 1e-12, "B k={k}: {}", b.max_abs_diff(&bs));
                let d = assemble_d(&s, AssemblyMode::Serial);
                let ds = assemble_d_adjoint(&s, AssemblyMode::Serial);
                assert!(d.transpose().max_abs_diff(&ds) <= 1e-12, "D k={k}");
            }
        }
    }

    #[test]
    fn parallel_assembly_is_bit_identical() {
        let s = spaces(build_staggered(&build_distorted_grid(4, 0.25, 3).unwrap()), 2);
        assert_eq!(assemble_b(&s, AssemblyMode::Serial), assemble_b(&s, AssemblyMode::Parallel));
        assert_eq!(assemble_mass_w(&s, AssemblyMode::Serial), assemble_mass_w(&s, AssemblyMode::Parallel));
    }

    fn direct_l2_sq(s: &StaggeredSpaces, f: &DiscreteField) -> f64 {
        let mut total = 0.0;
        for t in 0..s.mesh.n_triangles() {
            let (pts, wts) = s.triangle_rule(t, 2 * s.k() + 2).unwrap();
            let modal = s.local_modal(f, t);
            for (v, w) in s.eval_modal(f.kind, t, &modal, &pts).iter().zip(&wts) {
                total += w * v.value.iter().map(|c| c * c).sum::<f64>();
            }
        }
        total
    }

    #[test]
    fn mass_matrices_are_spd_and_match_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = spaces(build_staggered(&build_distorted_grid(3, 0.2, 2).unwrap()), 2);
        let m = assemble_mass_w(&s, AssemblyMode::Serial);
        let a = assemble_mass_u(&s, 1.0, AssemblyMode::Serial);
        assert!(m.symmetric && a.symmetric);
        assert!(m.max_abs_diff(&m.transpose()) == 0.0);
        for _ in 0..100 {
            let x: Vec<f64> = (0..m.nrows).map(|_| rng.random::<f64>() - 0.5).collect();
            assert!(m.bilinear(&x, &x) > 0.0);
            let y: Vec<f64> = (0..a.nrows).map(|_| rng.random::<f64>() - 0.5).collect();
            assert!(a.bilinear(&y, &y) > 0.0);
        }
        for (kind, mat) in [(SpaceKind::W, &m), (SpaceKind::U, &a)] {
            let x: Vec<f64> = (0..mat.nrows).map(|_| rng.random::<f64>() - 0.5).collect();
            let direct = direct_l2_sq(&s, &DiscreteField { kind, coeffs: x.clone() });
            assert!((mat.bilinear(&x, &x) - direct).abs() <= 1e-12 * direct.max(1.0));
        }
        let a2 = assemble_mass_u(&s, 2.0, AssemblyMode::Serial);
        assert_eq!(a2.max_abs_diff(&a.scaled(2.0)), 0.0);
    }

    #[test]
    fn constants_are_in_the_kernel_of_d() {
        let s = spaces(build_staggered(&build_distorted_grid(3, 0.2, 4).unwrap()), 1);
        let d = assemble_d(&s, AssemblyMode::Serial);
        let v = s.interpolate(SpaceKind::U, |_| [0.3, -1.2, 0.0, 0.0], 4).unwrap();
        let q = s.interpolate(SpaceKind::P, |_| [1.0, 0.0, 0.0, 0.0], 4).unwrap();
        assert!(d.bilinear(&q.coeffs, &v.coeffs).abs() < 1e-13);
    }

    #[test]
    fn load_of_a_basis_function_is_a_mass_column() {
        let s = spaces(build_staggered(&build_square_grid(2).unwrap()), 2);
        let a = assemble_mass_u(&s, 1.0, AssemblyMode::Serial);
        let j = 17;
        let mut e = DiscreteField::zeros(&s, SpaceKind::U);
        e.coeffs[j] = 1.0;
        let f = assemble_load(
            &s,
            SpaceKind::U,
            |t, x| {
                let v = s.eval_field(&e, t, x).value;
                [v[0], v[1], 0.0, 0.0]
            },
            12,
        );
        let col: Vec<f64> = (0..a.nrows).map(|i| a.get(i, j)).collect();
        for (x, y) in f.iter().zip(&col) {
            assert!((x - y).abs() < 1e-13);
        }
        let (zf, zg) = assemble_rhs(&s, |_| [0.0, 0.0], |_| 0.0, 12);
        assert!(zf.iter().chain(&zg).all(|v| *v == 0.0));
    }

    #[test]
    fn load_is_linear() {
        let s = spaces(build_staggered(&build_square_grid(2).unwrap()), 1);
        let f1 = |x: Vec2| [x.x.sin(), x.y * x.y];
        let f2 = |x: Vec2| [x.y.exp(), -x.x];
        let g = |_: Vec2| 0.0;
        let (a, _) = assemble_rhs(&s, f1, g, 12);
        let (b, _) = assemble_rhs(&s, f2, g, 12);
        let (c, _) = assemble_rhs(&s, |x| [f1(x)[0] + f2(x)[0], f1(x)[1] + f2(x)[1]], g, 12);
        for i in 0..a.len() {
            assert!((a[i] + b[i] - c[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_vector_sums_to_area() {
        let s = spaces(build_staggered(&build_distorted_grid(3, 0.2, 8).unwrap()), 2);
        let one = s.interpolate(SpaceKind::P, |_| [1.0, 0.0, 0.0, 0.0], 4).unwrap();
        let c = assemble_mean(&s);
        let area: f64 = c.iter().zip(&one.coeffs).map(|(a, b)| a * b).sum();
        assert!((area - 1.0).abs() < 1e-13);
    }

    #[test]
    fn coefficients_are_validated() {
        assert!(ProblemCoefficients::new(1.0, 1.0).is_ok());
        assert!(ProblemCoefficients::new(0.0, 1.0).is_err());
        assert!(ProblemCoefficients::new(1.0, -1.0).is_err());
        assert!(ProblemCoefficients::new(f64::NAN, 1.0).is_err());
    }
}
