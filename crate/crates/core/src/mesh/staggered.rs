use std::collections::HashMap;
use std::ops::{Add, Mul};

use super::primal::diameter;
use super::{cross, MeshError, PrimalMesh, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    PrimalInterior,
    PrimalBoundary,
    Dual,
}

impl EdgeKind {
    pub fn is_primal(self) -> bool {
        !matches!(self, EdgeKind::Dual)
    }
}

/// A triangle sharing the edge, with `sign = n_tri . n_edge`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adjacent {
    pub triangle: usize,
    /// Local index of the edge in the triangle (the opposite vertex).
    pub local: usize,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Endpoints with the lower vertex id first; edge polynomials are
    /// parametrised from `endpoints[0]` (s = -1) to `endpoints[1]` (s = 1).
    pub endpoints: [usize; 2],
    pub kind: EdgeKind,
    pub normal: Vec2,
    pub tangent: Vec2,
    pub length: f64,
    pub adjacency: Vec<Adjacent>,
}

/// Submesh triangle `(nu, a, b)` where `(a, b)` is a counterclockwise side
/// of the parent polygon and `nu` its interior point.
///
/// Local edge `i` is opposite local vertex `i`, so edge 0 is always the
/// primal edge and edges 1, 2 are dual.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub polygon: usize,
    pub area: f64,
    pub diameter: f64,
    pub edges: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredMesh {
    /// Primal vertices followed by one interior point per polygon.
    pub points: Vec<Vec2>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    pub n_primal_vertices: usize,
    pub n_polygons: usize,
    /// Largest triangle diameter.
    pub h: f64,
}

pub fn build_staggered(mesh: &PrimalMesh) -> StaggeredMesh {
    let nv = mesh.vertices.len();
    let mut points = mesh.vertices.clone();
    points.extend(mesh.polygons.iter().map(|p| p.interior));

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut triangles = Vec::new();

    for (pid, poly) in mesh.polygons.iter().enumerate() {
        let nu = nv + pid;
        let m = poly.vertices.len();
        for i in 0..m {
            let (a, b) = (poly.vertices[i], poly.vertices[(i + 1) % m]);
            let tid = triangles.len();
            let verts = [nu, a, b];
            let pts = verts.map(|v| points[v]);
            let area = 0.5 * cross(pts[1] - pts[0], pts[2] - pts[0]);
            let mut tri_edges = [0; 3];
            for (local, slot) in tri_edges.iter_mut().enumerate() {
                let (p, q) = (verts[(local + 1) % 3], verts[(local + 2) % 3]);
                let key = (p.min(q), p.max(q));
                let eid = *edge_index.entry(key).or_insert_with(|| {
                    let d = points[key.1] - points[key.0];
                    let length = d.norm();
                    let normal = Vec2::new(-d.y, d.x) / length;
                    edges.push(Edge {
                        endpoints: [key.0, key.1],
                        kind: if local == 0 { EdgeKind::PrimalInterior } else { EdgeKind::Dual },
                        normal,
                        tangent: Vec2::new(-normal.y, normal.x),
                        length,
                        adjacency: Vec::with_capacity(2),
                    });
                    edges.len() - 1
                });
                // Outward normal of a counterclockwise triangle on side p -> q.
                let d = points[q] - points[p];
                let outward = Vec2::new(d.y, -d.x);
                let sign = if outward.dot(&edges[eid].normal) > 0.0 { 1.0 } else { -1.0 };
                edges[eid].adjacency.push(Adjacent { triangle: tid, local, sign });
                *slot = eid;
            }
            triangles.push(Triangle { vertices: verts, polygon: pid, area, diameter: diameter(&pts), edges: tri_edges });
        }
    }

    for e in &mut edges {
        if e.kind == EdgeKind::PrimalInterior && e.adjacency.len() == 1 {
            e.kind = EdgeKind::PrimalBoundary;
            if e.adjacency[0].sign < 0.0 {
                e.normal = -e.normal;
                e.tangent = -e.tangent;
                e.adjacency[0].sign = 1.0;
            }
        }
    }

    let h = triangles.iter().map(|t| t.diameter).fold(0.0, f64::max);
    StaggeredMesh { points, triangles, edges, n_primal_vertices: nv, n_polygons: mesh.polygons.len(), h }
}

impl StaggeredMesh {
    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    /// Number of primal edges, interior and boundary.
    pub fn n_primal_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.kind.is_primal()).count()
    }

    /// The triangles forming the dual patch of a primal edge.
    pub fn dual_patch(&self, edge: usize) -> &[Adjacent] {
        let e = &self.edges[edge];
        debug_assert!(e.kind.is_primal());
        &e.adjacency
    }

    pub fn triangle_points(&self, t: usize) -> [Vec2; 3] {
        self.triangles[t].vertices.map(|v| self.points[v])
    }

    pub fn edge_points(&self, e: usize) -> [Vec2; 2] {
        self.edges[e].endpoints.map(|v| self.points[v])
    }

    /// Point on edge `e` at parameter `s` in `[-1, 1]`.
    pub fn edge_point(&self, e: usize, s: f64) -> Vec2 {
        let [a, b] = self.edge_points(e);
        (a + b) * 0.5 + (b - a) * (0.5 * s)
    }

    pub fn total_area(&self) -> f64 {
        self.triangles.iter().map(|t| t.area).sum()
    }

    /// Verifies the structural invariants of the submesh.
    pub fn check(&self) -> Result<(), String> {
        for (tid, t) in self.triangles.iter().enumerate() {
            if t.area <= 0.0 {
                return Err(format!("triangle {tid} has non-positive area {}", t.area));
            }
            let primal = t.edges.iter().filter(|&&e| self.edges[e].kind.is_primal()).count();
            if primal != 1 || !self.edges[t.edges[0]].kind.is_primal() {
                return Err(format!("triangle {tid} has {primal} primal edges"));
            }
        }
        for (eid, e) in self.edges.iter().enumerate() {
            let expected = if e.kind == EdgeKind::PrimalBoundary { 1 } else { 2 };
            if e.adjacency.len() != expected {
                return Err(format!("edge {eid} ({:?}) has {} neighbours", e.kind, e.adjacency.len()));
            }
            if (e.normal.norm() - 1.0).abs() > 1e-14 || e.normal.dot(&e.tangent).abs() > 1e-14 {
                return Err(format!("edge {eid} frame is not orthonormal"));
            }
            if expected == 2 && e.adjacency[0].sign * e.adjacency[1].sign != -1.0 {
                return Err(format!("edge {eid} signs do not oppose"));
            }
            if e.kind == EdgeKind::Dual
                && self.triangles[e.adjacency[0].triangle].polygon != self.triangles[e.adjacency[1].triangle].polygon
            {
                return Err(format!("dual edge {eid} crosses polygons"));
            }
        }
        let nt = self.n_triangles();
        let fp = self.count(EdgeKind::Dual);
        let fi = self.count(EdgeKind::PrimalInterior);
        let fb = self.count(EdgeKind::PrimalBoundary);
        if fp != nt || 2 * fi + fb != nt {
            return Err(format!("counting identity failed: |T|={nt} |Fp|={fp} |Fu0|={fi} |Fb|={fb}"));
        }
        Ok(())
    }
}

/// Jump `delta_1 phi_1 + delta_2 phi_2` of a (scalar, vector or matrix)
/// trace across an edge; one-sided edges return `delta_1 phi_1`.
pub fn eval_jump<V>(mesh: &StaggeredMesh, edge: usize, traces: &[V]) -> Result<V, MeshError>
where
    V: Copy + Add<Output = V> + Mul<f64, Output = V>,
{
    let adj = &mesh.edges[edge].adjacency;
    if traces.len() != adj.len() || traces.is_empty() {
        return Err(MeshError::JumpArity { edge, expected: adj.len(), got: traces.len() });
    }
    let mut acc = traces[0] * adj[0].sign;
    for (t, a) in traces.iter().zip(adj).skip(1) {
        acc = acc + *t * a.sign;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_distorted_grid, build_hanging_grid, build_square_grid, import_polygon_mesh};

    #[test]
    fn two_by_two_counts() {
        let s = build_staggered(&build_square_grid(2).unwrap());
        assert_eq!(s.n_triangles(), 16);
        assert_eq!(s.count(EdgeKind::Dual), 16);
        assert_eq!(s.count(EdgeKind::PrimalInterior), 4);
        assert_eq!(s.count(EdgeKind::PrimalBoundary), 8);
        assert_eq!(2 * 4 + 8, s.n_triangles());
        s.check().unwrap();
    }

    #[test]
    fn single_cell_counts() {
        let s = build_staggered(&build_square_grid(1).unwrap());
        assert_eq!(s.n_triangles(), 4);
        assert_eq!(s.count(EdgeKind::Dual), 4);
        assert_eq!(s.count(EdgeKind::PrimalBoundary), 4);
        assert_eq!(s.count(EdgeKind::PrimalInterior), 0);
    }

    #[test]
    fn eight_by_eight_has_256_triangles() {
        let s = build_staggered(&build_square_grid(8).unwrap());
        assert_eq!(s.n_triangles(), 256);
        assert!((s.h - 0.125).abs() < 1e-15);
    }

    #[test]
    fn distorted_triangles_positive() {
        let s = build_staggered(&build_distorted_grid(8, 0.25, 1).unwrap());
        assert_eq!(s.n_triangles(), 256);
        assert!(s.triangles.iter().all(|t| t.area > 0.0));
        s.check().unwrap();
    }

    #[test]
    fn areas_partition_domain() {
        for mesh in [
            build_square_grid(3).unwrap(),
            build_distorted_grid(7, 0.3, 11).unwrap(),
            build_hanging_grid(6).unwrap(),
        ] {
            let s = build_staggered(&mesh);
            assert!((s.total_area() - 1.0).abs() < 1e-13);
            s.check().unwrap();
        }
    }

    #[test]
    fn boundary_normals_point_outward() {
        let s = build_staggered(&build_distorted_grid(5, 0.2, 4).unwrap());
        for e in s.edges.iter().filter(|e| e.kind == EdgeKind::PrimalBoundary) {
            let [a, b] = s.edge_points(s.edges.iter().position(|x| x == e).unwrap());
            let mid = (a + b) * 0.5;
            let out = mid + e.normal * 1e-3;
            assert!(out.x < 0.0 || out.x > 1.0 || out.y < 0.0 || out.y > 1.0);
        }
    }

    #[test]
    fn hanging_node_file() {
        // Left half split into two squares, right half a pentagon with a
        // hanging vertex at (0.5, 0.5).
        let file = "\
8 3
0 0
0.5 0
1 0
1 1
0.5 1
0 1
0 0.5
0.5 0.5
4 0 1 7 6
4 6 7 4 5
5 1 2 3 4 7
";
        let mesh = import_polygon_mesh(file).unwrap();
        assert_eq!(mesh.polygons[2].vertices.len(), 5);
        let s = build_staggered(&mesh);
        assert_eq!(s.n_triangles(), 13);
        s.check().unwrap();
    }

    #[test]
    fn jumps() {
        let s = build_staggered(&build_square_grid(2).unwrap());
        let two_sided = s.edges.iter().position(|e| e.adjacency.len() == 2).unwrap();
        let adj = &s.edges[two_sided].adjacency;
        let (p1, p2) = if adj[0].sign > 0.0 { (2.0, 3.0) } else { (3.0, 2.0) };
        assert_eq!(eval_jump(&s, two_sided, &[p1, p2]).unwrap(), -1.0);
        assert_eq!(eval_jump(&s, two_sided, &[4.5, 4.5]).unwrap(), 0.0);
        let bnd = s.edges.iter().position(|e| e.kind == EdgeKind::PrimalBoundary).unwrap();
        assert_eq!(eval_jump(&s, bnd, &[5.0]).unwrap(), 5.0);
        assert!(eval_jump(&s, bnd, &[5.0, 1.0]).is_err());
        let v = Vec2::new(1.0, 2.0);
        assert_eq!(eval_jump(&s, two_sided, &[v, v]).unwrap(), Vec2::zeros());
    }
}
