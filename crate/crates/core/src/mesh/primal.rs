use std::collections::HashMap;

use super::{cross, MeshError, Vec2};

/// Default lower bound on `h_e / h_S` for every side `e` of a polygon `S`.
pub const DEFAULT_RHO: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    /// Counterclockwise vertex cycle.
    pub vertices: Vec<usize>,
    /// Point joined to every vertex when the polygon is triangulated.
    pub interior: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalMesh {
    pub vertices: Vec<Vec2>,
    pub polygons: Vec<Polygon>,
}

impl PrimalMesh {
    /// Builds a mesh from vertex cycles, using each polygon's centroid as
    /// its interior point, and validates it.
    pub fn from_cycles(vertices: Vec<Vec2>, cycles: Vec<Vec<usize>>, rho: f64) -> Result<Self, MeshError> {
        let mut polygons = Vec::with_capacity(cycles.len());
        for (id, cycle) in cycles.into_iter().enumerate() {
            if let Some(&bad) = cycle.iter().find(|&&i| i >= vertices.len()) {
                return Err(MeshError::InvalidIndex { polygon: id, index: bad });
            }
            let pts: Vec<Vec2> = cycle.iter().map(|&i| vertices[i]).collect();
            let interior = centroid(&pts).unwrap_or_else(|| vertex_mean(&pts));
            polygons.push(Polygon { vertices: cycle, interior });
        }
        let mesh = PrimalMesh { vertices, polygons };
        mesh.validate(rho)?;
        Ok(mesh)
    }

    pub fn polygon_points(&self, id: usize) -> Vec<Vec2> {
        self.polygons[id].vertices.iter().map(|&i| self.vertices[i]).collect()
    }

    pub fn polygon_area(&self, id: usize) -> f64 {
        signed_area(&self.polygon_points(id))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.polygons.len()).map(|i| self.polygon_area(i)).sum()
    }

    /// Checks every polygon invariant plus edge conformity.
    pub fn validate(&self, rho: f64) -> Result<(), MeshError> {
        for id in 0..self.polygons.len() {
            self.validate_polygon(id, rho)?;
        }
        let mut uses: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for poly in &self.polygons {
            let m = poly.vertices.len();
            for i in 0..m {
                let (a, b) = (poly.vertices[i], poly.vertices[(i + 1) % m]);
                let entry = uses.entry((a.min(b), a.max(b))).or_insert((0, 0));
                if a < b {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        for (&(a, b), &(fwd, bwd)) in &uses {
            if fwd > 1 || bwd > 1 {
                return Err(MeshError::NonConforming(a, b));
            }
        }
        Ok(())
    }

    pub fn validate_polygon(&self, id: usize, rho: f64) -> Result<(), MeshError> {
        let poly = &self.polygons[id];
        if let Some(&bad) = poly.vertices.iter().find(|&&i| i >= self.vertices.len()) {
            return Err(MeshError::InvalidIndex { polygon: id, index: bad });
        }
        let mut sorted = poly.vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < 3 || sorted.len() != poly.vertices.len() {
            return Err(MeshError::Degenerate { polygon: id });
        }
        let pts = self.polygon_points(id);
        let area = signed_area(&pts);
        if area <= 0.0 {
            return Err(if area < 0.0 {
                MeshError::Orientation { polygon: id }
            } else {
                MeshError::Degenerate { polygon: id }
            });
        }
        if !is_simple(&pts) {
            return Err(MeshError::NotSimple { polygon: id });
        }
        let m = pts.len();
        let scale = diameter(&pts);
        for i in 0..m {
            let (a, b) = (pts[i], pts[(i + 1) % m]);
            if cross(a - poly.interior, b - poly.interior) <= 1e-14 * scale * scale {
                return Err(MeshError::NotStarShaped { polygon: id });
            }
            let ratio = (b - a).norm() / scale;
            if ratio < rho {
                return Err(MeshError::ShortEdge { polygon: id, ratio, rho });
            }
        }
        Ok(())
    }
}

pub(crate) fn signed_area(pts: &[Vec2]) -> f64 {
    let m = pts.len();
    0.5 * (0..m).map(|i| cross(pts[i], pts[(i + 1) % m])).sum::<f64>()
}

pub(crate) fn diameter(pts: &[Vec2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Area centroid of a simple polygon.
pub(crate) fn centroid(pts: &[Vec2]) -> Option<Vec2> {
    let a = signed_area(pts);
    if a.abs() < 1e-300 {
        return None;
    }
    let m = pts.len();
    let mut c = Vec2::zeros();
    for i in 0..m {
        let (p, q) = (pts[i], pts[(i + 1) % m]);
        c += (p + q) * cross(p, q);
    }
    Some(c / (6.0 * a))
}

fn vertex_mean(pts: &[Vec2]) -> Vec2 {
    pts.iter().fold(Vec2::zeros(), |acc, p| acc + p) / pts.len().max(1) as f64
}

fn is_simple(pts: &[Vec2]) -> bool {
    let m = pts.len();
    for i in 0..m {
        for j in i + 1..m {
            // Adjacent sides share an endpoint; only test disjoint pairs.
            if j == i + 1 || (i == 0 && j == m - 1) {
                continue;
            }
            if segments_intersect(pts[i], pts[(i + 1) % m], pts[j], pts[(j + 1) % m]) {
                return false;
            }
        }
    }
    true
}

fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Vec2, b: Vec2, p: Vec2, d: f64| {
        d == 0.0
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    #[test]
    fn centroid_of_square() {
        let c = centroid(&[v(0.0, 0.0), v(2.0, 0.0), v(2.0, 2.0), v(0.0, 2.0)]).unwrap();
        assert!((c - v(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let verts = vec![v(0.0, 0.0), v(1.0, 1.0), v(1.0, 0.0), v(0.0, 1.0)];
        let mesh = PrimalMesh {
            vertices: verts,
            polygons: vec![Polygon { vertices: vec![0, 1, 2, 3], interior: v(0.5, 0.5) }],
        };
        // Zero signed area: reported as degenerate before the simplicity test.
        assert!(mesh.validate(DEFAULT_RHO).is_err());
    }

    #[test]
    fn non_star_shaped_interior_point_rejected() {
        let verts = vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        let mesh = PrimalMesh {
            vertices: verts,
            polygons: vec![Polygon { vertices: vec![0, 1, 2, 3], interior: v(1.5, 0.5) }],
        };
        assert_eq!(mesh.validate(DEFAULT_RHO), Err(MeshError::NotStarShaped { polygon: 0 }));
    }

    #[test]
    fn short_side_rejected() {
        let verts = vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 0.01), v(1.0, 1.0), v(0.0, 1.0)];
        let err = PrimalMesh::from_cycles(verts, vec![vec![0, 1, 2, 3, 4]], DEFAULT_RHO).unwrap_err();
        assert!(matches!(err, MeshError::ShortEdge { polygon: 0, .. }));
    }

    #[test]
    fn duplicated_directed_edge_rejected() {
        let verts = vec![v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        let err = PrimalMesh::from_cycles(verts, vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]], DEFAULT_RHO)
            .unwrap_err();
        assert!(matches!(err, MeshError::NonConforming(..)));
    }
}
