use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::primal::{centroid, DEFAULT_RHO};
use super::{MeshError, Polygon, PrimalMesh, Vec2};

const MAX_RESAMPLES: usize = 100;

fn lattice(n: usize) -> Vec<Vec2> {
    let h = 1.0 / n as f64;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push(Vec2::new(i as f64 * h, j as f64 * h));
        }
    }
    v
}

fn lattice_cells(n: usize) -> Vec<Vec<usize>> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    cells
}

/// Uniform `n x n` grid of squares on the unit square.
pub fn build_square_grid(n: usize) -> Result<PrimalMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidParameter("grid size must be positive".into()));
    }
    PrimalMesh::from_cycles(lattice(n), lattice_cells(n), DEFAULT_RHO)
}

/// Square grid with every interior vertex moved by an independent uniform
/// offset in `[-delta h, delta h]^2`.
///
/// Vertices are perturbed in index order from a ChaCha stream seeded with
/// `seed`; a sample that leaves an incident cell invalid is redrawn.
pub fn build_distorted_grid(n: usize, delta: f64, seed: u64) -> Result<PrimalMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidParameter("grid size must be positive".into()));
    }
    if !(0.0..0.5).contains(&delta) {
        return Err(MeshError::InvalidParameter(format!("distortion {delta} outside [0, 0.5)")));
    }
    let h = 1.0 / n as f64;
    let mut vertices = lattice(n);
    let cells = lattice_cells(n);
    let mut mesh = PrimalMesh {
        polygons: cells
            .iter()
            .map(|c| Polygon { vertices: c.clone(), interior: Vec2::zeros() })
            .collect(),
        vertices: vertices.clone(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for j in 1..n {
        for i in 1..n {
            let vid = j * (n + 1) + i;
            let base = vertices[vid];
            let incident = [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)].map(|(ci, cj)| cj * n + ci);
            let mut accepted = false;
            for _ in 0..MAX_RESAMPLES {
                let dx = (2.0 * rng.random::<f64>() - 1.0) * delta * h;
                let dy = (2.0 * rng.random::<f64>() - 1.0) * delta * h;
                mesh.vertices[vid] = base + Vec2::new(dx, dy);
                let ok = incident.iter().all(|&c| {
                    let pts = mesh.polygon_points(c);
                    match centroid(&pts) {
                        Some(nu) => {
                            mesh.polygons[c].interior = nu;
                            mesh.validate_polygon(c, DEFAULT_RHO).is_ok()
                        }
                        None => false,
                    }
                });
                if ok {
                    accepted = true;
                    break;
                }
            }
            if !accepted {
                return Err(MeshError::Regularity { vertex: vid, attempts: MAX_RESAMPLES });
            }
            vertices[vid] = mesh.vertices[vid];
        }
    }
    PrimalMesh::from_cycles(vertices, cells, DEFAULT_RHO)
}

/// Grid of `n x n` coarse cells (`n` even) whose left half is refined once.
///
/// Every coarse cell on the right of the refinement interface carries a
/// hanging vertex at the midpoint of its left side, so it is a pentagon with
/// two collinear sides.
pub fn build_hanging_grid(n: usize) -> Result<PrimalMesh, MeshError> {
    if n < 2 || n % 2 != 0 {
        return Err(MeshError::InvalidParameter(format!(
            "hanging-node grid needs an even size >= 2, got {n}"
        )));
    }
    let fine = 2 * n;
    let h = 1.0 / fine as f64;
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vid = |x: usize, y: usize| {
        *index.entry((x, y)).or_insert_with(|| {
            vertices.push(Vec2::new(x as f64 * h, y as f64 * h));
            vertices.len() - 1
        })
    };
    let mut cycles = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (2 * i, 2 * j);
            if i < n / 2 {
                for b in 0..2 {
                    for a in 0..2 {
                        let (fx, fy) = (x + a, y + b);
                        cycles.push(vec![vid(fx, fy), vid(fx + 1, fy), vid(fx + 1, fy + 1), vid(fx, fy + 1)]);
                    }
                }
            } else {
                let mut c = vec![vid(x, y), vid(x + 2, y), vid(x + 2, y + 2), vid(x, y + 2)];
                if i == n / 2 {
                    c.push(vid(x, y + 1));
                }
                cycles.push(c);
            }
        }
    }
    PrimalMesh::from_cycles(vertices, cycles, DEFAULT_RHO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_grid_counts() {
        let m = build_square_grid(2).unwrap();
        assert_eq!(m.polygons.len(), 4);
        assert_eq!(m.vertices.len(), 9);
        let m1 = build_square_grid(1).unwrap();
        assert_eq!(m1.polygons.len(), 1);
        assert!((m.total_area() - 1.0).abs() < 1e-14);
        assert!(build_square_grid(0).is_err());
    }

    #[test]
    fn zero_distortion_is_square_grid() {
        assert_eq!(build_distorted_grid(5, 0.0, 7).unwrap(), build_square_grid(5).unwrap());
    }

    #[test]
    fn distortion_is_deterministic() {
        let a = build_distorted_grid(4, 0.25, 42).unwrap();
        let b = build_distorted_grid(4, 0.25, 42).unwrap();
        assert_eq!(a, b);
        let bits = |m: &PrimalMesh| m.vertices.iter().map(|v| (v.x.to_bits(), v.y.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = build_distorted_grid(4, 0.25, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn distortion_moves_interior_vertices_only() {
        let n = 6;
        let m = build_distorted_grid(n, 0.3, 3).unwrap();
        let base = build_square_grid(n).unwrap();
        let h = 1.0 / n as f64;
        for (idx, (p, q)) in m.vertices.iter().zip(&base.vertices).enumerate() {
            let (i, j) = (idx % (n + 1), idx / (n + 1));
            if i == 0 || j == 0 || i == n || j == n {
                assert_eq!(p, q);
            } else {
                assert!((p - q).amax() <= 0.3 * h + 1e-15);
            }
        }
        assert!((m.total_area() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_distortion() {
        assert!(build_distorted_grid(4, 0.5, 1).is_err());
        assert!(build_distorted_grid(4, -0.1, 1).is_err());
    }

    #[test]
    fn hanging_grid_has_pentagons() {
        let m = build_hanging_grid(4).unwrap();
        // 2 refined columns of 4 cells -> 32 squares, 2 unrefined columns -> 8 cells.
        assert_eq!(m.polygons.len(), 40);
        let pentagons = m.polygons.iter().filter(|p| p.vertices.len() == 5).count();
        assert_eq!(pentagons, 4);
        assert!((m.total_area() - 1.0).abs() < 1e-14);
        assert!(build_hanging_grid(3).is_err());
    }
}
