use num_traits::Float;

use super::BasisError;

/// Affine map `x = origin + J xi` from the reference triangle onto a
/// physical triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap<T = f64> {
    pub origin: [T; 2],
    /// Columns are `v1 - v0` and `v2 - v0`.
    pub jacobian: [[T; 2]; 2],
    pub inverse: [[T; 2]; 2],
    pub det: T,
}

pub fn affine_map<T: Float>(vertices: [[T; 2]; 3]) -> Result<AffineMap<T>, BasisError> {
    let [v0, v1, v2] = vertices;
    let j = [[v1[0] - v0[0], v2[0] - v0[0]], [v1[1] - v0[1], v2[1] - v0[1]]];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det <= T::zero() || !det.is_finite() {
        return Err(BasisError::DegenerateTriangle(det.to_f64().unwrap_or(f64::NAN)));
    }
    let inverse = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    Ok(AffineMap { origin: v0, jacobian: j, inverse, det })
}

impl<T: Float> AffineMap<T> {
    pub fn map(&self, xi: [T; 2]) -> [T; 2] {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn inverse_map(&self, x: [T; 2]) -> [T; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let a = &self.inverse;
        [a[0][0] * d[0] + a[0][1] * d[1], a[1][0] * d[0] + a[1][1] * d[1]]
    }

    /// Pushes a reference gradient forward: `J^{-T} g`.
    pub fn push_gradient(&self, g: [T; 2]) -> [T; 2] {
        let a = &self.inverse;
        [a[0][0] * g[0] + a[1][0] * g[1], a[0][1] * g[0] + a[1][1] * g[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_triangle_is_identity() {
        let m = affine_map([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(m.det, 1.0);
        assert_eq!(m.map([0.3, 0.4]), [0.3, 0.4]);
    }

    #[test]
    fn scaled_triangle_det() {
        let s = 2.5;
        let m = affine_map([[0.0, 0.0], [s, 0.0], [0.0, s]]).unwrap();
        assert!((m.det - s * s).abs() < 1e-15);
    }

    #[test]
    fn maps_reference_vertices_and_inverts() {
        let v = [[0.3, -0.2], [1.7, 0.4], [0.1, 2.2]];
        let m = affine_map(v).unwrap();
        for (xi, x) in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]].iter().zip(v) {
            let y = m.map(*xi);
            assert!((y[0] - x[0]).abs() < 1e-15 && (y[1] - x[1]).abs() < 1e-15);
        }
        let back = m.inverse_map(m.map([0.25, 0.6]));
        assert!((back[0] - 0.25).abs() < 1e-14 && (back[1] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn gradient_transform_is_inverse_transpose() {
        // f(x) = a.x has reference gradient J^T a.
        let m = affine_map([[0.0, 0.0], [2.0, 0.5], [-0.3, 1.1]]).unwrap();
        let a = [0.7, -1.3];
        let j = m.jacobian;
        let gref = [j[0][0] * a[0] + j[1][0] * a[1], j[0][1] * a[0] + j[1][1] * a[1]];
        let g = m.push_gradient(gref);
        assert!((g[0] - a[0]).abs() < 1e-14 && (g[1] - a[1]).abs() < 1e-14);
    }

    #[test]
    fn clockwise_triangle_rejected() {
        assert!(affine_map([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
    }
}
