use num_traits::Float;

use super::{gauss_legendre, lit, BasisError, MAX_QUADRATURE_DEGREE};

/// Points, weights and declared polynomial exactness of a quadrature rule.
///
/// Triangle rules carry 2D points on the reference triangle; edge rules store
/// the 1D abscissa in `points[i][0]` with `points[i][1] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T = f64> {
    pub points: Vec<[T; 2]>,
    pub weights: Vec<T>,
    pub degree: usize,
}

impl<T: Float> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Integrates `f` over the reference domain.
    pub fn integrate(&self, mut f: impl FnMut([T; 2]) -> T) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&p, &w)| acc + w * f(p))
    }
}

/// Collapsed (Duffy) Gauss rule on the reference triangle, exact for total
/// degree `degree`.
pub fn tri_quadrature<T: Float>(degree: usize) -> Result<QuadratureRule<T>, BasisError> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(BasisError::UnsupportedDegree(degree));
    }
    // The collapsed map adds one degree in the first direction.
    let n = (degree + 3) / 2;
    let (x, w) = gauss_legendre::<f64>(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = 0.5 * (x[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (x[j] + 1.0);
            points.push([lit(u), lit(v * (1.0 - u))]);
            weights.push(lit(0.25 * w[i] * w[j] * (1.0 - u)));
        }
    }
    Ok(QuadratureRule { points, weights, degree })
}

/// Gauss-Legendre rule on `[-1, 1]` exact for degree `degree`.
pub fn edge_quadrature<T: Float>(degree: usize) -> Result<QuadratureRule<T>, BasisError> {
    if degree > MAX_QUADRATURE_DEGREE {
        return Err(BasisError::UnsupportedDegree(degree));
    }
    let n = degree / 2 + 1;
    let (x, w) = gauss_legendre::<T>(n);
    Ok(QuadratureRule {
        points: x.into_iter().map(|s| [s, T::zero()]).collect(),
        weights: w,
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // Exact monomial moments on the reference triangle: a! b! / (a+b+2)!.
    fn tri_moment(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn triangle_rules_integrate_all_monomials() {
        for degree in 0..=MAX_QUADRATURE_DEGREE {
            let rule = tri_quadrature::<f64>(degree).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let got = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    let exact = tri_moment(a, b);
                    assert!((got - exact).abs() < 1e-13, "deg {degree} x^{a} y^{b}");
                }
            }
        }
    }

    #[test]
    fn degree_one_rule_has_reference_area() {
        let rule = tri_quadrature::<f64>(1).unwrap();
        assert!((rule.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_four_integrates_x2y2() {
        let rule = tri_quadrature::<f64>(4).unwrap();
        let got = rule.integrate(|p| p[0] * p[0] * p[1] * p[1]);
        assert!((got - 1.0 / 180.0).abs() < 1e-14);
    }

    #[test]
    fn edge_rules_integrate_monomials() {
        for degree in 0..=MAX_QUADRATURE_DEGREE {
            let rule = edge_quadrature::<f64>(degree).unwrap();
            for a in 0..=degree as i32 {
                let exact = if a % 2 == 0 { 2.0 / (a as f64 + 1.0) } else { 0.0 };
                let got = rule.integrate(|p| p[0].powi(a));
                assert!((got - exact).abs() < 1e-13);
            }
        }
        let rule = edge_quadrature::<f64>(5).unwrap();
        assert_eq!(rule.len(), 3);
        assert!((rule.integrate(|p| p[0].powi(4)) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rejects_excessive_degree() {
        assert_eq!(
            tri_quadrature::<f64>(21).unwrap_err(),
            BasisError::UnsupportedDegree(21)
        );
        assert!(edge_quadrature::<f32>(40).is_err());
    }
}
