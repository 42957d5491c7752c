use num_traits::Float;

use super::{legendre, lit, BasisError, MAX_ORDER};

/// Orthonormal Legendre basis of `P^k` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBasis<T = f64> {
    order: usize,
    scale: Vec<T>,
}

pub fn edge_basis<T: Float>(k: usize) -> Result<EdgeBasis<T>, BasisError> {
    if k > MAX_ORDER {
        return Err(BasisError::UnsupportedOrder(k));
    }
    let scale = (0..=k).map(|n| lit(((2 * n + 1) as f64 / 2.0).sqrt())).collect();
    Ok(EdgeBasis { order: k, scale })
}

impl<T: Float> EdgeBasis<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.order + 1
    }

    pub fn eval(&self, s: T, values: &mut [T]) {
        let (p, _) = legendre(self.order, s);
        for ((v, p), c) in values.iter_mut().zip(p).zip(&self.scale) {
            *v = *c * p;
        }
    }

    pub fn values(&self, s: T) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim()];
        self.eval(s, &mut v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polybasis::edge_quadrature;

    #[test]
    fn orthonormal_under_gauss() {
        for k in 0..=MAX_ORDER {
            let b = edge_basis::<f64>(k).unwrap();
            let rule = edge_quadrature::<f64>(2 * k).unwrap();
            for i in 0..=k {
                for j in 0..=k {
                    let g = rule.integrate(|p| {
                        let v = b.values(p[0]);
                        v[i] * v[j]
                    });
                    let t = if i == j { 1.0 } else { 0.0 };
                    assert!((g - t).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn linear_basis_is_constant_and_x() {
        let b = edge_basis::<f64>(1).unwrap();
        assert_eq!(b.dim(), 2);
        let v0 = b.values(0.0);
        let v1 = b.values(0.5);
        assert!((v0[0] - v1[0]).abs() < 1e-15);
        assert!(v0[1].abs() < 1e-15);
        assert!((v1[1] / 0.5 - 1.5f64.sqrt()).abs() < 1e-14);
    }
}
