use num_traits::Float;

use super::{jacobi, lit, tri_dim, BasisError, MAX_ORDER};

/// L²-orthonormal (Dubiner) basis of `P^k` on the reference triangle.
///
/// Functions are ordered by total degree, so the first `tri_dim(j)` entries
/// span `P^j` for every `j <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriBasis<T = f64> {
    order: usize,
    /// `(p, q)` index pairs and their normalisation constants.
    modes: Vec<(usize, usize, T)>,
}

pub fn tri_basis<T: Float>(k: usize) -> Result<TriBasis<T>, BasisError> {
    if k > MAX_ORDER {
        return Err(BasisError::UnsupportedOrder(k));
    }
    let mut modes = Vec::with_capacity(tri_dim(k));
    for n in 0..=k {
        for p in (0..=n).rev() {
            let q = n - p;
            let c = (2.0 * (2 * p + 1) as f64 * (p + q + 1) as f64).sqrt();
            modes.push((p, q, lit(c)));
        }
    }
    Ok(TriBasis { order: k, modes })
}

impl<T: Float> TriBasis<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// Evaluates all basis functions at a reference point.
    pub fn eval(&self, xi: [T; 2], values: &mut [T]) {
        let (l, _, _) = scaled_legendre(self.order, xi, false);
        let b = lit::<T>(2.0) * xi[1] - T::one();
        let mut cache: Vec<Option<Vec<T>>> = vec![None; self.order + 1];
        for (slot, &(p, q, c)) in values.iter_mut().zip(&self.modes) {
            let jac = cache[p].get_or_insert_with(|| {
                jacobi(self.order - p, T::from(2 * p + 1).unwrap(), b).0
            });
            *slot = c * l[p] * jac[q];
        }
    }

    /// Evaluates values and reference gradients of all basis functions.
    pub fn eval_with_grad(&self, xi: [T; 2], values: &mut [T], grads: &mut [[T; 2]]) {
        let (l, lx, ly) = scaled_legendre(self.order, xi, true);
        let two = lit::<T>(2.0);
        let b = two * xi[1] - T::one();
        let mut cache: Vec<Option<(Vec<T>, Vec<T>)>> = vec![None; self.order + 1];
        for (i, &(p, q, c)) in self.modes.iter().enumerate() {
            let (jv, jd) = cache[p]
                .get_or_insert_with(|| jacobi(self.order - p, T::from(2 * p + 1).unwrap(), b));
            values[i] = c * l[p] * jv[q];
            grads[i] = [c * lx[p] * jv[q], c * (ly[p] * jv[q] + l[p] * two * jd[q])];
        }
    }

    pub fn values(&self, xi: [T; 2]) -> Vec<T> {
        let mut v = vec![T::zero(); self.dim()];
        self.eval(xi, &mut v);
        v
    }
}

/// `L_p(x, y) = (1-y)^p P_p((2x-1+y)/(1-y))` for `p = 0..=k`, written through
/// the three-term recurrence so it stays polynomial at the top vertex.
fn scaled_legendre<T: Float>(k: usize, xi: [T; 2], with_grad: bool) -> (Vec<T>, Vec<T>, Vec<T>) {
    let two = lit::<T>(2.0);
    let z = two * xi[0] - T::one() + xi[1];
    let s = T::one() - xi[1];
    let mut l = vec![T::zero(); k + 1];
    let mut lx = vec![T::zero(); k + 1];
    let mut ly = vec![T::zero(); k + 1];
    l[0] = T::one();
    if k >= 1 {
        l[1] = z;
        lx[1] = two;
        ly[1] = T::one();
    }
    for n in 1..k {
        let nf = T::from(n).unwrap();
        let a = two * nf + T::one();
        let np1 = nf + T::one();
        l[n + 1] = (a * z * l[n] - nf * s * s * l[n - 1]) / np1;
        if with_grad {
            lx[n + 1] = (a * (two * l[n] + z * lx[n]) - nf * s * s * lx[n - 1]) / np1;
            ly[n + 1] = (a * (l[n] + z * ly[n]) - nf * (s * s * ly[n - 1] - two * s * l[n - 1]))
                / np1;
        }
    }
    (l, lx, ly)
}
