use num_traits::Float;

use super::lit;

/// Values and first derivatives of the Jacobi polynomials `P_n^{(alpha,0)}`
/// for `n = 0..=degree` at `x`.
pub fn jacobi<T: Float>(degree: usize, alpha: T, x: T) -> (Vec<T>, Vec<T>) {
    let mut val = vec![T::zero(); degree + 1];
    let mut der = vec![T::zero(); degree + 1];
    val[0] = T::one();
    if degree == 0 {
        return (val, der);
    }
    let one = T::one();
    let two = lit::<T>(2.0);
    val[1] = ((alpha + two) * x + alpha) / two;
    der[1] = (alpha + two) / two;
    for n in 2..=degree {
        let nf = T::from(n).unwrap();
        let s = two * nf + alpha;
        let a = two * nf * (nf + alpha) * (s - two);
        let b = (s - one) * s * (s - two);
        let c = (s - one) * alpha * alpha;
        let d = two * (nf + alpha - one) * (nf - one) * s;
        val[n] = ((b * x + c) * val[n - 1] - d * val[n - 2]) / a;
        der[n] = ((b * x + c) * der[n - 1] + b * val[n - 1] - d * der[n - 2]) / a;
    }
    (val, der)
}

/// Legendre polynomials `P_n` (unnormalised) and derivatives for `n = 0..=degree`.
pub fn legendre<T: Float>(degree: usize, x: T) -> (Vec<T>, Vec<T>) {
    jacobi(degree, T::zero(), x)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` with `n` points.
///
/// Nodes are computed by Newton iteration in `f64` and then converted, so
/// lower precision types get correctly rounded rules.
pub fn gauss_legendre<T: Float>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "a Gauss rule needs at least one point");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre::<f64>(n, x);
            dp = d[n];
            let dx = p[n] / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre::<f64>(n, x);
        dp = if d[n] != 0.0 { d[n] } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (
        nodes.into_iter().map(lit).collect(),
        weights.into_iter().map(lit).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_matches_closed_forms() {
        let x = 0.3f64;
        let (p, d) = legendre(3, x);
        assert!((p[2] - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-15);
        assert!((d[3] - 0.5 * (15.0 * x * x - 3.0)).abs() < 1e-14);
    }

    #[test]
    fn jacobi_derivative_matches_finite_difference() {
        let h = 1e-6;
        for n in 0..6 {
            for &x in &[-0.8, -0.1, 0.4, 0.95] {
                let (_, d) = jacobi(n, 3.0f64, x);
                let (p1, _) = jacobi(n, 3.0f64, x + h);
                let (p0, _) = jacobi(n, 3.0f64, x - h);
                let fd = (p1[n] - p0[n]) / (2.0 * h);
                assert!((d[n] - fd).abs() < 1e-6 * (1.0 + fd.abs()), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn gauss_rule_sums_and_symmetry() {
        for n in 1..12 {
            let (x, w) = gauss_legendre::<f64>(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-14);
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-15);
                assert!(w[i] > 0.0);
            }
        }
    }
}
