use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::mesh::Vec2;
use crate::spaces::Sample;

/// Manufactured problems on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// `u = (s, s)` with `s = sin 2 pi x sin 2 pi y`, `p = sin x cos y - mean`.
    Trig,
    /// Trig exact fields but zero data, so the discrete solution is zero
    /// and every error equals the norm of the exact field.
    ZeroData,
    /// `u = 0`, `p = x - 1/2`: exactly representable for `k >= 1`.
    LinearPressure,
}

impl CaseId {
    pub const ALL: [CaseId; 3] = [CaseId::Trig, CaseId::ZeroData, CaseId::LinearPressure];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Trig => "trig",
            CaseId::ZeroData => "zero_data",
            CaseId::LinearPressure => "linear_pressure",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedCase {
    pub id: CaseId,
    pub epsilon: f64,
    pub alpha: f64,
}

fn s(x: Vec2) -> f64 {
    (2.0 * PI * x.x).sin() * (2.0 * PI * x.y).sin()
}

fn grad_s(x: Vec2) -> [f64; 2] {
    let (sx, cx) = (2.0 * PI * x.x).sin_cos();
    let (sy, cy) = (2.0 * PI * x.y).sin_cos();
    [2.0 * PI * cx * sy, 2.0 * PI * sx * cy]
}

/// `[s_xx, s_xy, s_yy]`.
fn hess_s(x: Vec2) -> [f64; 3] {
    let (sx, cx) = (2.0 * PI * x.x).sin_cos();
    let (sy, cy) = (2.0 * PI * x.y).sin_cos();
    let c = 4.0 * PI * PI;
    [-c * sx * sy, c * cx * cy, -c * sx * sy]
}

/// Mean of `sin x cos y` over the unit square.
pub fn trig_pressure_shift() -> f64 {
    1f64.sin() * (1f64.cos() - 1.0)
}

impl ManufacturedCase {
    pub fn new(id: CaseId, epsilon: f64, alpha: f64) -> Self {
        Self { id, epsilon, alpha }
    }

    pub fn trig(epsilon: f64, alpha: f64) -> Self {
        Self::new(CaseId::Trig, epsilon, alpha)
    }

    fn trig_fields(self) -> bool {
        matches!(self.id, CaseId::Trig | CaseId::ZeroData)
    }

    pub fn u(&self, x: Vec2) -> [f64; 2] {
        if self.trig_fields() {
            [s(x), s(x)]
        } else {
            [0.0, 0.0]
        }
    }

    pub fn p(&self, x: Vec2) -> f64 {
        match self.id {
            CaseId::Trig | CaseId::ZeroData => x.x.sin() * x.y.cos() + trig_pressure_shift(),
            CaseId::LinearPressure => x.x - 0.5,
        }
    }

    /// Velocity with its gradient, as a `U` sample.
    pub fn u_sample(&self, x: Vec2) -> Sample {
        let mut out = Sample::default();
        if self.trig_fields() {
            let g = grad_s(x);
            out.value[..2].copy_from_slice(&[s(x), s(x)]);
            out.grad[0] = g;
            out.grad[1] = g;
        }
        out
    }

    pub fn p_sample(&self, x: Vec2) -> Sample {
        let mut out = Sample::default();
        out.value[0] = self.p(x);
        out.grad[0] = match self.id {
            CaseId::Trig | CaseId::ZeroData => [x.x.cos() * x.y.cos(), -x.x.sin() * x.y.sin()],
            CaseId::LinearPressure => [1.0, 0.0],
        };
        out
    }

    /// `L = sqrt(eps) grad u` (row-major) with its gradient.
    pub fn l_sample(&self, x: Vec2) -> Sample {
        let mut out = Sample::default();
        if self.trig_fields() {
            let se = self.epsilon.sqrt();
            let g = grad_s(x);
            let [hxx, hxy, hyy] = hess_s(x);
            for r in 0..2 {
                out.value[2 * r] = se * g[0];
                out.value[2 * r + 1] = se * g[1];
                out.grad[2 * r] = [se * hxx, se * hxy];
                out.grad[2 * r + 1] = [se * hxy, se * hyy];
            }
        }
        out
    }

    pub fn f(&self, x: Vec2) -> [f64; 2] {
        match self.id {
            CaseId::Trig => {
                let a = (8.0 * PI * PI * self.epsilon + self.alpha) * s(x);
                [a + x.x.cos() * x.y.cos(), a - x.x.sin() * x.y.sin()]
            }
            CaseId::ZeroData => [0.0, 0.0],
            CaseId::LinearPressure => [1.0, 0.0],
        }
    }

    pub fn g(&self, x: Vec2) -> f64 {
        match self.id {
            CaseId::Trig => {
                let (sx, cx) = (2.0 * PI * x.x).sin_cos();
                let (sy, cy) = (2.0 * PI * x.y).sin_cos();
                2.0 * PI * (cx * sy + sx * cy)
            }
            CaseId::ZeroData | CaseId::LinearPressure => 0.0,
        }
    }

    /// Residual of `f = -eps lap u + alpha u + grad p` and `g = div u`
    /// computed by central differences of the exact fields with step `h`.
    pub fn finite_difference_residual(&self, x: Vec2, h: f64) -> f64 {
        if self.id == CaseId::ZeroData {
            return 0.0;
        }
        let ex = Vec2::new(h, 0.0);
        let ey = Vec2::new(0.0, h);
        let u = |y| self.u(y);
        let lap = |c: usize| (u(x + ex)[c] + u(x - ex)[c] + u(x + ey)[c] + u(x - ey)[c] - 4.0 * u(x)[c]) / (h * h);
        let dp = [(self.p(x + ex) - self.p(x - ex)) / (2.0 * h), (self.p(x + ey) - self.p(x - ey)) / (2.0 * h)];
        let div = (u(x + ex)[0] - u(x - ex)[0] + u(x + ey)[1] - u(x - ey)[1]) / (2.0 * h);
        let f = self.f(x);
        let mut worst: f64 = (div - self.g(x)).abs();
        for c in 0..2 {
            let fd = -self.epsilon * lap(c) + self.alpha * u(x)[c] + dp[c];
            worst = worst.max((fd - f[c]).abs());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn data_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for id in CaseId::ALL {
            for (eps, alpha) in [(1.0, 1.0), (1e-2, 1.0), (1e-8, 2.0)] {
                let case = ManufacturedCase::new(id, eps, alpha);
                for _ in 0..20 {
                    let x = Vec2::new(rng.random(), rng.random());
                    let scale = 1.0 + case.f(x)[0].abs().max(case.f(x)[1].abs());
                    assert!(case.finite_difference_residual(x, 1e-4) < 1e-6 * scale, "{id:?} eps={eps}");
                }
            }
        }
    }

    #[test]
    fn velocity_vanishes_on_the_boundary() {
        let case = ManufacturedCase::trig(1.0, 1.0);
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            for x in [Vec2::new(0.0, t), Vec2::new(1.0, t), Vec2::new(t, 0.0), Vec2::new(t, 1.0)] {
                assert!(case.u(x)[0].abs() < 1e-15 && case.u(x)[1].abs() < 1e-15);
            }
        }
    }

    #[test]
    fn pressure_has_zero_mean() {
        let case = ManufacturedCase::trig(1.0, 1.0);
        let (x, w) = crate::polybasis::gauss_legendre::<f64>(12);
        let mut total = 0.0;
        for i in 0..12 {
            for j in 0..12 {
                let p = Vec2::new(0.5 * (x[i] + 1.0), 0.5 * (x[j] + 1.0));
                total += 0.25 * w[i] * w[j] * case.p(p);
            }
        }
        assert!(total.abs() < 1e-14);
    }

    #[test]
    fn load_at_quarter_point() {
        let case = ManufacturedCase::trig(1.0, 1.0);
        let f = case.f(Vec2::new(0.25, 0.25));
        let want = 8.0 * PI * PI + 1.0 + 0.25f64.cos().powi(2);
        assert!((f[0] - want).abs() < 1e-12);
        assert!((want - 80.8956).abs() < 1e-4);
    }

    #[test]
    fn case_names_round_trip() {
        for id in CaseId::ALL {
            assert_eq!(CaseId::from_name(id.name()), Some(id));
        }
        assert_eq!(CaseId::from_name("nope"), None);
    }
}
