use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::mesh::{EdgeKind, Vec2};
use crate::spaces::{Sample, SpaceKind, StaggeredSpaces};

/// Discrete norms of the staggered spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormId {
    /// Plain `L2` norm, any space.
    L2,
    /// `||v||_0^2 + sum_{F_p} h_e ||v.n||_e^2`.
    X1,
    /// `||div_h v||_0^2 + sum_{F_u} h_e^{-1} ||[v.n]||_e^2`.
    Z1,
    /// `||grad_h v||_0^2 + sum_{F_u} h_e^{-1} ||[v]||_e^2 + sum_{F_p} h_e^{-1} ||[(v.t) t]||_e^2`.
    Z2,
    /// `||G||_0^2 + sum_{F_u} h_e ||G n||_e^2 + sum_{F_p} h_e ||(G n).t||_e^2`.
    Xprime,
    /// `||div_h G||_0^2 + sum_{F_p} h_e^{-1} ||[G n]||_e^2`.
    Zprime,
    /// `||q||_0^2 + sum_{F_u} h_e ||q||_e^2`.
    P0h,
    /// `||grad_h q||_0^2 + sum_{F_p} h_e^{-1} ||[q]||_e^2`.
    P1h,
}

impl NormId {
    pub const ALL: [NormId; 8] =
        [NormId::L2, NormId::X1, NormId::Z1, NormId::Z2, NormId::Xprime, NormId::Zprime, NormId::P0h, NormId::P1h];

    pub fn space(self) -> Option<SpaceKind> {
        match self {
            NormId::L2 => None,
            NormId::X1 | NormId::Z1 | NormId::Z2 => Some(SpaceKind::U),
            NormId::Xprime | NormId::Zprime => Some(SpaceKind::W),
            NormId::P0h | NormId::P1h => Some(SpaceKind::P),
        }
    }
}

#[derive(Clone, Copy)]
enum Volume {
    Value,
    Grad,
    Div,
}

#[derive(Clone, Copy, PartialEq)]
enum Trace {
    /// `v.n` or `q`.
    Normal,
    /// `v`, or `G n`.
    Full,
    /// `v.t`, or `(G n).t`.
    Tangential,
}

struct EdgeTerm {
    family: EdgeKind,
    jump: bool,
    trace: Trace,
}

fn terms(norm: NormId) -> (Volume, Vec<EdgeTerm>) {
    use EdgeKind::{Dual, PrimalInterior};
    let t = |family, jump, trace| EdgeTerm { family, jump, trace };
    match norm {
        NormId::L2 => (Volume::Value, vec![]),
        NormId::X1 => (Volume::Value, vec![t(Dual, false, Trace::Normal)]),
        NormId::Z1 => (Volume::Div, vec![t(PrimalInterior, true, Trace::Normal)]),
        NormId::Z2 => (Volume::Grad, vec![t(PrimalInterior, true, Trace::Full), t(Dual, true, Trace::Tangential)]),
        NormId::Xprime => (Volume::Value, vec![t(PrimalInterior, false, Trace::Full), t(Dual, false, Trace::Tangential)]),
        NormId::Zprime => (Volume::Div, vec![t(Dual, true, Trace::Full)]),
        NormId::P0h => (Volume::Value, vec![t(PrimalInterior, false, Trace::Normal)]),
        NormId::P1h => (Volume::Grad, vec![t(Dual, true, Trace::Normal)]),
    }
}

fn volume_density(kind: SpaceKind, vol: Volume, s: &Sample) -> f64 {
    let nc = kind.components();
    match vol {
        Volume::Value => s.value[..nc].iter().map(|v| v * v).sum(),
        Volume::Grad => s.grad[..nc].iter().map(|g| g[0] * g[0] + g[1] * g[1]).sum(),
        Volume::Div => match kind {
            SpaceKind::U => (s.grad[0][0] + s.grad[1][1]).powi(2),
            SpaceKind::W => (s.grad[0][0] + s.grad[1][1]).powi(2) + (s.grad[2][0] + s.grad[3][1]).powi(2),
            SpaceKind::P => s.grad[0][0].powi(2),
        },
    }
}

/// Trace quantity on an edge; up to two components.
fn trace(kind: SpaceKind, tr: Trace, s: &Sample, n: Vec2, t: Vec2) -> [f64; 2] {
    let v = &s.value;
    let full = match kind {
        SpaceKind::U => [v[0], v[1]],
        SpaceKind::W => [v[0] * n.x + v[1] * n.y, v[2] * n.x + v[3] * n.y],
        SpaceKind::P => [v[0], 0.0],
    };
    match (kind, tr) {
        (SpaceKind::P, _) => full,
        (_, Trace::Full) => full,
        (_, Trace::Normal) => [full[0] * n.x + full[1] * n.y, 0.0],
        (_, Trace::Tangential) => [full[0] * t.x + full[1] * t.y, 0.0],
    }
}

/// Norm of a triangle-wise function `f(tri, x)` regarded as an element of
/// the broken space of `kind`. Traces on edges are taken from each adjacent
/// triangle; value terms average the one-sided squares, jump terms use the
/// signed sum (one-sided on the boundary).
pub fn norm_eval<F>(spaces: &StaggeredSpaces, kind: SpaceKind, norm: NormId, f: F, degree: usize) -> Result<f64, VerifyError>
where
    F: Fn(usize, Vec2) -> Sample + Sync,
{
    if let Some(space) = norm.space() {
        if space != kind {
            return Err(VerifyError::IncompatibleNorm { norm, kind });
        }
    }
    let (vol, edge_terms) = terms(norm);
    let mesh = &spaces.mesh;
    let mut total = 0.0;
    for t in 0..mesh.n_triangles() {
        let (pts, wts) = spaces.triangle_rule(t, degree)?;
        for (x, w) in pts.iter().zip(&wts) {
            total += w * volume_density(kind, vol, &f(t, *x));
        }
    }
    for term in &edge_terms {
        for (e, edge) in mesh.edges.iter().enumerate() {
            let in_family = match term.family {
                EdgeKind::Dual => edge.kind == EdgeKind::Dual,
                _ => edge.kind.is_primal(),
            };
            if !in_family {
                continue;
            }
            let scale = if term.jump { 1.0 / edge.length } else { edge.length };
            let (pts, wts) = spaces.edge_rule(e, degree)?;
            let sides = edge.adjacency.len() as f64;
            for (x, w) in pts.iter().zip(&wts) {
                let mut jump = [0.0; 2];
                let mut mean_sq = 0.0;
                for adj in &edge.adjacency {
                    let q = trace(kind, term.trace, &f(adj.triangle, *x), edge.normal, edge.tangent);
                    jump[0] += adj.sign * q[0];
                    jump[1] += adj.sign * q[1];
                    mean_sq += (q[0] * q[0] + q[1] * q[1]) / sides;
                }
                let density = if term.jump { jump[0] * jump[0] + jump[1] * jump[1] } else { mean_sq };
                total += scale * w * density;
            }
        }
    }
    Ok(total.max(0.0).sqrt())
}
