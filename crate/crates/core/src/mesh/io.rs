use std::fmt::Write;

use super::primal::DEFAULT_RHO;
use super::{MeshError, PrimalMesh, Vec2};

/// Parses the plain-text polygon format:
///
/// ```text
/// NV NP
/// x y            (NV lines)
/// m i1 ... im    (NP lines, 0-based counterclockwise vertex indices)
/// ```
///
/// Everything after `#` on a line is ignored, as are blank lines.
pub fn import_polygon_mesh(text: &str) -> Result<PrimalMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let parse_err = |line: usize, message: String| MeshError::Parse { line, message };
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| parse_err(hline, format!("bad count {t:?}: {e}"))))
        .collect::<Result<_, _>>()?;
    let [nv, np] = counts[..] else {
        return Err(parse_err(hline, "header must be `NV NP`".into()));
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(hline, format!("expected {nv} vertices")))?;
        let xy: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(ln, format!("bad coordinate {t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        let [x, y] = xy[..] else {
            return Err(parse_err(ln, "vertex line must be `x y`".into()));
        };
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(ln, "non-finite coordinate".into()));
        }
        vertices.push(Vec2::new(x, y));
    }

    let mut cycles = Vec::with_capacity(np);
    for _ in 0..np {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(hline, format!("expected {np} polygons")))?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| parse_err(ln, format!("bad index {t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        let Some((&m, rest)) = ids.split_first() else {
            return Err(parse_err(ln, "empty polygon line".into()));
        };
        if rest.len() != m {
            return Err(parse_err(ln, format!("polygon declares {m} vertices but lists {}", rest.len())));
        }
        if let Some(&bad) = rest.iter().find(|&&i| i >= nv) {
            return Err(parse_err(ln, format!("vertex index {bad} out of range")));
        }
        cycles.push(rest.to_vec());
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content after last polygon".into()));
    }
    PrimalMesh::from_cycles(vertices, cycles, DEFAULT_RHO)
}

/// Writes a mesh in the format read by [`import_polygon_mesh`].
pub fn export_polygon_mesh(mesh: &PrimalMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", mesh.vertices.len(), mesh.polygons.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?}", v.x, v.y);
    }
    for p in &mesh.polygons {
        let _ = write!(s, "{}", p.vertices.len());
        for i in &p.vertices {
            let _ = write!(s, " {i}");
        }
        s.push('\n');
    }
    s
}
