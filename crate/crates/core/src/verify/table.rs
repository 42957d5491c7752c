use serde::{Deserialize, Serialize};

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// Number of primal cells per side (`h^{-1}` for square grids).
    pub level: usize,
    /// Largest submesh triangle diameter.
    pub h: f64,
    pub n_dof: usize,
    pub err_u: f64,
    pub err_l: f64,
    pub err_p: f64,
    /// `||J_h u - u_h||_0`.
    pub err_super: f64,
    /// `sqrt(eps) ||u - u_h||_{Z2}`.
    pub err_z2_scaled: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    U,
    L,
    P,
    Super,
    Z2Scaled,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::U, Metric::L, Metric::P, Metric::Super, Metric::Z2Scaled];

    pub fn of(self, row: &ConvergenceRow) -> f64 {
        match self {
            Metric::U => row.err_u,
            Metric::L => row.err_l,
            Metric::P => row.err_p,
            Metric::Super => row.err_super,
            Metric::Z2Scaled => row.err_z2_scaled,
        }
    }
}

/// Errors per level for one `(k, epsilon)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub k: usize,
    pub epsilon: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn new(k: usize, epsilon: f64) -> Self {
        Self { k, epsilon, rows: Vec::new() }
    }

    /// `log2(e_{i-1} / e_i)`, defined only when level `i` halves the mesh
    /// size of level `i - 1` and both errors are positive.
    pub fn order(&self, i: usize, metric: Metric) -> Option<f64> {
        if i == 0 || i >= self.rows.len() {
            return None;
        }
        let (prev, cur) = (&self.rows[i - 1], &self.rows[i]);
        if cur.level != 2 * prev.level {
            return None;
        }
        let (a, b) = (metric.of(prev), metric.of(cur));
        if a > 0.0 && b > 0.0 {
            Some((a / b).log2())
        } else {
            None
        }
    }

    pub fn row_for_level(&self, level: usize) -> Option<(usize, &ConvergenceRow)> {
        self.rows.iter().enumerate().find(|(_, r)| r.level == level)
    }

    /// Order at the finest level.
    pub fn final_order(&self, metric: Metric) -> Option<f64> {
        self.order(self.rows.len().checked_sub(1)?, metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(level: usize, e: f64) -> ConvergenceRow {
        ConvergenceRow { level, h: 1.0 / level as f64, n_dof: 0, err_u: e, err_l: e, err_p: e, err_super: e, err_z2_scaled: 0.0 }
    }

    #[test]
    fn orders_only_between_halved_levels() {
        let mut t = ConvergenceTable::new(1, 1.0);
        t.rows = vec![row(2, 1.0), row(4, 0.25), row(6, 0.1), row(12, 0.0125)];
        assert_eq!(t.order(0, Metric::U), None);
        assert!((t.order(1, Metric::U).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(t.order(2, Metric::U), None);
        assert!((t.order(3, Metric::U).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(t.order(3, Metric::Z2Scaled), None);
        assert_eq!(t.final_order(Metric::P), t.order(3, Metric::P));
        assert_eq!(ConvergenceTable::new(1, 1.0).final_order(Metric::U), None);
    }
}
