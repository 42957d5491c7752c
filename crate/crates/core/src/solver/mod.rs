//! Monolithic saddle-point system for `(L, u, p)` with a mean-zero
//! pressure multiplier, solved by a sparse symmetric indefinite factorization.
//!
//! Unknown ordering is `[L | u | p | lambda]` and the matrix is
//!
//! ```text
//! [ -M        sqrt(eps) B^T   0     0 ]
//! [ sqrt(eps) B   alpha A     D^T   0 ]
//! [ 0             D           0     c ]
//! [ 0             0           c^T   0 ]
//! ```
//!
//! with right-hand side `(0, F, -G, 0)`.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::sparse::linalg::cholesky::{factorize_symbolic_cholesky, CholeskySymbolicParams, SymmetricOrdering};
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Conj, MatMut, Par, Side};
use thiserror::Error;

use crate::forms::{
    assemble_b, assemble_d, assemble_mass_u, assemble_mass_w, assemble_mean, AssemblyMode, ProblemCoefficients,
    SparseMatrix,
};
use crate::spaces::{DiscreteField, SpaceKind, StaggeredSpaces};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("block dimensions do not match: {0}")]
    Dimension(String),
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("relative residual {0:.3e} exceeds tolerance")]
    Residual(f64),
}

/// Relative algebraic residual accepted by [`solve`].
pub const RESIDUAL_TOL: f64 = 1e-10;
const REFINE_TOL: f64 = 1e-12;
const MAX_REFINE: usize = 20;
const PIVOT_DELTA: f64 = 1e-10;
const PIVOT_EPS: f64 = 1e-13;

/// Coefficient-independent blocks; `A` is the unit-`alpha` velocity mass.
#[derive(Debug, Clone)]
pub struct Blocks {
    pub m: SparseMatrix,
    pub b: SparseMatrix,
    pub a: SparseMatrix,
    pub d: SparseMatrix,
    pub c: Vec<f64>,
}

impl Blocks {
    pub fn assemble(spaces: &StaggeredSpaces, mode: AssemblyMode) -> Self {
        Self {
            m: assemble_mass_w(spaces, mode),
            b: assemble_b(spaces, mode),
            a: assemble_mass_u(spaces, 1.0, mode),
            d: assemble_d(spaces, mode),
            c: assemble_mean(spaces),
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m.nrows, self.a.nrows, self.d.nrows)
    }

    fn check(&self) -> Result<(), SolverError> {
        let (nw, nu, np) = self.dims();
        let ok = self.m.ncols == nw
            && (self.b.nrows, self.b.ncols) == (nu, nw)
            && self.a.ncols == nu
            && (self.d.nrows, self.d.ncols) == (np, nu)
            && self.c.len() == np;
        if ok {
            Ok(())
        } else {
            Err(SolverError::Dimension(format!(
                "M {}x{}, B {}x{}, A {}x{}, D {}x{}, c {}",
                self.m.nrows, self.m.ncols, self.b.nrows, self.b.ncols, self.a.nrows, self.a.ncols, self.d.nrows,
                self.d.ncols, self.c.len()
            )))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub n_w: usize,
    pub n_u: usize,
    pub n_p: usize,
    pub coefficients: ProblemCoefficients,
}

impl SaddleSystem {
    pub fn n_unknowns(&self) -> usize {
        self.n_w + self.n_u + self.n_p + 1
    }
}

pub fn build_system(
    blocks: &Blocks,
    coefficients: ProblemCoefficients,
    f: &[f64],
    g: &[f64],
) -> Result<SaddleSystem, SolverError> {
    blocks.check()?;
    coefficients.validate().map_err(|e| SolverError::Dimension(e.to_string()))?;
    let (nw, nu, np) = blocks.dims();
    if f.len() != nu || g.len() != np {
        return Err(SolverError::Dimension(format!("rhs lengths {} and {} for {nu} and {np}", f.len(), g.len())));
    }
    let se = coefficients.epsilon.sqrt();
    let (ou, op, ol) = (nw, nw + nu, nw + nu + np);
    let n = ol + 1;
    let mut t = Vec::with_capacity(blocks.m.nnz() + 2 * blocks.b.nnz() + blocks.a.nnz() + 2 * blocks.d.nnz() + 2 * np);
    for i in 0..nw {
        t.extend(blocks.m.row(i).map(|(j, v)| (i, j, -v)));
    }
    for i in 0..nu {
        for (j, v) in blocks.b.row(i) {
            t.push((ou + i, j, se * v));
            t.push((j, ou + i, se * v));
        }
        t.extend(blocks.a.row(i).map(|(j, v)| (ou + i, ou + j, coefficients.alpha * v)));
    }
    for m in 0..np {
        for (i, v) in blocks.d.row(m) {
            t.push((op + m, ou + i, v));
            t.push((ou + i, op + m, v));
        }
        if blocks.c[m] != 0.0 {
            t.push((op + m, ol, blocks.c[m]));
            t.push((ol, op + m, blocks.c[m]));
        }
    }
    let mut matrix = SparseMatrix::from_triplets(n, n, &t);
    matrix.symmetric = true;
    let mut rhs = vec![0.0; n];
    rhs[ou..op].copy_from_slice(f);
    for (r, gv) in rhs[op..ol].iter_mut().zip(g) {
        *r = -gv;
    }
    Ok(SaddleSystem { matrix, rhs, n_w: nw, n_u: nu, n_p: np, coefficients })
}

#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub l: DiscreteField,
    pub u: DiscreteField,
    pub p: DiscreteField,
    pub multiplier: f64,
    /// `||K x - b|| / ||b||` (absolute when `b = 0`).
    pub residual: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual(k: &SparseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    k.mul_vec(x).iter().zip(b).map(|(kx, bi)| bi - kx).collect()
}

/// Lower triangle of the symmetric matrix in compressed-column form.
fn lower_csc(k: &SparseMatrix) -> Result<SparseColMat<usize, f64>, SolverError> {
    let n = k.nrows;
    let mut col_ptr = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut values = Vec::new();
    col_ptr.push(0);
    for i in 0..n {
        for (j, v) in k.row(i).filter(|&(j, _)| j >= i) {
            row_idx.push(j);
            values.push(v);
        }
        col_ptr.push(row_idx.len());
    }
    let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
    Ok(SparseColMat::new(symbolic, values))
}

/// Solves with a supernodal `L D L^T` factorization under an approximate
/// minimum degree ordering. Pivots are sign-checked against the inertia of the
/// saddle system (negative on `L` and `p`, positive on `u` and `lambda`); a pivot
/// that vanishes or flips sign is replaced by a small value of the expected
/// sign, and iterative refinement against the exact matrix removes the
/// perturbation. Everything runs sequentially so results are reproducible.
pub fn solve(system: &SaddleSystem) -> Result<DiscreteSolution, SolverError> {
    let par = Par::Seq;
    let k = &system.matrix;
    let n = k.nrows;
    if n != system.n_unknowns() || k.ncols != n {
        return Err(SolverError::Dimension(format!("matrix {}x{} for {} unknowns", k.nrows, k.ncols, system.n_unknowns())));
    }
    let lower = lower_csc(k)?;
    let symbolic = factorize_symbolic_cholesky(
        lower.symbolic(),
        Side::Lower,
        SymmetricOrdering::Amd,
        CholeskySymbolicParams::default(),
    )
    .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
    let (ou, op) = (system.n_w, system.n_w + system.n_u);
    let signs: Vec<i8> = (0..n).map(|i| if i < ou || (op..n - 1).contains(&i) { -1 } else { 1 }).collect();
    let kmax = k.max_abs();
    let regularization = LdltRegularization {
        dynamic_regularization_signs: Some(&signs),
        dynamic_regularization_delta: PIVOT_DELTA * kmax,
        dynamic_regularization_epsilon: PIVOT_EPS * kmax,
    };
    let mut values = vec![0.0; symbolic.len_val()];
    let mut buf = MemBuffer::new(
        symbolic
            .factorize_numeric_ldlt_scratch::<f64>(par, Default::default())
            .or(symbolic.solve_in_place_scratch::<f64>(1, par)),
    );
    let ldlt = symbolic
        .factorize_numeric_ldlt(&mut values, lower.as_ref(), Side::Lower, regularization, par, MemStack::new(&mut buf), Default::default())
        .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
    drop(lower);
    let mut apply = |r: &[f64]| -> Vec<f64> {
        let mut x = r.to_vec();
        let col = MatMut::from_column_major_slice_mut(&mut x, n, 1);
        ldlt.solve_in_place_with_conj(Conj::No, col, par, MemStack::new(&mut buf));
        x
    };
    let bnorm = norm(&system.rhs);
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let mut x = apply(&system.rhs);
    let mut r = residual(k, &x, &system.rhs);
    let mut rel = norm(&r) / scale;
    for _ in 0..MAX_REFINE {
        if rel <= REFINE_TOL || !rel.is_finite() {
            break;
        }
        let dx = apply(&r);
        x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
        r = residual(k, &x, &system.rhs);
        rel = norm(&r) / scale;
    }
    if !(rel <= RESIDUAL_TOL) {
        return Err(SolverError::Residual(rel));
    }
    let (ou, op, ol) = (system.n_w, system.n_w + system.n_u, system.n_w + system.n_u + system.n_p);
    Ok(DiscreteSolution {
        l: DiscreteField { kind: SpaceKind::W, coeffs: x[..ou].to_vec() },
        u: DiscreteField { kind: SpaceKind::U, coeffs: x[ou..op].to_vec() },
        p: DiscreteField { kind: SpaceKind::P, coeffs: x[op..ol].to_vec() },
        multiplier: x[ol],
        residual: rel,
    })
}
