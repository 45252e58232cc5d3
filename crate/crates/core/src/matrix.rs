//! Dense/sparse linear operators shared by the set calculus, the model
//! builders and the propagation schemes.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{check_dim, Error, Result};

/// A real matrix stored either densely or in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearOperator {
    Dense(DMatrix<f64>),
    Sparse(CsrMatrix<f64>),
}

impl LinearOperator {
    pub fn nrows(&self) -> usize {
        match self {
            LinearOperator::Dense(m) => m.nrows(),
            LinearOperator::Sparse(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            LinearOperator::Dense(m) => m.ncols(),
            LinearOperator::Sparse(m) => m.ncols(),
        }
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(x.len(), self.ncols());
        match self {
            LinearOperator::Dense(m) => m * x,
            LinearOperator::Sparse(m) => {
                let mut y = DVector::zeros(m.nrows());
                for (i, row) in m.row_iter().enumerate() {
                    let mut acc = 0.0;
                    for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                        acc += v * x[j];
                    }
                    y[i] = acc;
                }
                y
            }
        }
    }

    /// `Mᵀ d`, the pull-back used by support functions.
    pub fn tr_mul_vec(&self, d: &DVector<f64>) -> DVector<f64> {
        debug_assert_eq!(d.len(), self.nrows());
        match self {
            LinearOperator::Dense(m) => m.tr_mul(d),
            LinearOperator::Sparse(m) => {
                let mut y = DVector::zeros(m.ncols());
                for (i, row) in m.row_iter().enumerate() {
                    let di = d[i];
                    if di == 0.0 {
                        continue;
                    }
                    for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                        y[j] += v * di;
                    }
                }
                y
            }
        }
    }

    /// `M G` for a dense right-hand side.
    pub fn mul_mat(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            LinearOperator::Dense(m) => m * g,
            LinearOperator::Sparse(m) => {
                let mut out = DMatrix::zeros(m.nrows(), g.ncols());
                for (i, row) in m.row_iter().enumerate() {
                    for (&j, &v) in row.col_indices().iter().zip(row.values()) {
                        for c in 0..g.ncols() {
                            out[(i, c)] += v * g[(j, c)];
                        }
                    }
                }
                out
            }
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            LinearOperator::Dense(m) => m.clone(),
            LinearOperator::Sparse(m) => DMatrix::from(m),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            LinearOperator::Dense(m) => m.iter().all(|v| v.is_finite()),
            LinearOperator::Sparse(m) => m.values().iter().all(|v| v.is_finite()),
        }
    }

    /// Entrywise absolute value, keeping the storage kind.
    pub fn abs(&self) -> LinearOperator {
        match self {
            LinearOperator::Dense(m) => LinearOperator::Dense(m.abs()),
            LinearOperator::Sparse(m) => {
                let mut a = m.clone();
                for v in a.values_mut() {
                    *v = v.abs();
                }
                LinearOperator::Sparse(a)
            }
        }
    }
}

impl From<DMatrix<f64>> for LinearOperator {
    fn from(m: DMatrix<f64>) -> Self {
        LinearOperator::Dense(m)
    }
}

impl From<CsrMatrix<f64>> for LinearOperator {
    fn from(m: CsrMatrix<f64>) -> Self {
        LinearOperator::Sparse(m)
    }
}

/// Square state matrix `A` of a first-order linear system, also used for the
/// transition matrix `Φ = e^{Aδ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrix(LinearOperator);

impl StateMatrix {
    pub fn new(op: impl Into<LinearOperator>) -> Result<Self> {
        let op = op.into();
        check_dim("state matrix (square)", op.nrows(), op.ncols())?;
        if !op.is_finite() {
            return Err(Error::NonFinite {
                context: "state matrix",
                step: None,
            });
        }
        Ok(StateMatrix(op))
    }

    pub fn dense(m: DMatrix<f64>) -> Result<Self> {
        Self::new(LinearOperator::Dense(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn op(&self) -> &LinearOperator {
        &self.0
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.0.to_dense()
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        self.0.mul_vec(x)
    }

    pub fn tr_mul_vec(&self, d: &DVector<f64>) -> DVector<f64> {
        self.0.tr_mul_vec(d)
    }

    pub fn mul_mat(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        self.0.mul_mat(g)
    }
}

/// Builds a CSR matrix from 0-based `(row, col, value)` triplets; duplicates are summed.
pub fn csr_from_triplets(
    nrows: usize,
    ncols: usize,
    triplets: &[(usize, usize, f64)],
) -> Result<CsrMatrix<f64>> {
    let mut coo = CooMatrix::new(nrows, ncols);
    for &(i, j, v) in triplets {
        if i >= nrows || j >= ncols {
            return Err(Error::InvalidArgument(format!(
                "entry ({}, {}) outside a {nrows}x{ncols} matrix",
                i + 1,
                j + 1
            )));
        }
        coo.push(i, j, v);
    }
    Ok(CsrMatrix::from(&coo))
}

/// True when every off-diagonal entry is exactly zero.
pub fn is_diagonal(m: &CsrMatrix<f64>) -> bool {
    m.triplet_iter().all(|(i, j, v)| i == j || *v == 0.0)
}
