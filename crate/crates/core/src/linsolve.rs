//! Factor-once, solve-many linear solvers for the assembled FEM matrices.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;

use crate::error::{check_dim, Error, Result};

/// A factorization of a square matrix, chosen by structure: diagonal,
/// banded Cholesky (symmetric, narrow band), dense Cholesky, or dense LU.
#[derive(Debug, Clone)]
pub enum Factorization {
    Diagonal(DVector<f64>),
    Banded(BandedCholesky),
    DenseCholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    DenseLu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl Factorization {
    pub fn new(m: &CsrMatrix<f64>, context: &'static str) -> Result<Self> {
        let n = m.nrows();
        check_dim(context, n, m.ncols())?;
        if m.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context,
                step: None,
            });
        }
        let mut bandwidth = 0;
        for (i, j, v) in m.triplet_iter() {
            if *v != 0.0 {
                bandwidth = bandwidth.max(i.abs_diff(j));
            }
        }
        if bandwidth == 0 {
            let mut d = DVector::zeros(n);
            for (i, _, v) in m.triplet_iter() {
                d[i] += v;
            }
            if d.iter().any(|v| *v == 0.0) {
                return Err(Error::Singular(context));
            }
            return Ok(Factorization::Diagonal(d));
        }
        let symmetric = is_symmetric(m);
        if symmetric && (bandwidth + 1) * 4 <= n {
            if let Some(b) = BandedCholesky::new(m, bandwidth) {
                return Ok(Factorization::Banded(b));
            }
        }
        let dense = DMatrix::from(m);
        Self::dense(dense, symmetric, context)
    }

    pub fn from_dense(m: &DMatrix<f64>, context: &'static str) -> Result<Self> {
        check_dim(context, m.nrows(), m.ncols())?;
        let symmetric = (m - m.transpose()).amax() <= 1e-14 * m.amax();
        Self::dense(m.clone(), symmetric, context)
    }

    fn dense(m: DMatrix<f64>, symmetric: bool, context: &'static str) -> Result<Self> {
        if symmetric {
            if let Some(c) = m.clone().cholesky() {
                return Ok(Factorization::DenseCholesky(c));
            }
        }
        let lu = m.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular(context));
        }
        Ok(Factorization::DenseLu(lu))
    }

    pub fn dim(&self) -> usize {
        match self {
            Factorization::Diagonal(d) => d.len(),
            Factorization::Banded(b) => b.n,
            Factorization::DenseCholesky(c) => c.l_dirty().nrows(),
            Factorization::DenseLu(lu) => lu.l().nrows(),
        }
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = b.clone();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut DVector<f64>) {
        match self {
            Factorization::Diagonal(d) => x.component_div_assign(d),
            Factorization::Banded(b) => b.solve_in_place(x.as_mut_slice()),
            Factorization::DenseCholesky(c) => c.solve_mut(x),
            Factorization::DenseLu(lu) => {
                lu.solve_mut(x);
            }
        }
    }

    /// Solves for every column of `b`.
    pub fn solve_mat(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = b.clone();
        match self {
            Factorization::DenseCholesky(c) => c.solve_mut(&mut x),
            Factorization::DenseLu(lu) => {
                lu.solve_mut(&mut x);
            }
            _ => {
                for mut col in x.column_iter_mut() {
                    let mut v = DVector::from_column_slice(col.as_slice());
                    self.solve_in_place(&mut v);
                    col.copy_from(&v);
                }
            }
        }
        x
    }
}

fn is_symmetric(m: &CsrMatrix<f64>) -> bool {
    let scale = m.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let t = m.transpose();
    let diff = m - &t;
    diff.values().iter().all(|v| v.abs() <= 1e-14 * scale)
}

/// Cholesky factor of a symmetric positive definite band matrix, stored by
/// rows as `L[i][i-b..=i]`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    b: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    fn new(m: &CsrMatrix<f64>, b: usize) -> Option<Self> {
        let n = m.nrows();
        let w = b + 1;
        let mut l = vec![0.0; n * w];
        // Lower band of A, offset so that column j of row i sits at b - (i - j).
        for (i, j, v) in m.triplet_iter() {
            if j <= i {
                l[i * w + b - (i - j)] += v;
            }
        }
        for i in 0..n {
            let j0 = i.saturating_sub(b);
            for j in j0..=i {
                let mut s = l[i * w + b - (i - j)];
                let k0 = j0.max(j.saturating_sub(b));
                for k in k0..j {
                    s -= l[i * w + b - (i - k)] * l[j * w + b - (j - k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return None;
                    }
                    l[i * w + b] = s.sqrt();
                } else {
                    l[i * w + b - (i - j)] = s / l[j * w + b];
                }
            }
        }
        Some(BandedCholesky { n, b, l })
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        for i in 0..n {
            let mut s = x[i];
            for k in i.saturating_sub(b)..i {
                s -= self.l[i * w + b - (i - k)] * x[k];
            }
            x[i] = s / self.l[i * w + b];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n.min(i + b + 1) {
                s -= self.l[k * w + b - (k - i)] * x[k];
            }
            x[i] = s / self.l[i * w + b];
        }
    }
}
