use nalgebra::DMatrix;
use nalgebra_sparse::CsrMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linsolve::Factorization;
use crate::matrix::{csr_from_triplets, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    /// `C θ̇ + K θ = f`.
    Heat,
    /// `M ü + C u̇ + K u = f`.
    Dynamics,
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Heat => "heat",
            SystemKind::Dynamics => "dynamics",
        }
    }
}

/// Assembled FEM matrices. For heat problems `damping` holds the capacity
/// matrix and `mass` is absent.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderSystem {
    kind: SystemKind,
    mass: Option<CsrMatrix<f64>>,
    damping: CsrMatrix<f64>,
    stiffness: CsrMatrix<f64>,
}

impl SecondOrderSystem {
    pub fn heat(capacity: CsrMatrix<f64>, conduction: CsrMatrix<f64>) -> Result<Self> {
        let n = capacity.nrows();
        check_dim("capacity matrix (square)", n, capacity.ncols())?;
        check_dim("conduction matrix rows", n, conduction.nrows())?;
        check_dim("conduction matrix cols", n, conduction.ncols())?;
        if n == 0 {
            return Err(Error::InvalidArgument("empty system".into()));
        }
        Ok(SecondOrderSystem {
            kind: SystemKind::Heat,
            mass: None,
            damping: capacity,
            stiffness: conduction,
        })
    }

    pub fn dynamics(
        mass: CsrMatrix<f64>,
        damping: CsrMatrix<f64>,
        stiffness: CsrMatrix<f64>,
    ) -> Result<Self> {
        let n = mass.nrows();
        check_dim("mass matrix (square)", n, mass.ncols())?;
        for (m, what) in [(&damping, "damping matrix"), (&stiffness, "stiffness matrix")] {
            check_dim(what, n, m.nrows())?;
            check_dim(what, n, m.ncols())?;
        }
        if n == 0 {
            return Err(Error::InvalidArgument("empty system".into()));
        }
        Ok(SecondOrderSystem {
            kind: SystemKind::Dynamics,
            mass: Some(mass),
            damping,
            stiffness,
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    /// Number of equations (nodal unknowns).
    pub fn dofs(&self) -> usize {
        self.stiffness.nrows()
    }

    /// Dimension of the first-order state: `n` for heat, `2n` for dynamics.
    pub fn state_dim(&self) -> usize {
        match self.kind {
            SystemKind::Heat => self.dofs(),
            SystemKind::Dynamics => 2 * self.dofs(),
        }
    }

    pub fn mass(&self) -> Option<&CsrMatrix<f64>> {
        self.mass.as_ref()
    }

    pub fn damping(&self) -> &CsrMatrix<f64> {
        &self.damping
    }

    pub fn stiffness(&self) -> &CsrMatrix<f64> {
        &self.stiffness
    }

    /// The matrix multiplying the highest derivative (`C` for heat, `M` for dynamics).
    pub fn leading(&self) -> &CsrMatrix<f64> {
        self.mass.as_ref().unwrap_or(&self.damping)
    }

    pub(crate) fn factor_leading(&self) -> Result<Factorization> {
        let what = match self.kind {
            SystemKind::Heat => "capacity matrix",
            SystemKind::Dynamics => "mass matrix",
        };
        Factorization::new(self.leading(), what)
    }
}

/// `−C⁻¹K` by factorization and column solves.
pub fn heat_first_order(sys: &SecondOrderSystem) -> Result<LinearOperator> {
    if sys.kind() != SystemKind::Heat {
        return Err(Error::InvalidArgument(
            "heat_first_order needs a heat system".into(),
        ));
    }
    let f = sys.factor_leading()?;
    Ok(solve_operator(&f, sys.stiffness(), -1.0))
}

/// Companion form `[[0, I], [−M⁻¹K, −M⁻¹C]]`.
pub fn dynamics_first_order(sys: &SecondOrderSystem) -> Result<LinearOperator> {
    if sys.kind() != SystemKind::Dynamics {
        return Err(Error::InvalidArgument(
            "dynamics_first_order needs a dynamics system".into(),
        ));
    }
    let n = sys.dofs();
    let f = sys.factor_leading()?;
    let k = solve_operator(&f, sys.stiffness(), -1.0);
    let c = solve_operator(&f, sys.damping(), -1.0);
    let mut t: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, n + i, 1.0)).collect();
    push_block(&mut t, &k, n, 0);
    push_block(&mut t, &c, n, n);
    let sparse = matches!(k, LinearOperator::Sparse(_));
    let csr = csr_from_triplets(2 * n, 2 * n, &t)?;
    Ok(if sparse {
        LinearOperator::Sparse(csr)
    } else {
        LinearOperator::Dense(DMatrix::from(&csr))
    })
}

/// `s · L⁻¹ B`; sparse when `L` is diagonal, dense otherwise.
pub(crate) fn solve_operator(f: &Factorization, b: &CsrMatrix<f64>, s: f64) -> LinearOperator {
    match f {
        Factorization::Diagonal(d) => {
            let mut out = b.clone();
            let (offsets, _, values) = out.csr_data_mut();
            for i in 0..offsets.len() - 1 {
                for v in &mut values[offsets[i]..offsets[i + 1]] {
                    *v *= s / d[i];
                }
            }
            LinearOperator::Sparse(out)
        }
        _ => LinearOperator::Dense(f.solve_mat(&DMatrix::from(b)) * s),
    }
}

pub(crate) fn push_block(
    t: &mut Vec<(usize, usize, f64)>,
    block: &LinearOperator,
    row0: usize,
    col0: usize,
) {
    match block {
        LinearOperator::Sparse(m) => {
            for (i, j, v) in m.triplet_iter() {
                if *v != 0.0 {
                    t.push((row0 + i, col0 + j, *v));
                }
            }
        }
        LinearOperator::Dense(m) => {
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    let v = m[(i, j)];
                    if v != 0.0 {
                        t.push((row0 + i, col0 + j, v));
                    }
                }
            }
        }
    }
}
