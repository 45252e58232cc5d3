use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::matrix::LinearOperator;

/// Zonotope `⟨c, G⟩ = {c + G ξ : ξ ∈ [-1, 1]ᵖ}`; `p = 0` is a singleton.
#[derive(Debug, Clone, PartialEq)]
pub struct Zonotope {
    center: DVector<f64>,
    generators: DMatrix<f64>,
}

impl Zonotope {
    pub fn new(center: DVector<f64>, generators: DMatrix<f64>) -> Result<Self> {
        check_dim("zonotope generators rows", center.len(), generators.nrows())?;
        Ok(Zonotope { center, generators })
    }

    pub fn singleton(x: DVector<f64>) -> Self {
        let n = x.len();
        Zonotope {
            center: x,
            generators: DMatrix::zeros(n, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn order(&self) -> usize {
        self.generators.ncols()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    /// `ρ(d, Z) = dᵀc + ‖Gᵀd‖₁`.
    pub fn support(&self, d: &DVector<f64>) -> Result<f64> {
        check_dim("zonotope support direction", self.dim(), d.len())?;
        Ok(self.support_unchecked(d))
    }

    pub(crate) fn support_unchecked(&self, d: &DVector<f64>) -> f64 {
        let mut s = d.dot(&self.center);
        for g in self.generators.column_iter() {
            s += g.dot(d).abs();
        }
        s
    }

    /// `⟨Mc, MG⟩`.
    pub fn linear_map(&self, m: &LinearOperator) -> Result<Zonotope> {
        check_dim("zonotope linear map columns", self.dim(), m.ncols())?;
        Ok(Zonotope {
            center: m.mul_vec(&self.center),
            generators: m.mul_mat(&self.generators),
        })
    }

    /// Row-wise absolute sums of `G`: the radius of the tight enclosing box.
    pub fn box_radius(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.generators
                .row_iter()
                .map(|row| row.iter().map(|v| v.abs()).sum::<f64>()),
        )
    }

    /// Point `c + Gξ` for a coefficient vector `ξ ∈ [-1, 1]ᵖ`.
    pub fn point(&self, xi: &[f64]) -> Result<DVector<f64>> {
        check_dim("zonotope coefficients", self.order(), xi.len())?;
        Ok(&self.center + &self.generators * DVector::from_column_slice(xi))
    }

    /// Area of a planar zonotope, `4 Σ_{i<j} |det(gᵢ, gⱼ)|` (coefficients range over [-1, 1]).
    pub fn area(&self) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::InvalidArgument(format!(
                "area is defined for planar zonotopes, got dimension {}",
                self.dim()
            )));
        }
        let g = &self.generators;
        let p = g.ncols();
        let mut a = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                a += (g[(0, i)] * g[(1, j)] - g[(1, i)] * g[(0, j)]).abs();
            }
        }
        Ok(4.0 * a)
    }
}

/// Image of a zonotope under a linear map.
pub fn linear_map_zonotope(m: &LinearOperator, z: &Zonotope) -> Result<Zonotope> {
    z.linear_map(m)
}

/// Support function of a zonotope along `d`.
pub fn support_zonotope(z: &Zonotope, d: &DVector<f64>) -> Result<f64> {
    z.support(d)
}
