use nalgebra::{DMatrix, DVector};

use super::Zonotope;
use crate::error::{check_dim, Error, Result};

/// Axis-aligned box `{x : |xᵢ - cᵢ| ≤ rᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperrectangle {
    center: DVector<f64>,
    radius: DVector<f64>,
}

impl Hyperrectangle {
    pub fn new(center: DVector<f64>, radius: DVector<f64>) -> Result<Self> {
        check_dim("hyperrectangle radius", center.len(), radius.len())?;
        if let Some(r) = radius.iter().find(|r| !(**r >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "hyperrectangle radius must be nonnegative, got {r}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) || radius.iter().any(|r| !r.is_finite()) {
            return Err(Error::NonFinite {
                context: "hyperrectangle",
                step: None,
            });
        }
        Ok(Hyperrectangle { center, radius })
    }

    pub fn from_slices(center: &[f64], radius: &[f64]) -> Result<Self> {
        Self::new(
            DVector::from_column_slice(center),
            DVector::from_column_slice(radius),
        )
    }

    /// Box with the given lower and upper corners.
    pub fn from_bounds(lo: &DVector<f64>, hi: &DVector<f64>) -> Result<Self> {
        check_dim("hyperrectangle bounds", lo.len(), hi.len())?;
        Self::new((lo + hi) * 0.5, (hi - lo) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn radius(&self) -> &DVector<f64> {
        &self.radius
    }

    pub fn low(&self) -> DVector<f64> {
        &self.center - &self.radius
    }

    pub fn high(&self) -> DVector<f64> {
        &self.center + &self.radius
    }

    pub fn support(&self, d: &DVector<f64>) -> Result<f64> {
        check_dim("hyperrectangle support direction", self.dim(), d.len())?;
        Ok(self.support_unchecked(d))
    }

    pub(crate) fn support_unchecked(&self, d: &DVector<f64>) -> f64 {
        d.iter()
            .zip(self.center.iter().zip(self.radius.iter()))
            .map(|(di, (ci, ri))| di * ci + di.abs() * ri)
            .sum()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.center.iter().zip(self.radius.iter()))
                .all(|(xi, (ci, ri))| (xi - ci).abs() <= *ri)
    }

    /// Lossless conversion: generators are the columns of `diag(r)`.
    pub fn to_zonotope(&self) -> Zonotope {
        Zonotope::new(
            self.center.clone(),
            DMatrix::from_diagonal(&self.radius),
        )
        .expect("box dimensions are consistent")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_radius_rejected() {
        assert!(Hyperrectangle::from_slices(&[0.0], &[-1.0]).is_err());
        assert!(Hyperrectangle::from_slices(&[0.0, 1.0], &[1.0]).is_err());
        assert!(Hyperrectangle::from_slices(&[0.0], &[f64::NAN]).is_err());
    }

    #[test]
    fn zonotope_conversion_preserves_canonical_supports() {
        let h = Hyperrectangle::from_slices(&[1.0, -2.0, 0.5], &[0.1, 0.0, 3.0]).unwrap();
        let z = h.to_zonotope();
        for i in 0..3 {
            for s in [1.0, -1.0] {
                let mut d = DVector::zeros(3);
                d[i] = s;
                assert_eq!(h.support(&d).unwrap(), z.support(&d).unwrap());
            }
        }
    }

    #[test]
    fn degenerate_box_contains_only_center() {
        let h = Hyperrectangle::from_slices(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(h.contains(&DVector::from_vec(vec![1.0, 0.0])));
        assert!(!h.contains(&DVector::from_vec(vec![1.0, 1e-12])));
    }
}
