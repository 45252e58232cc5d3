//! Lazy convex-set expressions evaluated through support functions.
//!
//! Nodes are immutable and reference-counted, so sub-expressions (for instance
//! the initial set `X₀`, which appears four times in the discretized set `Ω₀`)
//! are shared rather than copied. Nothing is cached: every query re-walks the
//! tree.

use std::sync::Arc;

use nalgebra::DVector;

use super::{Hyperrectangle, Zonotope};
use crate::error::{check_dim, Error, Result};
use crate::matrix::LinearOperator;

#[derive(Debug)]
enum Node {
    Zonotope(Zonotope),
    Box(Hyperrectangle),
    LinearMap(Arc<LinearOperator>, SetExpression),
    MinkowskiSum(SetExpression, SetExpression),
    ConvexHull(SetExpression, SetExpression),
    Intersection(SetExpression, SetExpression),
    CartesianProduct(Vec<SetExpression>),
}

/// A convex set built symbolically from leaves (zonotopes, boxes, singletons)
/// and the operations linear map, Minkowski sum, convex hull of the union,
/// intersection and Cartesian product.
#[derive(Debug, Clone)]
pub struct SetExpression {
    node: Arc<Node>,
    dim: usize,
}

impl SetExpression {
    pub fn zonotope(z: Zonotope) -> Self {
        let dim = z.dim();
        SetExpression {
            node: Arc::new(Node::Zonotope(z)),
            dim,
        }
    }

    pub fn hyperrectangle(h: Hyperrectangle) -> Self {
        let dim = h.dim();
        SetExpression {
            node: Arc::new(Node::Box(h)),
            dim,
        }
    }

    /// Singletons are zero-generator zonotopes.
    pub fn singleton(x: DVector<f64>) -> Self {
        Self::zonotope(Zonotope::singleton(x))
    }

    pub fn linear_map(m: impl Into<Arc<LinearOperator>>, x: &SetExpression) -> Result<Self> {
        let m = m.into();
        check_dim("linear map columns", x.dim, m.ncols())?;
        let dim = m.nrows();
        Ok(SetExpression {
            node: Arc::new(Node::LinearMap(m, x.clone())),
            dim,
        })
    }

    pub fn minkowski_sum(x: &SetExpression, y: &SetExpression) -> Result<Self> {
        check_dim("minkowski sum", x.dim, y.dim)?;
        Ok(SetExpression {
            node: Arc::new(Node::MinkowskiSum(x.clone(), y.clone())),
            dim: x.dim,
        })
    }

    pub fn convex_hull(x: &SetExpression, y: &SetExpression) -> Result<Self> {
        check_dim("convex hull", x.dim, y.dim)?;
        Ok(SetExpression {
            node: Arc::new(Node::ConvexHull(x.clone(), y.clone())),
            dim: x.dim,
        })
    }

    pub fn intersection(x: &SetExpression, y: &SetExpression) -> Result<Self> {
        check_dim("intersection", x.dim, y.dim)?;
        Ok(SetExpression {
            node: Arc::new(Node::Intersection(x.clone(), y.clone())),
            dim: x.dim,
        })
    }

    pub fn cartesian_product(parts: &[SetExpression]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument(
                "cartesian product needs at least one factor".into(),
            ));
        }
        if let Some(p) = parts.iter().find(|p| p.dim == 0) {
            return Err(Error::InvalidArgument(format!(
                "cartesian product factor has dimension {}",
                p.dim
            )));
        }
        if parts.len() == 1 {
            return Ok(parts[0].clone());
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        Ok(SetExpression {
            node: Arc::new(Node::CartesianProduct(parts.to_vec())),
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The leaf box, when this expression is one.
    pub fn as_hyperrectangle(&self) -> Option<&Hyperrectangle> {
        match &*self.node {
            Node::Box(h) => Some(h),
            _ => None,
        }
    }

    pub fn as_zonotope(&self) -> Option<&Zonotope> {
        match &*self.node {
            Node::Zonotope(z) => Some(z),
            _ => None,
        }
    }

    /// Support function `ρ(d, S)`; for intersection nodes this is the
    /// overapproximation `min(ρ(d, X), ρ(d, Y))`.
    pub fn support(&self, d: &DVector<f64>) -> Result<f64> {
        check_dim("support direction", self.dim, d.len())?;
        Ok(self.support_unchecked(d))
    }

    pub(crate) fn support_unchecked(&self, d: &DVector<f64>) -> f64 {
        match &*self.node {
            Node::Zonotope(z) => z.support_unchecked(d),
            Node::Box(h) => h.support_unchecked(d),
            Node::LinearMap(m, x) => x.support_unchecked(&m.tr_mul_vec(d)),
            Node::MinkowskiSum(x, y) => x.support_unchecked(d) + y.support_unchecked(d),
            Node::ConvexHull(x, y) => x.support_unchecked(d).max(y.support_unchecked(d)),
            Node::Intersection(x, y) => x.support_unchecked(d).min(y.support_unchecked(d)),
            Node::CartesianProduct(parts) => {
                let mut offset = 0;
                let mut s = 0.0;
                for p in parts {
                    let slice = d.rows(offset, p.dim).into_owned();
                    s += p.support_unchecked(&slice);
                    offset += p.dim;
                }
                s
            }
        }
    }

    /// Returns `(ρ(-eᵢ, S), ρ(eᵢ, S))` for every coordinate.
    fn canonical_supports(&self) -> Vec<(f64, f64)> {
        let n = self.dim;
        let mut d = DVector::zeros(n);
        (0..n)
            .map(|i| {
                d[i] = 1.0;
                let hi = self.support_unchecked(&d);
                d[i] = -1.0;
                let neg = self.support_unchecked(&d);
                d[i] = 0.0;
                (neg, hi)
            })
            .collect()
    }
}

impl From<Zonotope> for SetExpression {
    fn from(z: Zonotope) -> Self {
        SetExpression::zonotope(z)
    }
}

impl From<Hyperrectangle> for SetExpression {
    fn from(h: Hyperrectangle) -> Self {
        SetExpression::hyperrectangle(h)
    }
}

/// `ρ(d, S)` for a set expression.
pub fn support_expression(s: &SetExpression, d: &DVector<f64>) -> Result<f64> {
    s.support(d)
}

/// Cartesian product of the given factors.
pub fn cartesian_product(parts: &[SetExpression]) -> Result<SetExpression> {
    SetExpression::cartesian_product(parts)
}

/// Tight per-coordinate box enclosure from the `2n` canonical support values.
///
/// A negative radius means the (overapproximated) intersection is empty.
pub fn box_approximation(s: &SetExpression) -> Result<Hyperrectangle> {
    if let Some(h) = s.as_hyperrectangle() {
        return Ok(h.clone());
    }
    let n = s.dim();
    let mut center = DVector::zeros(n);
    let mut radius = DVector::zeros(n);
    for (i, (neg, hi)) in s.canonical_supports().into_iter().enumerate() {
        let lo = -neg;
        let r = 0.5 * (hi - lo);
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFinite {
                context: "box approximation",
                step: None,
            });
        }
        // Rounding can leave a degenerate coordinate with r = -ulp.
        let tol = 64.0 * f64::EPSILON * lo.abs().max(hi.abs());
        if r < -tol {
            return Err(Error::EmptySet(format!(
                "coordinate {i} has lower bound {lo} above upper bound {hi}"
            )));
        }
        center[i] = 0.5 * (hi + lo);
        radius[i] = r.max(0.0);
    }
    Hyperrectangle::new(center, radius)
}

/// Smallest origin-centred box containing `S`.
pub fn symmetric_interval_hull(s: &SetExpression) -> Result<Hyperrectangle> {
    if s.dim() == 0 {
        return Err(Error::InvalidArgument(
            "symmetric interval hull of a zero-dimensional set".into(),
        ));
    }
    let radius = DVector::from_iterator(
        s.dim(),
        s.canonical_supports()
            .into_iter()
            .map(|(neg, hi)| neg.abs().max(hi.abs())),
    );
    Hyperrectangle::new(DVector::zeros(s.dim()), radius)
}
