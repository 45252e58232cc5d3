//! Convex-set representations and the lazy set-expression calculus.

mod expr;
mod hyperrectangle;
mod interval;
mod zonotope;

pub use expr::{
    box_approximation, cartesian_product, support_expression, symmetric_interval_hull,
    SetExpression,
};
pub use hyperrectangle::Hyperrectangle;
pub use interval::Interval;
pub use zonotope::{linear_map_zonotope, support_zonotope, Zonotope};
