//! Set-propagation engine for linear transient problems from finite-element
//! semi-discretizations, with classical integrators for comparison.

pub mod analysis;
pub mod discretize;
pub mod error;
pub mod integrators;
pub mod linsolve;
pub mod matfun;
pub mod matrix;
pub mod model;
pub mod propagate;
pub mod sets;

pub use error::{Error, Result};
