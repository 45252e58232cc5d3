//! Conservative time discretization: a set `Ω₀` enclosing every trajectory
//! of `ẋ = Ax` from `X₀` over the first step `[0, δ]`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matfun::{e_plus_with, expm, p_series};
use crate::matrix::{LinearOperator, StateMatrix};
use crate::model::LinearSystem;
use crate::sets::{box_approximation, Hyperrectangle, SetExpression};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscretizationMode {
    /// Keep `Ω₀` as a lazy expression.
    Symbolic,
    /// Also compute its tight box enclosure.
    Box,
}

#[derive(Debug, Clone)]
pub struct DiscretizedProblem {
    phi: StateMatrix,
    omega0: SetExpression,
    omega_forward: SetExpression,
    omega0_box: Option<Hyperrectangle>,
    delta: f64,
    steps: usize,
}

impl DiscretizedProblem {
    /// Transition matrix `Φ = e^{Aδ}`.
    pub fn phi(&self) -> &StateMatrix {
        &self.phi
    }

    pub fn omega0(&self) -> &SetExpression {
        &self.omega0
    }

    /// The forward-only enclosure `CH(X₀, ΦX₀ ⊕ E⁺(A, X₀, δ))`.
    pub fn omega_forward(&self) -> &SetExpression {
        &self.omega_forward
    }

    pub fn omega0_box(&self) -> Option<&Hyperrectangle> {
        self.omega0_box.as_ref()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }
}

pub fn discretize(
    sys: &LinearSystem,
    delta: f64,
    steps: usize,
    mode: DiscretizationMode,
) -> Result<DiscretizedProblem> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {delta}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    let a = sys.a();
    let phi = expm(a, delta)?;
    let p_abs = p_series(&StateMatrix::new(a.op().abs())?, delta)?.to_dense();

    let x0 = sys.initial();
    let phi_op: Arc<LinearOperator> = Arc::new(phi.op().clone());
    let phi_x0 = SetExpression::linear_map(phi_op, x0)?;
    let e_fwd: SetExpression = e_plus_with(a, &p_abs, x0)?.into();
    let e_bwd: SetExpression = e_plus_with(a, &p_abs, &phi_x0)?.into();

    let omega_forward =
        SetExpression::convex_hull(x0, &SetExpression::minkowski_sum(&phi_x0, &e_fwd)?)?;
    let omega_backward =
        SetExpression::convex_hull(&phi_x0, &SetExpression::minkowski_sum(x0, &e_bwd)?)?;
    let omega0 = SetExpression::intersection(&omega_forward, &omega_backward)?;

    let omega0_box = match mode {
        DiscretizationMode::Symbolic => None,
        DiscretizationMode::Box => Some(box_approximation(&omega0)?),
    };
    Ok(DiscretizedProblem {
        phi,
        omega0,
        omega_forward,
        omega0_box,
        delta,
        steps,
    })
}
