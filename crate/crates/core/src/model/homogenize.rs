use nalgebra::{DMatrix, DVector};

use super::input::InputTerm;
use super::system::{dynamics_first_order, heat_first_order, push_block, SecondOrderSystem, SystemKind};
use crate::error::{check_dim, Error, Result};
use crate::matrix::{csr_from_triplets, LinearOperator, StateMatrix};
use crate::sets::SetExpression;

/// Autonomous first-order system `ẋ = A x` with `x = (state, ξ⁽¹⁾, …, ξ⁽ⁿᶠ⁾)`
/// and initial set `X₀ × C₀⁽¹⁾ × …`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: StateMatrix,
    state_dim: usize,
    input_layout: Vec<(usize, usize)>,
    initial: SetExpression,
}

impl LinearSystem {
    /// A system without input terms.
    pub fn new(a: StateMatrix, initial: SetExpression) -> Result<Self> {
        check_dim("initial set", a.dim(), initial.dim())?;
        Ok(LinearSystem {
            state_dim: a.dim(),
            a,
            input_layout: Vec::new(),
            initial,
        })
    }

    pub fn a(&self) -> &StateMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    /// `(offset, q)` of each auxiliary block.
    pub fn input_layout(&self) -> &[(usize, usize)] {
        &self.input_layout
    }

    pub fn initial(&self) -> &SetExpression {
        &self.initial
    }

    /// Same dynamics with a different initial set.
    pub fn with_initial(&self, initial: SetExpression) -> Result<Self> {
        check_dim("initial set", self.dim(), initial.dim())?;
        Ok(LinearSystem {
            initial,
            ..self.clone()
        })
    }
}

/// Homogenizes `C θ̇ + K θ = Σ f₀ η` or `M ü + C u̇ + K u = Σ f₀ η`.
/// Load columns are premultiplied by `C⁻¹` or `M⁻¹` through solves.
pub fn homogenize(
    sys: &SecondOrderSystem,
    inputs: &[InputTerm],
    x0: &SetExpression,
) -> Result<LinearSystem> {
    let n = sys.dofs();
    for term in inputs {
        check_dim("load vector", n, term.f0().len())?;
    }
    let (state, row0) = match sys.kind() {
        SystemKind::Heat => (heat_first_order(sys)?, 0),
        SystemKind::Dynamics => (dynamics_first_order(sys)?, n),
    };
    let columns: Vec<DVector<f64>> = if inputs.is_empty() {
        Vec::new()
    } else {
        let f = sys.factor_leading()?;
        inputs
            .iter()
            .map(|t| {
                let mut g = DVector::zeros(sys.state_dim());
                g.rows_mut(row0, n).copy_from(&f.solve(t.f0()));
                g
            })
            .collect()
    };
    assemble(state, &columns, inputs, x0)
}

/// Homogenizes `ẋ = A x + Σ f₀ η` for an already first-order state matrix.
pub fn homogenize_first_order(
    a: &StateMatrix,
    inputs: &[InputTerm],
    x0: &SetExpression,
) -> Result<LinearSystem> {
    for term in inputs {
        check_dim("load vector", a.dim(), term.f0().len())?;
    }
    let columns: Vec<DVector<f64>> = inputs.iter().map(|t| t.f0().clone()).collect();
    assemble(a.op().clone(), &columns, inputs, x0)
}

fn assemble(
    state: LinearOperator,
    columns: &[DVector<f64>],
    inputs: &[InputTerm],
    x0: &SetExpression,
) -> Result<LinearSystem> {
    let ns = state.nrows();
    check_dim("initial state set", ns, x0.dim())?;
    if inputs.is_empty() {
        return LinearSystem::new(StateMatrix::new(state)?, x0.clone());
    }
    let total = ns + inputs.iter().map(|t| t.order()).sum::<usize>();
    let mut t = Vec::new();
    push_block(&mut t, &state, 0, 0);
    let mut layout = Vec::with_capacity(inputs.len());
    let mut parts = vec![x0.clone()];
    let mut offset = ns;
    for (term, g) in inputs.iter().zip(columns) {
        // F₀ = [f₀ | 0]: only the first auxiliary variable drives the state.
        for (i, v) in g.iter().enumerate() {
            if *v != 0.0 {
                t.push((i, offset, *v));
            }
        }
        push_block(&mut t, &LinearOperator::Dense(term.generator()), offset, offset);
        layout.push((offset, term.order()));
        parts.push(term.initial());
        offset += term.order();
    }
    let csr = csr_from_triplets(total, total, &t)?;
    let op = match state {
        LinearOperator::Sparse(_) => LinearOperator::Sparse(csr),
        LinearOperator::Dense(_) => LinearOperator::Dense(DMatrix::from(&csr)),
    };
    let initial = SetExpression::cartesian_product(&parts)?;
    Ok(LinearSystem {
        a: StateMatrix::new(op).map_err(|e| match e {
            Error::NonFinite { .. } => Error::NonFinite {
                context: "homogenized matrix",
                step: None,
            },
            e => e,
        })?,
        state_dim: ns,
        input_layout: layout,
        initial,
    })
}
