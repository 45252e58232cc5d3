use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sets::{Hyperrectangle, Interval, SetExpression};

/// Time profile `η(t)` of one forcing term, written as the first component
/// of an autonomous linear ODE `ξ̇ = Bξ`.
#[derive(Debug, Clone, PartialEq)]
pub enum InputModel {
    /// `η(t) = c` with `c` in an interval.
    Constant { value: Interval },
    /// `η(t) = x₀ e^{αt}`.
    Exponential { rate: f64, initial: Interval },
    /// `η(t) = ξ₁(0) cos ωt + ξ₂(0)/ω sin ωt`.
    Sinusoid {
        omega: f64,
        value: Interval,
        derivative: Interval,
    },
}

impl InputModel {
    pub fn constant(c: f64) -> Self {
        InputModel::Constant {
            value: Interval::point(c),
        }
    }

    /// `a sin(ωt + φ)`, encoded through the initial values of `ξ`.
    pub fn sinusoid_with_phase(omega: f64, amplitude: f64, phase: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sinusoid frequency must be positive, got {omega}"
            )));
        }
        Ok(InputModel::Sinusoid {
            omega,
            value: Interval::point(amplitude * phase.sin()),
            derivative: Interval::point(amplitude * omega * phase.cos()),
        })
    }

    /// Number of auxiliary variables.
    pub fn order(&self) -> usize {
        match self {
            InputModel::Sinusoid { .. } => 2,
            _ => 1,
        }
    }

    /// Generator matrix `B`.
    pub fn generator(&self) -> DMatrix<f64> {
        match self {
            InputModel::Constant { .. } => DMatrix::zeros(1, 1),
            InputModel::Exponential { rate, .. } => DMatrix::from_element(1, 1, *rate),
            InputModel::Sinusoid { omega, .. } => {
                DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -omega * omega, 0.0])
            }
        }
    }

    /// Initial set `C₀` of the auxiliary variables.
    pub fn initial_intervals(&self) -> Vec<Interval> {
        match self {
            InputModel::Constant { value } => vec![*value],
            InputModel::Exponential { initial, .. } => vec![*initial],
            InputModel::Sinusoid {
                value, derivative, ..
            } => vec![*value, *derivative],
        }
    }

    /// `η(t)` for a given initial auxiliary state.
    pub fn eval(&self, t: f64, xi0: &[f64]) -> f64 {
        match self {
            InputModel::Constant { .. } => xi0[0],
            InputModel::Exponential { rate, .. } => xi0[0] * (rate * t).exp(),
            InputModel::Sinusoid { omega, .. } => {
                xi0[0] * (omega * t).cos() + xi0[1] / omega * (omega * t).sin()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            InputModel::Constant { .. } => Ok(()),
            InputModel::Exponential { rate, .. } if rate.is_finite() => Ok(()),
            InputModel::Sinusoid { omega, .. } if *omega > 0.0 && omega.is_finite() => Ok(()),
            other => Err(Error::InvalidArgument(format!(
                "invalid input model parameters: {other:?}"
            ))),
        }
    }
}

/// One forcing component `f₀ η(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputTerm {
    f0: DVector<f64>,
    model: InputModel,
}

impl InputTerm {
    pub fn new(f0: DVector<f64>, model: InputModel) -> Result<Self> {
        model.validate()?;
        if f0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "load vector",
                step: None,
            });
        }
        Ok(InputTerm { f0, model })
    }

    pub fn f0(&self) -> &DVector<f64> {
        &self.f0
    }

    pub fn model(&self) -> &InputModel {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.model.order()
    }

    pub fn generator(&self) -> DMatrix<f64> {
        self.model.generator()
    }

    pub fn initial(&self) -> SetExpression {
        let iv = self.model.initial_intervals();
        let c: Vec<f64> = iv.iter().map(|i| i.mid()).collect();
        let r: Vec<f64> = iv.iter().map(|i| i.radius()).collect();
        Hyperrectangle::from_slices(&c, &r)
            .expect("intervals are finite and ordered")
            .into()
    }

    /// Midpoint of the initial auxiliary set.
    pub fn nominal_initial(&self) -> Vec<f64> {
        self.model
            .initial_intervals()
            .iter()
            .map(|i| i.mid())
            .collect()
    }

    /// `f₀ η(t)` for the given initial auxiliary state.
    pub fn force(&self, t: f64, xi0: &[f64]) -> DVector<f64> {
        &self.f0 * self.model.eval(t, xi0)
    }
}

/// `Σ f₀⁽ⁱ⁾ η⁽ⁱ⁾(t)` at the nominal (midpoint) auxiliary states.
pub fn nominal_forcing(inputs: &[InputTerm], n: usize, t: f64) -> DVector<f64> {
    let mut f = DVector::zeros(n);
    for term in inputs {
        f += term.force(t, &term.nominal_initial());
    }
    f
}
