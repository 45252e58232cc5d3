//! Post-processing: period and amplitude metrics, envelopes, reference
//! solutions and random sampling of initial states.

mod analytic;
mod envelope;
mod period;
mod sampling;

pub use analytic::{
    analytic_clamped_bar, analytic_heat_rod, analytic_oscillator, BarParams, DEFAULT_BAR_TERMS,
};
pub use envelope::{
    envelope_from_samples, flowpipe_envelope_metrics, Envelope, EnvelopeBuilder, EnvelopeMetrics,
};
pub use period::{
    amplitude_decay, crossing_amplitude, estimate_amplitude_decay, estimate_period,
    maxima_crossings, period_elongation, trajectory_amplitude, trajectory_bounds,
    trajectory_period, Crossing, PeriodEstimate,
};
pub use sampling::{vertex_samples, VertexSampler};
