//! Sample envelopes and their norms, from point trajectories or flowpipes.

use crate::error::{Error, Result};
use crate::integrators::Trajectory;
use crate::propagate::{flowpipe_bounds, Flowpipe, Query};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeMetrics {
    pub l1: f64,
    pub linf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub times: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Envelope {
    /// `max(|upper|, |lower|)` at each sample.
    pub fn magnitude(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l.abs().max(u.abs()))
            .collect()
    }

    /// Trapezoidal `L¹` and pointwise `L∞` norms of the magnitude.
    pub fn metrics(&self) -> EnvelopeMetrics {
        let m = self.magnitude();
        let mut l1 = 0.0;
        for k in 1..m.len() {
            l1 += 0.5 * (m[k] + m[k - 1]) * (self.times[k] - self.times[k - 1]);
        }
        EnvelopeMetrics {
            l1,
            linf: m.iter().copied().fold(0.0, f64::max),
        }
    }
}

/// Pointwise min and max over samples sharing one time grid.
#[derive(Debug, Clone)]
pub struct EnvelopeBuilder {
    env: Envelope,
    count: usize,
}

impl EnvelopeBuilder {
    pub fn new(times: Vec<f64>) -> Self {
        let n = times.len();
        EnvelopeBuilder {
            env: Envelope {
                times,
                lower: vec![f64::INFINITY; n],
                upper: vec![f64::NEG_INFINITY; n],
            },
            count: 0,
        }
    }

    pub fn add(&mut self, values: &[f64]) -> Result<()> {
        crate::error::check_dim("envelope sample", self.env.times.len(), values.len())?;
        for (k, x) in values.iter().enumerate() {
            self.env.lower[k] = self.env.lower[k].min(*x);
            self.env.upper[k] = self.env.upper[k].max(*x);
        }
        self.count += 1;
        Ok(())
    }

    /// Update a single time slot, for samples produced step by step.
    pub fn add_at(&mut self, k: usize, x: f64) {
        self.env.lower[k] = self.env.lower[k].min(x);
        self.env.upper[k] = self.env.upper[k].max(x);
    }

    /// Mark one streamed sample as complete.
    pub fn finish_sample(&mut self) {
        self.count += 1;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn build(self) -> Result<Envelope> {
        if self.count == 0 {
            return Err(Error::InsufficientData("envelope has no samples".into()));
        }
        Ok(self.env)
    }
}

/// Envelope of component `index` over a set of trajectories.
pub fn envelope_from_samples(samples: &[Trajectory], index: usize) -> Result<Envelope> {
    let first = samples
        .first()
        .ok_or_else(|| Error::InsufficientData("no trajectories".into()))?;
    let mut b = EnvelopeBuilder::new(first.times.clone());
    for s in samples {
        b.add(&s.component(index))?;
    }
    b.build()
}

/// Norms of the flowpipe envelope along a query, treating each reach-set as
/// constant over its time interval.
pub fn flowpipe_envelope_metrics(fp: &Flowpipe, query: &Query) -> Result<EnvelopeMetrics> {
    let bounds = flowpipe_bounds(fp, query)?;
    let mut l1 = 0.0;
    let mut linf: f64 = 0.0;
    for b in &bounds {
        let m = b.lo.abs().max(b.hi.abs());
        l1 += (b.t_hi - b.t_lo) * m;
        linf = linf.max(m);
    }
    Ok(EnvelopeMetrics { l1, linf })
}
