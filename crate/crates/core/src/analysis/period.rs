//! Period and amplitude estimates from flowpipes and point trajectories.

use crate::error::{Error, Result};
use crate::propagate::{flowpipe_bounds, Bound, Flowpipe, Geometry, Query};
use crate::sets::{Interval, Zonotope};

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEstimate {
    /// Interval containing every period compatible with the flowpipe.
    pub s_t: Interval,
    pub crossings_used: usize,
}

impl PeriodEstimate {
    /// `(max S_T − T)/T`.
    pub fn elongation(&self, t_nat: f64) -> f64 {
        period_elongation(self.s_t.hi(), t_nat)
    }
}

pub fn period_elongation(t_num: f64, t_nat: f64) -> f64 {
    (t_num - t_nat) / t_nat
}

/// `1 − (A_num/A)^{1/n_A}`.
pub fn amplitude_decay(a_num: f64, a: f64, n_a: usize) -> f64 {
    1.0 - (a_num / a).powf(1.0 / n_a as f64)
}

/// A run of consecutive reach-sets meeting `{u > 0, v = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub first: usize,
    pub last: usize,
    pub span: Interval,
}

// Boundary peaks can leave v-bounds like [1e-14, 7.4]; accept zero within
// a relative tolerance of the bound magnitudes.
const CROSSING_RTOL: f64 = 1e-9;

fn meets_zero(b: &Bound) -> bool {
    let tol = CROSSING_RTOL * b.lo.abs().max(b.hi.abs());
    b.lo <= tol && b.hi >= -tol
}

/// Maximal runs of reach-sets whose `v` bounds contain 0 and whose `u`
/// lower bound is positive, excluding a run that starts at `t = 0`.
pub fn maxima_crossings(fp: &Flowpipe, u_index: usize, v_index: usize) -> Result<Vec<Crossing>> {
    let ub = flowpipe_bounds(fp, &Query::Index(u_index))?;
    let vb = flowpipe_bounds(fp, &Query::Index(v_index))?;
    let mut out = Vec::new();
    let mut run: Option<(usize, usize)> = None;
    for k in 0..ub.len() {
        let hit = ub[k].lo > 0.0 && meets_zero(&vb[k]);
        match (hit, run) {
            (true, None) => run = Some((k, k)),
            (true, Some((s, _))) => run = Some((s, k)),
            (false, Some((s, e))) => {
                out.push((s, e));
                run = None;
            }
            (false, None) => {}
        }
    }
    if let Some(r) = run {
        out.push(r);
    }
    Ok(out
        .into_iter()
        .filter(|(s, _)| *s != 0)
        .map(|(s, e)| Crossing {
            first: s,
            last: e,
            span: Interval::new(ub[s].t_lo, ub[e].t_hi).expect("ordered times"),
        })
        .collect())
}

/// `S_T = ∩_m T_m / m` over the first `m_max` crossings.
pub fn estimate_period(
    fp: &Flowpipe,
    u_index: usize,
    v_index: usize,
    m_max: usize,
) -> Result<PeriodEstimate> {
    let crossings = maxima_crossings(fp, u_index, v_index)?;
    if crossings.is_empty() || m_max == 0 {
        return Err(Error::InsufficientData(
            "no displacement maximum found in the flowpipe".into(),
        ));
    }
    let used = crossings.len().min(m_max);
    let mut s_t = crossings[0].span;
    for (m, c) in crossings.iter().enumerate().take(used).skip(1) {
        let scaled = c.span.scale(1.0 / (m + 1) as f64);
        s_t = s_t.intersect(&scaled).ok_or_else(|| {
            Error::Inconsistent(format!(
                "period intervals become disjoint at crossing {}",
                m + 1
            ))
        })?;
    }
    Ok(PeriodEstimate {
        s_t,
        crossings_used: used,
    })
}

/// Lowest displacement of the reach-sets of the `n_a`-th maximum crossing
/// restricted to `v = 0`.
pub fn crossing_amplitude(
    fp: &Flowpipe,
    u_index: usize,
    v_index: usize,
    n_a: usize,
) -> Result<f64> {
    let crossings = maxima_crossings(fp, u_index, v_index)?;
    let c = crossings.get(n_a.wrapping_sub(1)).ok_or_else(|| {
        Error::InsufficientData(format!(
            "flowpipe has {} maximum crossings, {n_a} requested",
            crossings.len()
        ))
    })?;
    let ub = flowpipe_bounds(fp, &Query::Index(u_index))?;
    let mut a_num = f64::INFINITY;
    for k in c.first..=c.last {
        let lo = slice_lower(fp, k, u_index, v_index).unwrap_or(ub[k].lo);
        // Never report less than the plain projection.
        a_num = a_num.min(lo.max(ub[k].lo));
    }
    Ok(a_num)
}

/// `AD` of a flowpipe at its `n_a`-th maximum, relative to amplitude `a`.
pub fn estimate_amplitude_decay(
    fp: &Flowpipe,
    u_index: usize,
    v_index: usize,
    n_a: usize,
    a: f64,
) -> Result<f64> {
    if n_a == 0 {
        return Err(Error::InvalidArgument("n_A must be at least 1".into()));
    }
    let a_num = crossing_amplitude(fp, u_index, v_index, n_a)?;
    Ok(amplitude_decay(a_num, a, n_a))
}

/// Lower bound of `u` over reach-set `k` intersected with `{v = 0}`.
fn slice_lower(fp: &Flowpipe, k: usize, u: usize, v: usize) -> Option<f64> {
    match &fp.reach_sets()[k].geometry {
        Geometry::Box(h) => Some(h.center()[u] - h.radius()[u]),
        Geometry::Zonotope(z) => zonotope_slice_lower(z, u, v),
        Geometry::Support(bounds) => {
            let mut best = f64::NEG_INFINITY;
            for (d, (lo, hi)) in fp.directions().iter().zip(bounds) {
                let planar = d
                    .iter()
                    .enumerate()
                    .all(|(i, x)| *x == 0.0 || i == u || i == v);
                if !planar || d[u] == 0.0 {
                    continue;
                }
                // lo ≤ d_u u + d_v v ≤ hi at v = 0.
                let cand = if d[u] > 0.0 { lo / d[u] } else { hi / d[u] };
                best = best.max(cand);
            }
            best.is_finite().then_some(best)
        }
    }
}

/// `min u` over the planar projection of `z` on `(u, v)` at `v = 0`, by the
/// dual `max_λ −ρ((−1, λ), Z)` evaluated at its breakpoints.
fn zonotope_slice_lower(z: &Zonotope, u: usize, v: usize) -> Option<f64> {
    let g = z.generators();
    let (cu, cv) = (z.center()[u], z.center()[v]);
    let support = |lam: f64| {
        let mut s = -cu + lam * cv;
        for j in 0..g.ncols() {
            s += (-g[(u, j)] + lam * g[(v, j)]).abs();
        }
        s
    };
    let mut best = -support(0.0);
    for j in 0..g.ncols() {
        if g[(v, j)] != 0.0 {
            best = best.max(-support(g[(u, j)] / g[(v, j)]));
        }
    }
    best.is_finite().then_some(best)
}

/// Mean period from linearly interpolated zero crossings of a sampled
/// signal (half-period spacing between successive crossings).
pub fn trajectory_period(times: &[f64], u: &[f64]) -> Result<f64> {
    let mut zeros = Vec::new();
    for k in 1..u.len().min(times.len()) {
        let (a, b) = (u[k - 1], u[k]);
        if (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0) {
            let s = a / (a - b);
            zeros.push(times[k - 1] + s * (times[k] - times[k - 1]));
        }
    }
    if zeros.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need 3 zero crossings, found {}",
            zeros.len()
        )));
    }
    Ok(2.0 * (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64)
}

/// Amplitude at the `n`-th positive local maximum after `t = 0`, from the
/// sinusoid through the three samples around it.
pub fn trajectory_amplitude(u: &[f64], n: usize) -> Result<f64> {
    let mut seen = 0;
    for k in 1..u.len().saturating_sub(1) {
        if u[k] > 0.0 && u[k] >= u[k - 1] && u[k] > u[k + 1] {
            seen += 1;
            if seen == n {
                let (um, u0, up) = (u[k - 1], u[k], u[k + 1]);
                let c = ((um + up) / (2.0 * u0)).clamp(-1.0, 1.0);
                let s = (1.0 - c * c).sqrt();
                if s == 0.0 {
                    return Ok(u0);
                }
                let b = (up - um) / (2.0 * s);
                return Ok((u0 * u0 + b * b).sqrt());
            }
        }
    }
    Err(Error::InsufficientData(format!(
        "signal has {seen} maxima, {n} requested"
    )))
}

/// Degenerate flowpipe bounds from a sampled signal, for comparisons.
pub fn trajectory_bounds(times: &[f64], u: &[f64]) -> Vec<Bound> {
    times
        .iter()
        .zip(u)
        .map(|(t, x)| Bound {
            t_lo: *t,
            t_hi: *t,
            lo: *x,
            hi: *x,
        })
        .collect()
}
