//! Flowpipes from the recurrences `X_{k+1} = Φ X_k`, evaluated on
//! zonotopes, boxes, or support functions along fixed directions.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{check_dim, Error, Result};
use crate::matrix::StateMatrix;
use crate::sets::{Hyperrectangle, SetExpression, Zonotope};

/// Geometry of one reach-set. Support records hold `(lo, hi)` per direction
/// of the owning flowpipe.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Zonotope(Zonotope),
    Box(Hyperrectangle),
    Support(Vec<(f64, f64)>),
}

/// Enclosure of every trajectory over `[t_lo, t_hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachSet {
    pub t_lo: f64,
    pub t_hi: f64,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flowpipe {
    reach_sets: Vec<ReachSet>,
    delta: f64,
    dim: usize,
    directions: Vec<DVector<f64>>,
}

/// Projection requested from a flowpipe.
#[derive(Debug, Clone, PartialEq)]
pub enum Query {
    Index(usize),
    Direction(DVector<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub t_lo: f64,
    pub t_hi: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Flowpipe {
    /// Box flowpipe from given sets, the `k`-th covering `[kδ, (k+1)δ]`.
    /// Sampled trajectories become degenerate flowpipes this way.
    pub fn from_boxes(boxes: Vec<Hyperrectangle>, delta: f64) -> Result<Self> {
        check_steps(boxes.len())?;
        check_delta(delta)?;
        let dim = boxes[0].dim();
        let mut reach_sets = Vec::with_capacity(boxes.len());
        for (k, b) in boxes.into_iter().enumerate() {
            check_dim("flowpipe box", dim, b.dim())?;
            let (t_lo, t_hi) = time_span(k, delta);
            reach_sets.push(ReachSet {
                t_lo,
                t_hi,
                geometry: Geometry::Box(b),
            });
        }
        Ok(Flowpipe {
            reach_sets,
            delta,
            dim,
            directions: Vec::new(),
        })
    }

    pub fn reach_sets(&self) -> &[ReachSet] {
        &self.reach_sets
    }

    pub fn len(&self) -> usize {
        self.reach_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reach_sets.is_empty()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Directions of a support-function flowpipe (empty otherwise).
    pub fn directions(&self) -> &[DVector<f64>] {
        &self.directions
    }

    pub fn horizon(&self) -> f64 {
        self.reach_sets.last().map_or(0.0, |r| r.t_hi)
    }

    /// Index of the first reach-set whose time interval contains `t`.
    pub fn step_at(&self, t: f64) -> Option<usize> {
        if t < 0.0 || self.is_empty() {
            return None;
        }
        let k = (t / self.delta).floor() as usize;
        let k = k.min(self.len() - 1);
        // Guard against rounding at step boundaries.
        [k.saturating_sub(1), k, (k + 1).min(self.len() - 1)]
            .into_iter()
            .find(|&j| self.reach_sets[j].t_lo <= t && t <= self.reach_sets[j].t_hi)
    }
}

fn time_span(k: usize, delta: f64) -> (f64, f64) {
    (k as f64 * delta, (k + 1) as f64 * delta)
}

fn check_steps(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one step".into()));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "time step must be positive, got {delta}"
        )))
    }
}

/// `Z_k = ⟨Φᵏc₀, ΦᵏG₀⟩`, advanced one product per step.
pub fn propagate_zonotope(
    phi: &StateMatrix,
    z0: &Zonotope,
    steps: usize,
    delta: f64,
) -> Result<Flowpipe> {
    check_dim("initial zonotope", phi.dim(), z0.dim())?;
    check_steps(steps)?;
    check_delta(delta)?;
    let mut c = z0.center().clone();
    let mut g = z0.generators().clone();
    let mut reach_sets = Vec::with_capacity(steps);
    for k in 0..steps {
        if k > 0 {
            c = phi.mul_vec(&c);
            g = phi.mul_mat(&g);
            finite(c.iter().chain(g.iter()), "zonotope propagation", k)?;
        }
        let (t_lo, t_hi) = time_span(k, delta);
        reach_sets.push(ReachSet {
            t_lo,
            t_hi,
            geometry: Geometry::Zonotope(Zonotope::new(c.clone(), g.clone())?),
        });
    }
    Ok(Flowpipe {
        reach_sets,
        delta,
        dim: phi.dim(),
        directions: Vec::new(),
    })
}

/// `H_k = ⟨Φᵏc₀, |Φᵏ|r₀⟩`, computed as the zonotope recurrence with
/// `G₀ = diag(r₀)`; only the boxes are kept.
pub fn propagate_box(
    phi: &StateMatrix,
    h0: &Hyperrectangle,
    steps: usize,
    delta: f64,
) -> Result<Flowpipe> {
    check_dim("initial box", phi.dim(), h0.dim())?;
    check_steps(steps)?;
    check_delta(delta)?;
    // Zero-radius coordinates contribute no generator.
    let active: Vec<usize> = (0..h0.dim()).filter(|&i| h0.radius()[i] > 0.0).collect();
    let mut g = DMatrix::zeros(h0.dim(), active.len());
    for (j, &i) in active.iter().enumerate() {
        g[(i, j)] = h0.radius()[i];
    }
    let mut c = h0.center().clone();
    let mut reach_sets = Vec::with_capacity(steps);
    for k in 0..steps {
        if k > 0 {
            c = phi.mul_vec(&c);
            g = phi.mul_mat(&g);
            finite(c.iter().chain(g.iter()), "box propagation", k)?;
        }
        let r = DVector::from_iterator(
            g.nrows(),
            g.row_iter().map(|row| row.iter().map(|v| v.abs()).sum::<f64>()),
        );
        let (t_lo, t_hi) = time_span(k, delta);
        reach_sets.push(ReachSet {
            t_lo,
            t_hi,
            geometry: Geometry::Box(Hyperrectangle::new(c.clone(), r)?),
        });
    }
    Ok(Flowpipe {
        reach_sets,
        delta,
        dim: phi.dim(),
        directions: Vec::new(),
    })
}

/// `ρ(d, X_k) = ρ((Φᵀ)ᵏd, Ω₀)` for each direction, with `d_{k+1} = Φᵀd_k`.
/// Directions are processed in parallel.
pub fn propagate_support(
    phi: &StateMatrix,
    omega0: &SetExpression,
    directions: &[DVector<f64>],
    steps: usize,
    delta: f64,
) -> Result<Flowpipe> {
    check_dim("initial set", phi.dim(), omega0.dim())?;
    check_steps(steps)?;
    check_delta(delta)?;
    if directions.is_empty() {
        return Err(Error::InvalidArgument("no support directions given".into()));
    }
    for d in directions {
        check_dim("support direction", phi.dim(), d.len())?;
    }
    let per_direction: Vec<Vec<(f64, f64)>> = directions
        .par_iter()
        .map(|d| {
            let mut dk = d.clone();
            let mut out = Vec::with_capacity(steps);
            for k in 0..steps {
                if k > 0 {
                    dk = phi.tr_mul_vec(&dk);
                    finite(dk.iter(), "support propagation", k)?;
                }
                let hi = omega0.support_unchecked(&dk);
                let lo = -omega0.support_unchecked(&(-&dk));
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(Error::NonFinite {
                        context: "support propagation",
                        step: Some(k),
                    });
                }
                out.push((lo, hi));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let reach_sets = (0..steps)
        .map(|k| {
            let (t_lo, t_hi) = time_span(k, delta);
            ReachSet {
                t_lo,
                t_hi,
                geometry: Geometry::Support(per_direction.iter().map(|v| v[k]).collect()),
            }
        })
        .collect();
    Ok(Flowpipe {
        reach_sets,
        delta,
        dim: phi.dim(),
        directions: directions.to_vec(),
    })
}

fn finite<'a>(mut it: impl Iterator<Item = &'a f64>, context: &'static str, k: usize) -> Result<()> {
    if it.all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context,
            step: Some(k),
        })
    }
}

/// The single nonzero coordinate of `d`, if there is exactly one.
fn axis_of(d: &DVector<f64>) -> Option<(usize, f64)> {
    let mut found = None;
    for (i, v) in d.iter().enumerate() {
        if *v != 0.0 {
            if found.is_some() {
                return None;
            }
            found = Some((i, *v));
        }
    }
    found
}

fn scaled(lo: f64, hi: f64, s: f64) -> (f64, f64) {
    if s >= 0.0 {
        (s * lo, s * hi)
    } else {
        (s * hi, s * lo)
    }
}

/// Per-step interval bounds of the flowpipe along a coordinate or direction.
pub fn flowpipe_bounds(fp: &Flowpipe, query: &Query) -> Result<Vec<Bound>> {
    let d = match query {
        Query::Index(i) => {
            if *i >= fp.dim {
                return Err(Error::DimensionMismatch {
                    context: "output index",
                    expected: fp.dim,
                    found: *i,
                });
            }
            let mut d = DVector::zeros(fp.dim);
            d[*i] = 1.0;
            d
        }
        Query::Direction(d) => {
            check_dim("query direction", fp.dim, d.len())?;
            d.clone()
        }
    };
    let lookup = support_slot(fp, &d)?;
    let axis = axis_of(&d);
    fp.reach_sets
        .iter()
        .map(|rs| {
            let (lo, hi) = match &rs.geometry {
                Geometry::Zonotope(z) => (-z.support_unchecked(&(-&d)), z.support_unchecked(&d)),
                Geometry::Box(h) => {
                    let (i, s) = axis.ok_or_else(|| {
                        Error::UnsupportedQuery(
                            "box flowpipes only answer canonical directions".into(),
                        )
                    })?;
                    let c = h.center()[i];
                    let r = h.radius()[i];
                    scaled(c - r, c + r, s)
                }
                Geometry::Support(v) => {
                    let (j, s) = lookup.expect("checked by support_slot");
                    let (lo, hi) = v[j];
                    scaled(lo, hi, s)
                }
            };
            Ok(Bound {
                t_lo: rs.t_lo,
                t_hi: rs.t_hi,
                lo,
                hi,
            })
        })
        .collect()
}

/// For support flowpipes: the stored direction `dⱼ` with `d = s·dⱼ`.
fn support_slot(fp: &Flowpipe, d: &DVector<f64>) -> Result<Option<(usize, f64)>> {
    if fp.directions.is_empty() {
        return Ok(None);
    }
    for (j, dj) in fp.directions.iter().enumerate() {
        let k = dj.iamax();
        if dj[k] == 0.0 {
            continue;
        }
        let s = d[k] / dj[k];
        if s != 0.0 && (d - dj * s).amax() <= 1e-14 * d.amax() {
            return Ok(Some((j, s)));
        }
    }
    Err(Error::UnsupportedQuery(
        "direction was not propagated in this support flowpipe".into(),
    ))
}
