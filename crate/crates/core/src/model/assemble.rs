use nalgebra::DVector;

use super::system::SecondOrderSystem;
use crate::error::{Error, Result};
use crate::matrix::csr_from_triplets;
use crate::sets::{Hyperrectangle, SetExpression};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
    }
}

/// Clamped-free bar with linear two-node elements: lumped mass, no damping.
/// Unknowns are the displacements of nodes `1..=N` (node 0 is clamped).
pub fn assemble_bar_1d(
    young: f64,
    area: f64,
    density: f64,
    length: f64,
    elements: usize,
) -> Result<SecondOrderSystem> {
    positive("Young modulus", young)?;
    positive("cross-section area", area)?;
    positive("density", density)?;
    positive("length", length)?;
    if elements == 0 {
        return Err(Error::InvalidArgument("bar needs at least one element".into()));
    }
    let n = elements;
    let ell = length / n as f64;
    let ks = young * area / ell;
    let ms = density * area * ell / 2.0;
    let mut k = Vec::with_capacity(3 * n);
    let mut m = Vec::with_capacity(n);
    for i in 0..n {
        let last = i + 1 == n;
        k.push((i, i, if last { ks } else { 2.0 * ks }));
        m.push((i, i, if last { ms } else { 2.0 * ms }));
        if !last {
            k.push((i, i + 1, -ks));
            k.push((i + 1, i, -ks));
        }
    }
    SecondOrderSystem::dynamics(
        csr_from_triplets(n, n, &m)?,
        csr_from_triplets(n, n, &[])?,
        csr_from_triplets(n, n, &k)?,
    )
}

/// Rod `[0, L]` with linear two-node elements and the consistent capacity
/// matrix. With `dirichlet_both_ends` the unknowns are the `N − 1` interior
/// nodes; otherwise only `x = 0` is fixed and the `N` remaining nodes are free.
pub fn assemble_heat_1d(
    conductivity: f64,
    density: f64,
    specific_heat: f64,
    length: f64,
    elements: usize,
    dirichlet_both_ends: bool,
) -> Result<SecondOrderSystem> {
    positive("conductivity", conductivity)?;
    positive("density", density)?;
    positive("specific heat", specific_heat)?;
    positive("length", length)?;
    let min = if dirichlet_both_ends { 2 } else { 1 };
    if elements < min {
        return Err(Error::InvalidArgument(format!(
            "rod needs at least {min} elements, got {elements}"
        )));
    }
    let ell = length / elements as f64;
    let ks = conductivity / ell;
    let cs = density * specific_heat * ell / 6.0;
    let n = if dirichlet_both_ends {
        elements - 1
    } else {
        elements
    };
    let mut k = Vec::with_capacity(3 * n);
    let mut c = Vec::with_capacity(3 * n);
    for i in 0..n {
        let free_end = !dirichlet_both_ends && i + 1 == n;
        k.push((i, i, if free_end { ks } else { 2.0 * ks }));
        c.push((i, i, if free_end { 2.0 * cs } else { 4.0 * cs }));
        if i + 1 < n {
            k.push((i, i + 1, -ks));
            k.push((i + 1, i, -ks));
            c.push((i, i + 1, cs));
            c.push((i + 1, i, cs));
        }
    }
    SecondOrderSystem::heat(csr_from_triplets(n, n, &c)?, csr_from_triplets(n, n, &k)?)
}

/// Box initial set `{x : |x − center| ≤ radius}`.
pub fn initial_box(center: &DVector<f64>, radius: &DVector<f64>) -> Result<SetExpression> {
    Ok(Hyperrectangle::new(center.clone(), radius.clone())?.into())
}
