#![allow(dead_code)]
//! Reference solutions that share no code with the library: nalgebra's own
//! matrix exponential, modal superposition and classical Runge-Kutta.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `e^{At}x₀` through nalgebra's Padé exponential.
pub fn exact_flow(a: &DMatrix<f64>, x0: &DVector<f64>, t: f64) -> DVector<f64> {
    (a * t).exp() * x0
}

/// `A = S − (BBᵀ + sI)` with `S` skew: every eigenvalue has real part ≤ −s.
pub fn random_stable(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let s = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
    let skew = &s - s.transpose();
    let shift = rng.random_range(0.01..0.5);
    skew - &b * b.transpose() * 0.5 - DMatrix::identity(n, n) * shift
}

pub fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    let d = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let norm = d.norm();
    if norm < 1e-3 {
        let mut e = DVector::zeros(n);
        e[0] = 1.0;
        e
    } else {
        d / norm
    }
}

/// Classical fourth-order Runge-Kutta for `ẋ = Ax + g(t)`, returning the
/// state at each multiple of `h` up to `steps`.
pub fn rk4<G>(a: &DMatrix<f64>, g: G, x0: &DVector<f64>, h: f64, steps: usize) -> Vec<DVector<f64>>
where
    G: Fn(f64) -> DVector<f64>,
{
    let f = |t: f64, x: &DVector<f64>| a * x + g(t);
    let mut x = x0.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(x.clone());
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = f(t, &x);
        let k2 = f(t + 0.5 * h, &(&x + &k1 * (0.5 * h)));
        let k3 = f(t + 0.5 * h, &(&x + &k2 * (0.5 * h)));
        let k4 = f(t + h, &(&x + &k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.push(x.clone());
    }
    out
}

/// Undamped `Mü + Ku = F` from rest, diagonal `M`, by modal superposition:
/// `u(t) = u_s − Σ_j w_j cos(ω_j t)` at one degree of freedom.
pub struct ModalResponse {
    pub static_value: f64,
    pub velocity_weights: Vec<f64>,
    pub weights: Vec<f64>,
    pub omegas: Vec<f64>,
}

impl ModalResponse {
    pub fn new(mass_diag: &DVector<f64>, k: &DMatrix<f64>, force: &DVector<f64>, dof: usize) -> Self {
        let n = k.nrows();
        let m_isqrt = DVector::from_iterator(n, mass_diag.iter().map(|m| 1.0 / m.sqrt()));
        let kt = DMatrix::from_fn(n, n, |i, j| m_isqrt[i] * k[(i, j)] * m_isqrt[j]);
        let eig = SymmetricEigen::new(kt);
        let u_s = k.clone().lu().solve(force).expect("stiffness invertible");
        // Modal coordinates of the static deflection.
        let q0 = eig.eigenvectors.transpose()
            * DVector::from_iterator(n, (0..n).map(|i| u_s[i] / m_isqrt[i]));
        let omegas: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        let weights: Vec<f64> = (0..n)
            .map(|j| m_isqrt[dof] * eig.eigenvectors[(dof, j)] * q0[j])
            .collect();
        let velocity_weights = weights.iter().zip(&omegas).map(|(w, o)| w * o).collect();
        ModalResponse {
            static_value: u_s[dof],
            velocity_weights,
            weights,
            omegas,
        }
    }

    pub fn displacement(&self, t: f64) -> f64 {
        let mut u = self.static_value;
        for (w, o) in self.weights.iter().zip(&self.omegas) {
            u -= w * (o * t).cos();
        }
        u
    }

    pub fn velocity(&self, t: f64) -> f64 {
        let mut v = 0.0;
        for (w, o) in self.velocity_weights.iter().zip(&self.omegas) {
            v += w * (o * t).sin();
        }
        v
    }
}

/// Nodal values of `sin πx + ½ sin 3πx` at the interior nodes of `[0, 1]`.
pub fn heat_profile(elements: usize) -> DVector<f64> {
    use std::f64::consts::PI;
    DVector::from_fn(elements - 1, |i, _| {
        let x = (i + 1) as f64 / elements as f64;
        (PI * x).sin() + 0.5 * (3.0 * PI * x).sin()
    })
}
