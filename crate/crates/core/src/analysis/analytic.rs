use std::f64::consts::PI;

/// `(u, v)` of `ü + ω²u = 0`.
pub fn analytic_oscillator(omega: f64, u0: f64, v0: f64, t: f64) -> (f64, f64) {
    let (s, c) = (omega * t).sin_cos();
    (u0 * c + v0 / omega * s, -u0 * omega * s + v0 * c)
}

/// Clamped-free bar under a step end load `F H(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarParams {
    pub young: f64,
    pub area: f64,
    pub density: f64,
    pub length: f64,
    pub force: f64,
}

impl BarParams {
    /// `E = 30e6`, `A = 1`, `ρ = 7.3e-4`, `L = 200`, `F = 10⁴`.
    pub fn reference() -> Self {
        BarParams {
            young: 30e6,
            area: 1.0,
            density: 7.3e-4,
            length: 200.0,
            force: 1e4,
        }
    }

    /// Wave speed `√(E/ρ)`.
    pub fn wave_speed(&self) -> f64 {
        (self.young / self.density).sqrt()
    }
}

pub const DEFAULT_BAR_TERMS: usize = 1000;

/// Mode-superposition displacement of the continuum bar, truncated after
/// `s_max` terms. The tail is bounded by `8FL/(π²EA) Σ_{s>s_max} (2s−1)⁻²`.
pub fn analytic_clamped_bar(p: &BarParams, x: f64, t: f64, s_max: usize) -> f64 {
    let l = p.length;
    let mu = p.wave_speed();
    let mut sum = 0.0;
    for s in 1..=s_max {
        let k = (2 * s - 1) as f64;
        let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign / (k * k)
            * (k * PI * x / (2.0 * l)).sin()
            * (1.0 - (k * PI * mu * t / (2.0 * l)).cos());
    }
    8.0 * p.force * l / (PI * PI * p.young * p.area) * sum
}

/// Diffusion on `[0, 1]` with unit diffusivity from
/// `(1+ε)(sin πx + ½ sin 3πx)`.
pub fn analytic_heat_rod(eps: f64, x: f64, t: f64) -> f64 {
    (1.0 + eps)
        * ((PI * x).sin() * (-PI * PI * t).exp()
            + 0.5 * (3.0 * PI * x).sin() * (-9.0 * PI * PI * t).exp())
}
