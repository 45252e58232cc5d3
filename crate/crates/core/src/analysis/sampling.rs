use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sets::Hyperrectangle;

/// Seeded stream of random vertices of a box: each coordinate is
/// `c_i ± r_i` with equal probability.
pub struct VertexSampler {
    center: DVector<f64>,
    radius: DVector<f64>,
    rng: ChaCha8Rng,
}

impl VertexSampler {
    pub fn new(h: &Hyperrectangle, seed: u64) -> Self {
        VertexSampler {
            center: h.center().clone(),
            radius: h.radius().clone(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Iterator for VertexSampler {
    type Item = DVector<f64>;

    fn next(&mut self) -> Option<DVector<f64>> {
        let mut x = self.center.clone();
        for i in 0..x.len() {
            if self.radius[i] != 0.0 {
                let s = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
                x[i] += s * self.radius[i];
            }
        }
        Some(x)
    }
}

pub fn vertex_samples(h: &Hyperrectangle, count: usize, seed: u64) -> Vec<DVector<f64>> {
    VertexSampler::new(h, seed).take(count).collect()
}
