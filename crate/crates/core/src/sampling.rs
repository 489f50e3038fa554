//! Seeded random draws shared by the audits.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type AuditRng = ChaCha8Rng;

pub fn rng(seed: u64) -> AuditRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut AuditRng, dim: usize) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Uniform direction on the unit sphere; `None` in dimension zero.
pub fn unit_vector(rng: &mut AuditRng, dim: usize) -> Option<DVector<f64>> {
    if dim == 0 {
        return None;
    }
    loop {
        let g = gaussian(rng, dim);
        let n = g.norm();
        if n > 1e-12 {
            return Some(g / n);
        }
    }
}

/// Uniform point in the closed ball of the given radius.
pub fn in_ball(rng: &mut AuditRng, dim: usize, radius: f64) -> DVector<f64> {
    match unit_vector(rng, dim) {
        None => DVector::zeros(0),
        Some(v) => {
            let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
            v * r
        }
    }
}
