use rand::seq::index;
use rand::Rng;

use crate::numerics::{complex_gaussian_sample, RngStream};
use crate::{Error, Result, C64};

/// `K` entries of value `+-1` (equal odds) at a uniformly random support.
pub fn random_sparse_target(n: usize, k: usize, rng: &mut RngStream) -> Result<Vec<C64>> {
    if k > n {
        return Err(Error::Domain(format!("sparsity {k} exceeds dimension {n}")));
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for i in index::sample(rng, n, k).into_vec() {
        x[i] = C64::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0);
    }
    Ok(x)
}

/// Additive noise at a given SNR in dB; `f64::INFINITY` means noiseless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { snr_db: f64::INFINITY }
    }
}

/// Adds circular complex Gaussian noise with `sigma^2 = mean|y|^2 / 10^(snr/10)`.
/// Returns the noisy vector and the variance used.
pub fn add_noise(y: &[C64], spec: NoiseSpec, rng: &mut RngStream) -> Result<(Vec<C64>, f64)> {
    if spec.snr_db.is_nan() || spec.snr_db == f64::NEG_INFINITY {
        return Err(Error::Domain(format!("SNR must be finite or +inf, got {}", spec.snr_db)));
    }
    if spec.snr_db == f64::INFINITY {
        return Ok((y.to_vec(), 0.0));
    }
    let power = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / y.len().max(1) as f64;
    if !(power > 0.0) {
        return Err(Error::DegenerateSignal);
    }
    let variance = power / 10f64.powf(spec.snr_db / 10.0);
    let noise = complex_gaussian_sample::<f64>(rng, y.len(), variance)?;
    Ok((y.iter().zip(&noise).map(|(a, b)| a + b).collect(), variance))
}
