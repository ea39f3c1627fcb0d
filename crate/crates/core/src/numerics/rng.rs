//! Seeded random streams. All randomness in the crate flows through
//! [`RngStream`]; there is no global generator.

use num_complex::Complex;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::Real;
use crate::{Error, Result};

/// ChaCha20 keyed by a 64-bit seed, with a 64-bit stream id selecting an
/// independent keystream. Identical `(seed, stream)` pairs give identical
/// draws on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Standard normal draw.
    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Deterministically mixes `parts` into `master` (SplitMix64 finalizer per
/// part). Used to derive per-trial seeds.
pub fn split_seed(master: u64, parts: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts.iter().fold(mix(master), |acc, &p| mix(acc ^ mix(p)))
}

/// `n` circularly-symmetric complex Gaussian draws with `E|z|^2 = variance`;
/// real and imaginary parts are independent `N(0, variance / 2)`.
pub fn complex_gaussian_sample<T: Real>(
    rng: &mut RngStream,
    n: usize,
    variance: T,
) -> Result<Vec<Complex<T>>> {
    if !(variance >= T::zero()) || !variance.is_finite() {
        return Err(Error::Domain(format!(
            "complex Gaussian variance must be finite and non-negative, got {variance}"
        )));
    }
    if variance == T::zero() {
        return Ok(vec![Complex::new(T::zero(), T::zero()); n]);
    }
    let sd = (variance / T::lit(2.0)).sqrt();
    Ok((0..n)
        .map(|_| {
            let re = T::lit(rng.normal());
            let im = T::lit(rng.normal());
            Complex::new(re * sd, im * sd)
        })
        .collect())
}
