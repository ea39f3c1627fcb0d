//! Scalar densities of the two-stage sparsity prior, used to check that the
//! Gaussian scale mixture marginalizes to a Laplace law.

use crate::numerics::Real;

/// Real Gaussian density `N(w | 0, gamma)`.
pub fn gaussian_density<T: Real>(w: T, gamma: T) -> T {
    (-(w * w) / (T::lit(2.0) * gamma)).exp() / (T::lit(2.0) * T::PI() * gamma).sqrt()
}

/// `Gamma(gamma | 1, lambda/2)`, i.e. exponential with rate `lambda/2`.
pub fn exponential_hyperprior_density<T: Real>(gamma: T, lambda: T) -> T {
    let rate = lambda / T::lit(2.0);
    rate * (-rate * gamma).exp()
}

/// Laplace density `sqrt(lambda)/2 exp(-sqrt(lambda) |w|)` obtained by
/// integrating the product of the two densities above over `gamma`.
pub fn laplace_density<T: Real>(w: T, lambda: T) -> T {
    let r = lambda.sqrt();
    r / T::lit(2.0) * (-r * w.abs()).exp()
}
