//! Bessel functions of the first and second kind of orders 0 and 1, and the
//! matching Hankel functions of the first kind.
//!
//! Small arguments use the ascending power series, large arguments the
//! Hankel asymptotic expansion truncated at its smallest term. The crossover
//! sits at `x = 12`, where the series loses under 1e-12 to cancellation and
//! the asymptotic remainder is below 1e-10 (in `f64`).

use num_complex::Complex;

use super::Real;
use crate::{Error, Result};

const CROSSOVER: f64 = 12.0;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `J0(x)` for any real `x`.
pub fn bessel_j0<T: Real>(x: T) -> T {
    let x = x.abs();
    if x <= T::lit(CROSSOVER) {
        series_j0(x).0
    } else {
        asymptotic(0, x).0
    }
}

/// `J1(x)` for any real `x`.
pub fn bessel_j1<T: Real>(x: T) -> T {
    let ax = x.abs();
    let v = if ax <= T::lit(CROSSOVER) {
        series_j1(ax).0
    } else {
        asymptotic(1, ax).0
    };
    if x < T::zero() {
        -v
    } else {
        v
    }
}

/// Returns `(J0(x), Y0(x))`. `Y0` is only defined for `x > 0`.
pub fn bessel_j0y0<T: Real>(x: T) -> Result<(T, T)> {
    check_positive(x)?;
    if x <= T::lit(CROSSOVER) {
        let (j0, harmonic_sum) = series_j0(x);
        let two_over_pi = T::FRAC_2_PI();
        let y0 = two_over_pi * ((x / T::lit(2.0)).ln() + T::lit(EULER_GAMMA)) * j0
            + two_over_pi * harmonic_sum;
        Ok((j0, y0))
    } else {
        Ok(asymptotic(0, x))
    }
}

/// Returns `(J1(x), Y1(x))` for `x > 0`.
pub fn bessel_j1y1<T: Real>(x: T) -> Result<(T, T)> {
    check_positive(x)?;
    if x <= T::lit(CROSSOVER) {
        let (j1, harmonic_sum) = series_j1(x);
        let y1 = T::FRAC_2_PI() * ((x / T::lit(2.0)).ln() + T::lit(EULER_GAMMA)) * j1
            - T::FRAC_2_PI() / x
            - T::FRAC_1_PI() * harmonic_sum;
        Ok((j1, y1))
    } else {
        Ok(asymptotic(1, x))
    }
}

/// Hankel function of the first kind, `H_n(x) = J_n(x) + i Y_n(x)`, for
/// `n` in `{0, 1}` and `x > 0`.
pub fn hankel1<T: Real>(order: u32, x: T) -> Result<Complex<T>> {
    let (j, y) = match order {
        0 => bessel_j0y0(x)?,
        1 => bessel_j1y1(x)?,
        n => {
            return Err(Error::Domain(format!(
                "Hankel order {n} not supported (only 0 and 1)"
            )))
        }
    };
    Ok(Complex::new(j, y))
}

fn check_positive<T: Real>(x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "Bessel function of the second kind needs x > 0, got {x}"
        )))
    }
}

/// Ascending series for `J0`, plus `sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2`
/// which carries the non-logarithmic part of `Y0`.
fn series_j0<T: Real>(x: T) -> (T, T) {
    let quarter_x2 = x * x / T::lit(4.0);
    let eps = T::epsilon();
    let mut term = T::one();
    let mut j0 = T::one();
    let mut harmonic = T::zero();
    let mut harmonic_sum = T::zero();
    let mut k = 1u32;
    loop {
        let kf = T::from_u32(k).unwrap();
        term = -term * quarter_x2 / (kf * kf);
        harmonic += T::one() / kf;
        j0 += term;
        // term carries (-1)^k, the Y0 sum wants (-1)^{k+1}
        harmonic_sum -= harmonic * term;
        if kf > x && term.abs() * (T::one() + harmonic) < eps * T::lit(1e-3) {
            break;
        }
        if k > 200 {
            break;
        }
        k += 1;
    }
    (j0, harmonic_sum)
}

/// Ascending series for `J1`, plus
/// `sum_{k>=0} (-1)^k (H_k + H_{k+1}) (x/2)^{2k+1} / (k! (k+1)!)`.
fn series_j1<T: Real>(x: T) -> (T, T) {
    let quarter_x2 = x * x / T::lit(4.0);
    let eps = T::epsilon();
    let mut term = x / T::lit(2.0);
    let mut j1 = term;
    let mut h_k = T::zero();
    let mut h_k1 = T::one();
    let mut harmonic_sum = term * (h_k + h_k1);
    let mut k = 1u32;
    loop {
        let kf = T::from_u32(k).unwrap();
        term = -term * quarter_x2 / (kf * (kf + T::one()));
        h_k = h_k1;
        h_k1 += T::one() / (kf + T::one());
        j1 += term;
        harmonic_sum += term * (h_k + h_k1);
        if kf > x && term.abs() * (T::one() + h_k1) < eps * T::lit(1e-3) {
            break;
        }
        if k > 200 {
            break;
        }
        k += 1;
    }
    (j1, harmonic_sum)
}

/// Hankel asymptotic expansion for order `nu`; returns `(J_nu, Y_nu)`.
fn asymptotic<T: Real>(nu: u32, x: T) -> (T, T) {
    let mu = T::from_u32(4 * nu * nu).unwrap();
    let eight_x = T::lit(8.0) * x;
    let mut p = T::one();
    let mut q = T::zero();
    let mut term = T::one();
    for k in 1u32..100 {
        let odd = T::from_u32(2 * k - 1).unwrap();
        let next = term * (mu - odd * odd) / (T::from_u32(k).unwrap() * eight_x);
        if k > 2 && next.abs() >= term.abs() {
            break;
        }
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < T::epsilon() * T::lit(1e-2) {
            break;
        }
    }
    let phase = x - (T::from_u32(nu).unwrap() / T::lit(2.0) + T::lit(0.25)) * T::PI();
    let (sin, cos) = phase.sin_cos();
    let amplitude = (T::FRAC_2_PI() / x).sqrt();
    (
        amplitude * (p * cos - q * sin),
        amplitude * (p * sin + q * cos),
    )
}
