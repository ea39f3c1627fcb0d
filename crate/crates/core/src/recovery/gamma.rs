use super::super::numerics::Real;
use crate::{Error, Result};

/// Maximizer over `gamma >= 0` of the single-coefficient evidence term
/// [`evidence_term`], given the leave-one-out statistics `s` (real, positive)
/// and `|q|^2`, under a Gamma(1, lambda/2) hyperprior on `gamma`.
///
/// The positive root of the stationarity quadratic is evaluated in the
/// rationalized form `2c / (b + sqrt(b^2 - 4ac))`, which stays accurate as
/// `lambda -> 0` and reduces to `(|q|^2 - s) / s^2` at `lambda = 0`.
pub fn gamma_update<T: Real>(s: T, q_mag2: T, lambda: T) -> Result<T> {
    if !(s > T::zero()) || !s.is_finite() {
        return Err(Error::Domain(format!("gamma update needs s > 0, got {s}")));
    }
    if !(lambda >= T::zero()) || !(q_mag2 >= T::zero()) {
        return Err(Error::Domain(format!(
            "gamma update needs lambda >= 0 and |q|^2 >= 0, got {lambda}, {q_mag2}"
        )));
    }
    let excess = q_mag2 - s - lambda;
    if !(excess > T::zero()) {
        return Ok(T::zero());
    }
    let two = T::lit(2.0);
    let s2l = s + two * lambda;
    let disc = s2l * s2l + T::lit(4.0) * lambda * excess;
    Ok(two * excess / (s * s2l + s * disc.sqrt()))
}

/// `l(gamma) = 1/2 [ -ln(1 + gamma s) + gamma |q|^2 / (1 + gamma s) - lambda gamma ]`,
/// the part of the log evidence that depends on one coefficient's variance.
pub fn evidence_term<T: Real>(gamma: T, s: T, q_mag2: T, lambda: T) -> T {
    let gs = gamma * s;
    T::lit(0.5) * (-gs.ln_1p() + gamma * q_mag2 / (T::one() + gs) - lambda * gamma)
}

/// `d l / d gamma`.
pub fn evidence_term_derivative<T: Real>(gamma: T, s: T, q_mag2: T, lambda: T) -> T {
    let denom = T::one() + gamma * s;
    T::lit(0.5) * (-s / denom + q_mag2 / (denom * denom) - lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_threshold_is_pruned() {
        assert_eq!(gamma_update(1.0, 1.5, 0.5).unwrap(), 0.0);
        assert_eq!(gamma_update(1.0, 1.2, 0.5).unwrap(), 0.0);
        assert_eq!(gamma_update(2.0, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_lambda_limit() {
        assert_eq!(gamma_update(1.0, 2.0, 0.0).unwrap(), 1.0);
        let g = gamma_update(1.0_f64, 2.0, 1e-12).unwrap();
        assert!((g - 1.0).abs() < 1e-10);
    }

    #[test]
    fn matches_printed_quadratic_root() {
        let (s, q2, lam) = (0.7_f64, 5.0, 0.8);
        let printed = (-s * (s + 2.0 * lam)
            + s * ((s + 2.0 * lam).powi(2) - 4.0 * lam * (s - q2 + lam)).sqrt())
            / (2.0 * lam * s * s);
        let g = gamma_update(s, q2, lam).unwrap();
        assert!((g - printed).abs() < 1e-12 * printed);
    }

    #[test]
    fn stationary_and_better_than_zero() {
        let (s, q2, lam) = (1.3_f64, 9.0, 0.4);
        let g = gamma_update(s, q2, lam).unwrap();
        assert!(g > 0.0);
        assert!(evidence_term_derivative(g, s, q2, lam).abs() < 1e-12);
        assert!(evidence_term(g, s, q2, lam) > evidence_term(0.0, s, q2, lam));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(gamma_update(0.0, 1.0, 0.0).is_err());
        assert!(gamma_update(-1.0, 1.0, 0.0).is_err());
        assert!(gamma_update(1.0, 1.0, -0.1).is_err());
    }
}
