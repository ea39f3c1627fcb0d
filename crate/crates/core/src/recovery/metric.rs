use num_complex::Complex;

use crate::numerics::{norm2, Real};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuccessThresholds {
    /// Largest relative L2 error that still counts as a success.
    pub rel_err: f64,
}

impl Default for SuccessThresholds {
    fn default() -> Self {
        Self { rel_err: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuccessReport {
    pub success: bool,
    pub rel_err: f64,
    pub support_match: bool,
}

/// Scores an estimate against the truth: the `K` largest-magnitude entries
/// of `estimate` must sit exactly on the `K`-element support of `truth`, and
/// the relative L2 error must not exceed the threshold.
pub fn success_metric<T: Real>(
    estimate: &[Complex<T>],
    truth: &[Complex<T>],
    thresholds: SuccessThresholds,
) -> Result<SuccessReport> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "estimate has length {}, truth has length {}",
            estimate.len(),
            truth.len()
        )));
    }
    let truth_norm = norm2(truth).to_f64_lossy();
    if truth_norm == 0.0 {
        return Err(Error::UndefinedMetric);
    }
    let diff: Vec<Complex<T>> = estimate.iter().zip(truth).map(|(e, t)| e - t).collect();
    let rel_err = norm2(&diff).to_f64_lossy() / truth_norm;

    let mut support: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i].norm_sqr() > T::zero())
        .collect();
    let k = support.len();
    let mut order: Vec<usize> = (0..estimate.len()).collect();
    // stable sort keeps lower indices first among ties
    order.sort_by(|&i, &j| {
        estimate[j]
            .norm_sqr()
            .partial_cmp(&estimate[i].norm_sqr())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut largest: Vec<usize> = order.into_iter().take(k).collect();
    largest.sort_unstable();
    support.sort_unstable();
    let support_match = largest == support;

    Ok(SuccessReport {
        success: support_match && rel_err <= thresholds.rel_err,
        rel_err,
        support_match,
    })
}
