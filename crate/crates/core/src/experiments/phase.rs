use std::time::Instant;

use rayon::prelude::*;

use super::spec::{Ensemble, TrialSpec};
use crate::numerics::{complex_gaussian_sample, norm2, split_seed, ComplexMatrix, RngStream};
use crate::recovery::{sbl_recover, success_metric, SuccessThresholds};
use crate::scattering::{factorize_medium, Scene};
use crate::sensing::{
    add_noise, assemble_matrix, random_sparse_target, stack_real_imag, stack_vector, NoiseSpec, SparseBasis,
};
use crate::{Error, Result};

/// Seed-splitting tag for the Gaussian ensemble matrix.
const GAUSSIAN_MATRIX_TAG: u64 = 0x0067_6175_7373;

/// Effective dictionary `A Psi` (optionally stacked) shared by all trials.
#[derive(Clone, Debug)]
pub struct Dictionary {
    /// `A Psi` before any real/imaginary stacking.
    pub matrix: ComplexMatrix<f64>,
    pub stacked: bool,
    pub fingerprint: String,
}

impl Dictionary {
    pub fn build(spec: &TrialSpec) -> Result<Self> {
        spec.validate()?;
        let params = spec.effective_scene();
        let [nx, ny] = params.grid;
        let basis = SparseBasis::new(spec.basis, nx, ny)?;
        let (a, fingerprint) = match spec.ensemble {
            Ensemble::Physical => {
                let scene = Scene::build(&params)?;
                let solve = factorize_medium(&scene)?;
                let a = assemble_matrix(&scene, &solve)?;
                (a.matrix, a.scene_fingerprint)
            }
            Ensemble::Gaussian => {
                let (m, n) = (params.tx.count * params.rx.count, nx * ny);
                let mut rng = RngStream::new(split_seed(spec.master_seed, &[GAUSSIAN_MATRIX_TAG]), 0);
                let data = complex_gaussian_sample::<f64>(&mut rng, m * n, 1.0 / m as f64)?;
                (ComplexMatrix::from_row_major(m, n, data)?, format!("gaussian-{m}x{n}"))
            }
        };
        Ok(Self {
            matrix: basis.effective_matrix(&a)?,
            stacked: spec.stack_real_imag,
            fingerprint,
        })
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Matrix handed to the solver.
    pub fn solver_matrix(&self) -> ComplexMatrix<f64> {
        if self.stacked {
            stack_real_imag(&self.matrix)
        } else {
            self.matrix.clone()
        }
    }
}

/// Outcome of one trial, replayable from `(master_seed, k, trial)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub k: usize,
    pub trial: usize,
    pub seed: u64,
    pub success: bool,
    pub support_match: bool,
    pub rel_err: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
    /// Set when the trial failed with an error instead of producing an estimate.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub k: usize,
    pub successes: usize,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_rel_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub fingerprint: String,
}

#[derive(Clone, Debug)]
pub struct PhaseTransition {
    pub curve: Curve,
    pub records: Vec<TrialRecord>,
}

pub fn trial_seed(master: u64, k: usize, trial: usize) -> u64 {
    split_seed(master, &[k as u64, trial as u64])
}

/// Runs one trial of `spec` against a prebuilt dictionary.
pub fn run_trial(spec: &TrialSpec, dict: &Dictionary, solver_matrix: &ComplexMatrix<f64>, k: usize, trial: usize) -> TrialRecord {
    let seed = trial_seed(spec.master_seed, k, trial);
    let start = Instant::now();
    let mut record = TrialRecord {
        k,
        trial,
        seed,
        success: false,
        support_match: false,
        rel_err: f64::NAN,
        iterations: 0,
        converged: false,
        wall_time_s: 0.0,
        error: None,
    };
    match trial_outcome(spec, dict, solver_matrix, k, seed) {
        Ok(o) => {
            record.success = o.success;
            record.support_match = o.support_match;
            record.rel_err = o.rel_err;
            record.iterations = o.iterations;
            record.converged = o.converged;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record.wall_time_s = start.elapsed().as_secs_f64();
    record
}

struct Outcome {
    success: bool,
    support_match: bool,
    rel_err: f64,
    iterations: usize,
    converged: bool,
}

fn trial_outcome(spec: &TrialSpec, dict: &Dictionary, solver_matrix: &ComplexMatrix<f64>, k: usize, seed: u64) -> Result<Outcome> {
    let n = dict.cols();
    let theta = random_sparse_target(n, k, &mut RngStream::new(seed, 0))?;
    let clean = dict.matrix.mul_vec(&theta)?;
    let power = clean.iter().map(|z| z.norm_sqr()).sum::<f64>() / clean.len() as f64;
    // a zero target gets no noise: there is no signal to reference an SNR to
    let noise = match spec.snr_db {
        Some(snr) if k > 0 => NoiseSpec { snr_db: snr },
        _ => NoiseSpec::noiseless(),
    };
    let (y, variance) = add_noise(&clean, noise, &mut RngStream::new(seed, 1))?;
    let (y, variance, power) = if dict.stacked {
        (stack_vector(&y), variance / 2.0, power / 2.0)
    } else {
        (y, variance, power)
    };
    let config = spec.solver.sbl_config(variance, power);
    let result = sbl_recover(solver_matrix, &y, &config)?;
    let (success, support_match, rel_err) = if k == 0 {
        let residual = norm2(&result.estimate);
        (residual == 0.0, residual == 0.0, residual)
    } else {
        let report = success_metric(
            &result.estimate,
            &theta,
            SuccessThresholds {
                rel_err: spec.success_rel_err,
            },
        )?;
        (report.success, report.support_match, report.rel_err)
    };
    Ok(Outcome {
        success,
        support_match,
        rel_err,
        iterations: result.iterations,
        converged: result.converged,
    })
}

/// Sweeps every `K` in the spec, `trials` times each. Trials run in parallel
/// and are collected in `(K, trial)` order, so results do not depend on the
/// schedule. `progress` is called once per completed `K`.
pub fn run_phase_transition_with(spec: &TrialSpec, mut progress: impl FnMut(&CurvePoint)) -> Result<PhaseTransition> {
    let dict = Dictionary::build(spec)?;
    let solver_matrix = dict.solver_matrix();
    let mut points = Vec::new();
    let mut records = Vec::new();
    for k in spec.k_range.values() {
        let batch: Vec<TrialRecord> = (0..spec.trials)
            .into_par_iter()
            .map(|t| run_trial(spec, &dict, &solver_matrix, k, t))
            .collect();
        let successes = batch.iter().filter(|r| r.success).count();
        let finite: Vec<f64> = batch.iter().map(|r| r.rel_err).filter(|e| e.is_finite()).collect();
        let mean_rel_err = if finite.is_empty() {
            f64::NAN
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        };
        let point = CurvePoint {
            k,
            successes,
            trials: spec.trials,
            success_rate: successes as f64 / spec.trials as f64,
            mean_rel_err,
        };
        progress(&point);
        points.push(point);
        records.extend(batch);
    }
    Ok(PhaseTransition {
        curve: Curve {
            points,
            fingerprint: spec.fingerprint(),
        },
        records,
    })
}

pub fn run_phase_transition(spec: &TrialSpec) -> Result<PhaseTransition> {
    run_phase_transition_with(spec, |_| {})
}

/// Largest `K` whose success rate reaches `threshold`; 0 if none does.
pub fn knee_point(curve: &Curve, threshold: f64) -> usize {
    curve
        .points
        .iter()
        .filter(|p| p.success_rate >= threshold)
        .map(|p| p.k)
        .max()
        .unwrap_or(0)
}

/// Spearman rank correlation between `K` and success rate (average ranks for ties).
pub fn spearman(curve: &Curve) -> f64 {
    let ks: Vec<f64> = curve.points.iter().map(|p| p.k as f64).collect();
    let rates: Vec<f64> = curve.points.iter().map(|p| p.success_rate).collect();
    let (rk, rr) = (ranks(&ks), ranks(&rates));
    let n = rk.len() as f64;
    let (mk, mr) = (rk.iter().sum::<f64>() / n, rr.iter().sum::<f64>() / n);
    let cov: f64 = rk.iter().zip(&rr).map(|(a, b)| (a - mk) * (b - mr)).sum();
    let vk: f64 = rk.iter().map(|a| (a - mk).powi(2)).sum();
    let vr: f64 = rr.iter().map(|b| (b - mr).powi(2)).sum();
    if vk == 0.0 || vr == 0.0 {
        return 0.0;
    }
    cov / (vk * vr).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct KneeRow {
    pub resolution: f64,
    pub k_random: usize,
    pub k_free: usize,
}

#[derive(Clone, Debug)]
pub struct ResolutionSweep {
    pub rows: Vec<KneeRow>,
    /// `(resolution, random-media run, free-space run)`.
    pub runs: Vec<(f64, PhaseTransition, PhaseTransition)>,
}

/// Paired phase transitions (medium on, medium off) at each resolution.
pub fn resolution_sweep(base: &TrialSpec, resolutions: &[f64], threshold: f64) -> Result<ResolutionSweep> {
    resolution_sweep_with(base, resolutions, threshold, |_, _, _| {})
}

pub fn resolution_sweep_with(
    base: &TrialSpec,
    resolutions: &[f64],
    threshold: f64,
    mut progress: impl FnMut(f64, bool, &CurvePoint),
) -> Result<ResolutionSweep> {
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for &res in resolutions {
        if !(res > 0.0 && res.is_finite()) {
            return Err(Error::Domain(format!("resolution must be positive, got {res}")));
        }
        let mut with = base.clone();
        with.scene.resolution_fraction = res;
        with.medium_enabled = true;
        let mut without = with.clone();
        without.medium_enabled = false;
        let random = run_phase_transition_with(&with, |p| progress(res, true, p))?;
        let free = run_phase_transition_with(&without, |p| progress(res, false, p))?;
        rows.push(KneeRow {
            resolution: res,
            k_random: knee_point(&random.curve, threshold),
            k_free: knee_point(&free.curve, threshold),
        });
        runs.push((res, random, free));
    }
    Ok(ResolutionSweep { rows, runs })
}

/// Replays a single recorded trial.
pub fn replay_trial(spec: &TrialSpec, k: usize, trial: usize) -> Result<TrialRecord> {
    let dict = Dictionary::build(spec)?;
    let solver_matrix = dict.solver_matrix();
    Ok(run_trial(spec, &dict, &solver_matrix, k, trial))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[(usize, f64)]) -> Curve {
        Curve {
            points: points
                .iter()
                .map(|&(k, r)| CurvePoint {
                    k,
                    successes: (r * 10.0) as usize,
                    trials: 10,
                    success_rate: r,
                    mean_rel_err: 0.0,
                })
                .collect(),
            fingerprint: String::new(),
        }
    }

    #[test]
    fn knee_examples() {
        let c = curve(&[(1, 1.0), (2, 1.0), (3, 0.9), (4, 0.2)]);
        assert_eq!(knee_point(&c, 0.95), 2);
        assert_eq!(knee_point(&c, 0.0), 4);
        assert_eq!(knee_point(&curve(&[(1, 1.0), (5, 1.0)]), 0.95), 5);
        assert_eq!(knee_point(&curve(&[(1, 0.5)]), 0.95), 0);
    }

    #[test]
    fn spearman_signs() {
        assert!((spearman(&curve(&[(1, 1.0), (2, 0.8), (3, 0.3)])) + 1.0).abs() < 1e-12);
        assert!((spearman(&curve(&[(1, 0.1), (2, 0.8), (3, 0.9)])) - 1.0).abs() < 1e-12);
        assert_eq!(spearman(&curve(&[(1, 1.0), (2, 1.0)])), 0.0);
    }

    #[test]
    fn average_ranks_for_ties() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }
}
