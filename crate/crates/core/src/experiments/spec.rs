use serde::{Deserialize, Serialize};

use crate::recovery::{BetaMode, LambdaMode, SblConfig};
use crate::scattering::SceneParams;
use crate::sensing::BasisKind;
use crate::{Error, Result};

/// Relative floor on the noise variance used when the data are noiseless,
/// so that the noise precision stays finite.
pub const NOISELESS_VARIANCE_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// `"auto"` or a fixed non-negative rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSetting {
    Auto(AutoTag),
    Fixed(f64),
}

/// Noise precision source: the variance the data were generated with
/// (`"known"`), a running estimate, or a fixed value (`{"fixed": beta}`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaSetting {
    Known,
    Estimate,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_lambda")]
    pub lambda: LambdaSetting,
    #[serde(default)]
    pub nu: f64,
    #[serde(default = "default_beta")]
    pub beta_mode: BetaSetting,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_lambda() -> LambdaSetting {
    LambdaSetting::Auto(AutoTag::Auto)
}

fn default_beta() -> BetaSetting {
    BetaSetting::Known
}

fn default_max_iters() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-8
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            lambda: default_lambda(),
            nu: 0.0,
            beta_mode: default_beta(),
            max_iters: default_max_iters(),
            tol: default_tol(),
        }
    }
}

impl SolverSettings {
    /// Solver configuration for data whose per-entry noise variance is
    /// `variance` and mean power is `power`.
    pub fn sbl_config(&self, variance: f64, power: f64) -> SblConfig<f64> {
        let beta = match self.beta_mode {
            BetaSetting::Known => {
                let floor = NOISELESS_VARIANCE_FLOOR * power;
                let v = variance.max(floor);
                if v > 0.0 {
                    BetaMode::Fixed(1.0 / v)
                } else {
                    BetaMode::Estimate
                }
            }
            BetaSetting::Estimate => BetaMode::Estimate,
            BetaSetting::Fixed(b) => BetaMode::Fixed(b),
        };
        SblConfig {
            lambda: match self.lambda {
                LambdaSetting::Auto(_) => LambdaMode::Auto,
                LambdaSetting::Fixed(l) => LambdaMode::Fixed(l),
            },
            nu: self.nu,
            beta,
            max_iterations: self.max_iters,
            tolerance: self.tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Domain("max_iters must be positive".into()));
        }
        if let BetaSetting::Fixed(b) = self.beta_mode {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::Domain(format!("fixed beta must be > 0, got {b}")));
            }
        }
        self.sbl_config(1.0, 1.0).validate()
    }
}

/// Sparsity levels `start, start+step, ..., <= end` merged with `extra`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
    #[serde(default)]
    pub extra: Vec<usize>,
}

impl Default for KRange {
    fn default() -> Self {
        Self {
            start: 1,
            end: 96,
            step: 5,
            extra: (2..=30).collect(),
        }
    }
}

impl KRange {
    pub fn values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = if self.step == 0 {
            vec![self.start]
        } else {
            (self.start..=self.end).step_by(self.step).collect()
        };
        v.extend(&self.extra);
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn list(values: &[usize]) -> Self {
        Self {
            start: values.first().copied().unwrap_or(0),
            end: values.first().copied().unwrap_or(0),
            step: 0,
            extra: values.to_vec(),
        }
    }
}

/// Where the measurement matrix comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Born matrix of the scene (with or without its medium).
    Physical,
    /// Complex Gaussian matrix with the scene's `(M, N)` and entry variance `1/M`.
    Gaussian,
}

/// Full description of a phase-transition run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialSpec {
    pub scene: SceneParams,
    #[serde(default = "default_true")]
    pub medium_enabled: bool,
    #[serde(default = "default_ensemble")]
    pub ensemble: Ensemble,
    #[serde(default = "default_basis")]
    pub basis: BasisKind,
    #[serde(default)]
    pub k_range: KRange,
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// `None` means noiseless.
    #[serde(default = "default_snr")]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub stack_real_imag: bool,
    /// Largest relative error counted as a success.
    #[serde(default = "default_success_rel_err")]
    pub success_rel_err: f64,
}

fn default_true() -> bool {
    true
}

fn default_ensemble() -> Ensemble {
    Ensemble::Physical
}

fn default_basis() -> BasisKind {
    BasisKind::Identity
}

fn default_trials() -> usize {
    40
}

fn default_snr() -> Option<f64> {
    Some(30.0)
}

fn default_success_rel_err() -> f64 {
    0.05
}

impl Default for TrialSpec {
    fn default() -> Self {
        Self {
            scene: SceneParams::default(),
            medium_enabled: true,
            ensemble: default_ensemble(),
            basis: default_basis(),
            k_range: KRange::default(),
            trials: default_trials(),
            snr_db: default_snr(),
            solver: SolverSettings::default(),
            master_seed: 0,
            stack_real_imag: false,
            success_rel_err: default_success_rel_err(),
        }
    }
}

impl TrialSpec {
    /// Scene parameters with the medium switched according to `medium_enabled`.
    pub fn effective_scene(&self) -> SceneParams {
        if self.medium_enabled {
            self.scene
        } else {
            self.scene.free_space()
        }
    }

    pub fn num_cells(&self) -> usize {
        self.scene.grid[0] * self.scene.grid[1]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_cells();
        let ks = self.k_range.values();
        if let Some(&k) = ks.iter().find(|&&k| k > n) {
            return Err(Error::Domain(format!("sparsity {k} exceeds the {n} grid cells")));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::Domain("snr_db must be finite (use null for noiseless)".into()));
            }
        }
        if !(self.success_rel_err > 0.0) {
            return Err(Error::Domain("success_rel_err must be positive".into()));
        }
        self.solver.validate()
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn fingerprint(&self) -> String {
        crate::fingerprint(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_range_merges_and_sorts() {
        let r = KRange {
            start: 1,
            end: 20,
            step: 5,
            extra: vec![3, 6, 2],
        };
        assert_eq!(r.values(), vec![1, 2, 3, 6, 11, 16]);
        assert_eq!(KRange::list(&[4, 1]).values(), vec![1, 4]);
    }

    #[test]
    fn solver_settings_parse_both_lambda_forms() {
        let s: SolverSettings = serde_json::from_str(r#"{"lambda": "auto", "beta_mode": {"fixed": 10.0}}"#).unwrap();
        assert_eq!(s.lambda, LambdaSetting::Auto(AutoTag::Auto));
        assert_eq!(s.beta_mode, BetaSetting::Fixed(10.0));
        let s: SolverSettings = serde_json::from_str(r#"{"lambda": 0.5, "beta_mode": "estimate"}"#).unwrap();
        assert_eq!(s.lambda, LambdaSetting::Fixed(0.5));
        assert!(serde_json::from_str::<SolverSettings>(r#"{"lamda": 1}"#).is_err());
    }

    #[test]
    fn known_beta_floors_noiseless_variance() {
        let cfg = SolverSettings::default().sbl_config(0.0, 4.0);
        assert_eq!(cfg.beta, BetaMode::Fixed(1.0 / (4.0 * NOISELESS_VARIANCE_FLOOR)));
        let cfg = SolverSettings::default().sbl_config(0.5, 4.0);
        assert_eq!(cfg.beta, BetaMode::Fixed(2.0));
    }

    #[test]
    fn spec_round_trips_and_validates() {
        let spec = TrialSpec::default();
        spec.validate().unwrap();
        let back: TrialSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(spec, back);
        let mut bad = spec.clone();
        bad.k_range = KRange::list(&[300]);
        assert!(bad.validate().is_err());
    }
}
