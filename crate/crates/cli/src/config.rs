//! JSON run configuration. Every field has a default, so `{}` is a valid
//! config; unknown keys are rejected.

use std::path::PathBuf;

use cdt_core::experiments::{
    BetaSetting, DemoSettings, Ensemble, KRange, LambdaSetting, SolverSettings, TrialSpec,
};
use cdt_core::scattering::SceneParams;
use cdt_core::sensing::BasisKind;
use cdt_core::C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Stamped into `meta.json`; ignored on input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    pub scene: SceneParams,
    pub solver: SolverSection,
    pub experiment: ExperimentSection,
    pub demo: DemoSection,
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    Sbl,
    Tikhonov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub method: SolverMethod,
    /// Tikhonov weight; required when `method` is `tikhonov`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub lambda: LambdaSetting,
    pub nu: f64,
    pub beta_mode: BetaSetting,
    pub max_iters: usize,
    pub tol: f64,
    /// Noise variance of externally supplied data, used by `beta_mode: "known"`
    /// in `recover`. Without it `known` falls back to estimation there.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_variance: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            method: SolverMethod::Sbl,
            alpha: None,
            lambda: s.lambda,
            nu: s.nu,
            beta_mode: s.beta_mode,
            max_iters: s.max_iters,
            tol: s.tol,
            noise_variance: None,
        }
    }
}

impl SolverSection {
    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            lambda: self.lambda,
            nu: self.nu,
            beta_mode: self.beta_mode,
            max_iters: self.max_iters,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(alias = "K_range")]
    pub k_range: KRange,
    pub trials: usize,
    /// `null` means noiseless.
    pub snr_db: Option<f64>,
    pub basis: BasisKind,
    pub master_seed: u64,
    pub stack_real_imag: bool,
    pub ensemble: Ensemble,
    pub medium_enabled: bool,
    pub success_rel_err: f64,
    pub knee_threshold: f64,
    /// Cell sizes (fractions of the wavelength) visited by `resolution-sweep`.
    pub resolutions: Vec<f64>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let t = TrialSpec::default();
        Self {
            k_range: t.k_range,
            trials: t.trials,
            snr_db: t.snr_db,
            basis: t.basis,
            master_seed: t.master_seed,
            stack_real_imag: t.stack_real_imag,
            ensemble: t.ensemble,
            medium_enabled: t.medium_enabled,
            success_rel_err: t.success_rel_err,
            knee_threshold: 0.95,
            resolutions: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoSection {
    /// Tikhonov weight relative to `trace(A A^H) / M`.
    pub tikhonov_alpha: f64,
    /// Contrast per cell as `[re, im]`; `null` selects the built-in sparse target.
    pub target: Option<Vec<[f64; 2]>>,
}

impl Default for DemoSection {
    fn default() -> Self {
        Self {
            tikhonov_alpha: DemoSettings::default().tikhonov_alpha,
            target: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("runs") }
    }
}

impl RunConfig {
    pub fn trial_spec(&self) -> TrialSpec {
        let e = &self.experiment;
        TrialSpec {
            scene: self.scene,
            medium_enabled: e.medium_enabled,
            ensemble: e.ensemble,
            basis: e.basis,
            k_range: e.k_range.clone(),
            trials: e.trials,
            snr_db: e.snr_db,
            solver: self.solver.settings(),
            master_seed: e.master_seed,
            stack_real_imag: e.stack_real_imag,
            success_rel_err: e.success_rel_err,
        }
    }

    pub fn demo_settings(&self) -> DemoSettings {
        DemoSettings {
            snr_db: self.experiment.snr_db,
            tikhonov_alpha: self.demo.tikhonov_alpha,
            solver: self.solver.settings(),
            seed: self.experiment.master_seed,
        }
    }

    pub fn demo_target(&self) -> Option<Vec<C64>> {
        self.demo
            .target
            .as_ref()
            .map(|t| t.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }

    /// Checks that cannot be expressed in the schema.
    pub fn validate(&self) -> Result<(), String> {
        self.trial_spec().validate().map_err(|e| e.to_string())?;
        if self.solver.method == SolverMethod::Tikhonov && self.solver.alpha.is_none() {
            return Err("solver.alpha is required when solver.method is \"tikhonov\"".into());
        }
        if let Some(a) = self.solver.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(format!("solver.alpha must be positive, got {a}"));
            }
        }
        if !(0.0..=1.0).contains(&self.experiment.knee_threshold) {
            return Err("experiment.knee_threshold must lie in [0, 1]".into());
        }
        if let Some(t) = &self.demo.target {
            let n = self.scene.grid[0] * self.scene.grid[1];
            if t.len() != n {
                return Err(format!("demo.target has {} cells, grid has {n}", t.len()));
            }
        }
        if !(self.demo.tikhonov_alpha > 0.0) {
            return Err("demo.tikhonov_alpha must be positive".into());
        }
        Ok(())
    }

    /// Identifies a run: the command plus every setting except the version
    /// stamp and the output location.
    pub fn fingerprint(&self, command: &str) -> String {
        let mut c = self.clone();
        c.version = None;
        c.output = OutputSection::default();
        cdt_core::fingerprint(&(command, c))
    }
}
