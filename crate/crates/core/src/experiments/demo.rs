use serde::{Deserialize, Serialize};

use super::spec::SolverSettings;
use crate::numerics::{norm2, RngStream};
use crate::recovery::{sbl_recover, tikhonov_recover};
use crate::scattering::{factorize_medium, solve_full_forward, Scene, SceneParams};
use crate::sensing::{add_noise, assemble_matrix, NoiseSpec};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Background {
    FreeSpace,
    RandomMedia,
}

impl Background {
    pub fn as_str(self) -> &'static str {
        match self {
            Background::FreeSpace => "free_space",
            Background::RandomMedia => "random_media",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tikhonov,
    Sbl,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Tikhonov => "tikhonov",
            Method::Sbl => "sbl",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoSettings {
    /// `None` means noiseless.
    #[serde(default = "default_snr")]
    pub snr_db: Option<f64>,
    /// Tikhonov weight relative to `trace(A A^H) / M`.
    #[serde(default = "default_alpha")]
    pub tikhonov_alpha: f64,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub seed: u64,
}

fn default_snr() -> Option<f64> {
    Some(30.0)
}

fn default_alpha() -> f64 {
    1e-2
}

impl Default for DemoSettings {
    fn default() -> Self {
        Self {
            snr_db: default_snr(),
            tikhonov_alpha: default_alpha(),
            solver: SolverSettings::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub background: Background,
    pub method: Method,
    pub image: Vec<C64>,
    /// `|x_hat - x| / |x|`, or `|x_hat|` for a zero target.
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DemoResult {
    pub truth: Vec<C64>,
    /// Free space then random media, Tikhonov before SBL within each.
    pub reconstructions: Vec<Reconstruction>,
}

/// Sparse pixel target on the scene grid: six cells of contrast 0.05.
pub fn default_demo_target(scene: &SceneParams) -> Vec<C64> {
    let [nx, ny] = scene.grid;
    let mut x = vec![C64::new(0.0, 0.0); nx * ny];
    for (fx, fy) in [(0.25, 0.25), (0.7, 0.3), (0.5, 0.5), (0.3, 0.75), (0.75, 0.7), (0.55, 0.85)] {
        let ix = ((fx * nx as f64) as usize).min(nx - 1);
        let iy = ((fy * ny as f64) as usize).min(ny - 1);
        x[iy * nx + ix] = C64::new(0.05, 0.0);
    }
    x
}

/// Synthesizes data with the full forward solver in both backgrounds and
/// reconstructs with Tikhonov and SBL in each.
pub fn run_demo(scene: &SceneParams, target: &[C64], settings: &DemoSettings) -> Result<DemoResult> {
    let n = scene.grid[0] * scene.grid[1];
    if target.len() != n {
        return Err(Error::DimensionMismatch(format!("target has {} cells, grid has {n}", target.len())));
    }
    if !(settings.tikhonov_alpha > 0.0) {
        return Err(Error::Domain("tikhonov_alpha must be positive".into()));
    }
    let truth_norm = norm2(target);
    let mut reconstructions = Vec::new();
    for (b, background) in [Background::FreeSpace, Background::RandomMedia].into_iter().enumerate() {
        let params = match background {
            Background::FreeSpace => scene.free_space(),
            Background::RandomMedia => *scene,
        };
        let built = Scene::build(&params)?;
        let solve = factorize_medium(&built)?;
        let a = assemble_matrix(&built, &solve)?;
        let clean = a.vectorize(&solve_full_forward(&built, &solve, target)?)?;
        let noise = match settings.snr_db {
            Some(snr) if truth_norm > 0.0 => NoiseSpec { snr_db: snr },
            _ => NoiseSpec::noiseless(),
        };
        let (y, variance) = add_noise(&clean, noise, &mut RngStream::new(settings.seed, b as u64))?;
        let m = a.rows() as f64;
        let power = clean.iter().map(|z| z.norm_sqr()).sum::<f64>() / m;

        let alpha = settings.tikhonov_alpha * a.matrix.frobenius_norm().powi(2) / m;
        let tik = tikhonov_recover(&a.matrix, &y, alpha)?;
        let sbl = sbl_recover(&a.matrix, &y, &settings.solver.sbl_config(variance, power))?.estimate;
        for (method, image) in [(Method::Tikhonov, tik), (Method::Sbl, sbl)] {
            let diff: Vec<C64> = image.iter().zip(target).map(|(p, q)| p - q).collect();
            let rel_err = if truth_norm > 0.0 {
                norm2(&diff) / truth_norm
            } else {
                norm2(&image)
            };
            reconstructions.push(Reconstruction {
                background,
                method,
                image,
                rel_err,
            });
        }
    }
    Ok(DemoResult {
        truth: target.to_vec(),
        reconstructions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_target_is_sparse_and_in_grid() {
        let x = default_demo_target(&SceneParams::default());
        assert_eq!(x.len(), 256);
        assert_eq!(x.iter().filter(|z| z.norm() > 0.0).count(), 6);
    }

    #[test]
    fn zero_target_reconstructs_to_zero() {
        let mut p = SceneParams::default();
        p.grid = [4, 4];
        p.medium.count = 8;
        let r = run_demo(&p, &vec![C64::new(0.0, 0.0); 16], &DemoSettings::default()).unwrap();
        assert_eq!(r.reconstructions.len(), 4);
        for rec in &r.reconstructions {
            assert_eq!(rec.rel_err, 0.0, "{:?} {:?}", rec.background, rec.method);
        }
    }

    #[test]
    fn mismatched_target_is_rejected() {
        assert!(run_demo(&SceneParams::default(), &[C64::new(1.0, 0.0)], &DemoSettings::default()).is_err());
    }
}
