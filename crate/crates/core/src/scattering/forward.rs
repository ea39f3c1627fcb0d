use std::f64::consts::PI;

use rayon::prelude::*;

use super::green::{green_free, MediumSolve};
use super::scene::{Point2, Scene};
use crate::numerics::{hankel1, ComplexMatrix, Lu};
use crate::{Error, Result, C64};

/// Condition estimate above which the full forward system is rejected.
pub const FORWARD_CONDITION_LIMIT: f64 = 1e13;

/// Background fields sampled at every cell center.
#[derive(Clone, Debug)]
pub struct CellFields {
    /// `incident[(s, j)]`: field of transmitter `s` at cell `j`.
    pub incident: ComplexMatrix<f64>,
    /// `to_receivers[(r, j)]`: `G_bg(r_R, r_j)`.
    pub to_receivers: ComplexMatrix<f64>,
}

/// Medium amplitudes excited by a unit source at each point, in parallel.
fn excitations(solve: &MediumSolve, points: &[Point2]) -> Result<Vec<Vec<C64>>> {
    points.par_iter().map(|&p| solve.excitation(p)).collect()
}

/// `G_bg(obs, source)` given the precomputed medium response to `source`.
fn green_with(k: f64, obs: Point2, source: Point2, u: &[C64], coupling: &[C64]) -> Result<C64> {
    let mut g = green_free(k, obs, source)?;
    for (c, um) in coupling.iter().zip(u) {
        g += c * um;
    }
    Ok(g)
}

/// Samples the incident and receiver-side background fields at every cell.
/// Each cell needs one Foldy-Lax solve; the antenna couplings are shared.
pub fn cell_fields(scene: &Scene, solve: &MediumSolve) -> Result<CellFields> {
    let k = scene.wavenumber;
    let centers = scene.cell_centers();
    let u = excitations(solve, &centers)?;
    let tx_coupling: Vec<Vec<C64>> = scene.transmitters.iter().map(|&p| solve.coupling(p)).collect::<Result<_>>()?;
    let rx_coupling: Vec<Vec<C64>> = scene.receivers.iter().map(|&p| solve.coupling(p)).collect::<Result<_>>()?;

    let n = centers.len();
    let mut incident = ComplexMatrix::zeros(scene.transmitters.len(), n);
    for (s, (&src, c)) in scene.transmitters.iter().zip(&tx_coupling).enumerate() {
        for j in 0..n {
            incident[(s, j)] = green_with(k, src, centers[j], &u[j], c)?;
        }
    }
    let mut to_receivers = ComplexMatrix::zeros(scene.receivers.len(), n);
    for (r, (&rx, c)) in scene.receivers.iter().zip(&rx_coupling).enumerate() {
        for j in 0..n {
            to_receivers[(r, j)] = green_with(k, rx, centers[j], &u[j], c)?;
        }
    }
    Ok(CellFields {
        incident,
        to_receivers,
    })
}

/// `k^2` times the integral of `G0` over a disc of radius `a` centered on the
/// observation point: `(i pi / 2) ka H1(ka) - 1`.
pub fn self_term(k: f64, a: f64) -> Result<C64> {
    let ka = k * a;
    Ok(C64::new(0.0, PI / 2.0) * hankel1(1, ka)? * ka - 1.0)
}

/// Solves the discretized Lippmann-Schwinger equation for the total field in
/// the grid and radiates the scattered field to the receivers.
///
/// Returns an `N_R x N_S` matrix. Only cells with nonzero contrast enter the
/// linear system. The self cell is replaced by the disc of equal area.
pub fn solve_full_forward(scene: &Scene, solve: &MediumSolve, contrast: &[C64]) -> Result<ComplexMatrix<f64>> {
    let n = scene.num_cells();
    if contrast.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "contrast has {} entries for a {n}-cell grid",
            contrast.len()
        )));
    }
    let (n_r, n_s) = (scene.receivers.len(), scene.transmitters.len());
    let support: Vec<usize> = (0..n).filter(|&j| contrast[j] != C64::new(0.0, 0.0)).collect();
    if support.is_empty() {
        return Ok(ComplexMatrix::zeros(n_r, n_s));
    }
    let k = scene.wavenumber;
    let area = scene.cell_size * scene.cell_size;
    let weight = k * k * area;
    let points: Vec<Point2> = support.iter().map(|&j| scene.cell_center(j)).collect();
    let u = excitations(solve, &points)?;
    let coupling: Vec<Vec<C64>> = points.iter().map(|&p| solve.coupling(p)).collect::<Result<_>>()?;
    let self_free = self_term(k, scene.cell_size / PI.sqrt())?;

    // Kernel K[(i, j)] = k^2 * int_cell_j G_bg(r_i, r') dr', rows/cols over the support.
    let m = support.len();
    let rows: Vec<Vec<C64>> = (0..m)
        .into_par_iter()
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        let smooth: C64 = coupling[i].iter().zip(&u[i]).map(|(c, um)| c * um).sum();
                        Ok(self_free + smooth * weight)
                    } else {
                        Ok(green_with(k, points[i], points[j], &u[j], &coupling[i])? * weight)
                    }
                })
                .collect::<Result<Vec<C64>>>()
        })
        .collect::<Result<_>>()?;
    let mut system = ComplexMatrix::identity(m);
    for i in 0..m {
        for j in 0..m {
            system[(i, j)] -= rows[i][j] * contrast[support[j]];
        }
    }
    let lu = Lu::new(&system).map_err(|_| Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let condition = lu.condition_1norm();
    if !(condition < FORWARD_CONDITION_LIMIT) {
        return Err(Error::IllConditioned { condition });
    }

    let rx_coupling: Vec<Vec<C64>> = scene.receivers.iter().map(|&p| solve.coupling(p)).collect::<Result<_>>()?;
    let mut to_rx = ComplexMatrix::zeros(n_r, m);
    for (r, &rx) in scene.receivers.iter().enumerate() {
        for j in 0..m {
            to_rx[(r, j)] = green_with(k, rx, points[j], &u[j], &rx_coupling[r])? * weight * contrast[support[j]];
        }
    }
    let mut out = ComplexMatrix::zeros(n_r, n_s);
    for (s, &src) in scene.transmitters.iter().enumerate() {
        let src_coupling = solve.coupling(src)?;
        let e_in: Vec<C64> = (0..m)
            .map(|j| green_with(k, src, points[j], &u[j], &src_coupling))
            .collect::<Result<_>>()?;
        let total = lu.solve_vec(&e_in)?;
        let scattered = to_rx.mul_vec(&total)?;
        for r in 0..n_r {
            out[(r, s)] = scattered[r];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::{factorize_medium, SceneParams};

    #[test]
    fn zero_contrast_scatters_nothing() {
        let scene = Scene::build(&SceneParams::default()).unwrap();
        let solve = factorize_medium(&scene).unwrap();
        let out = solve_full_forward(&scene, &solve, &vec![C64::new(0.0, 0.0); 256]).unwrap();
        assert!(out.as_slice().iter().all(|z| *z == C64::new(0.0, 0.0)));
        assert_eq!((out.rows(), out.cols()), (16, 4));
    }

    #[test]
    fn contrast_length_is_checked() {
        let scene = Scene::build(&SceneParams::default().free_space()).unwrap();
        let solve = factorize_medium(&scene).unwrap();
        assert!(solve_full_forward(&scene, &solve, &[C64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn self_term_small_disc_limit() {
        // For ka -> 0 the integral behaves like (ka)^2 (i pi/4)(1 + 2i/pi (ln(ka/2) + gamma - 1/2)).
        let ka: f64 = 1e-3;
        let got = self_term(1.0, ka).unwrap();
        let euler = 0.577_215_664_901_532_9;
        let approx = C64::new(0.0, PI / 4.0) * ka * ka
            * (C64::new(1.0, 0.0) + C64::new(0.0, 2.0 / PI) * ((ka / 2.0).ln() + euler - 0.5));
        assert!((got - approx).norm() < 1e-9);
    }
}
