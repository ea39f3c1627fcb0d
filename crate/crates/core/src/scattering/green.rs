use num_complex::Complex;

use super::scene::{Point2, Scene};
use crate::numerics::{hankel1, ComplexMatrix, Lu};
use crate::{Error, Result, C64};

/// Condition estimate above which the multiple-scattering system is treated
/// as resonant.
pub const RESONANCE_CONDITION: f64 = 1e12;

/// Free-space 2D Green's function `(i/4) H0(k |r - r'|)`, `exp(-i w t)` convention.
pub fn green_free(k: f64, r: Point2, r_prime: Point2) -> Result<C64> {
    let d = r.distance(r_prime);
    if d == 0.0 {
        return Err(Error::Singularity(format!(
            "source and observation coincide at ({}, {})",
            r.x, r.y
        )));
    }
    let h = hankel1(0, k * d)?;
    Ok(C64::new(0.0, 0.25) * h)
}

/// Factorized Foldy-Lax system for a fixed medium.
///
/// For a source at `r'` the scattered amplitudes `u = T e` solve
/// `(I - T G0) u = T g(r')` with `g_m = G0(r_m, r')` and `G0` the free-space
/// matrix among scatterers (zero diagonal).
#[derive(Clone, Debug)]
pub struct MediumSolve {
    k: f64,
    positions: Vec<Point2>,
    strengths: Vec<C64>,
    lu: Option<Lu<f64>>,
    condition: f64,
}

pub fn factorize_medium(scene: &Scene) -> Result<MediumSolve> {
    let k = scene.wavenumber;
    let positions: Vec<Point2> = scene.medium.scatterers.iter().map(|s| s.position).collect();
    let strengths: Vec<C64> = scene.medium.scatterers.iter().map(|s| s.strength).collect();
    let n = positions.len();
    if n == 0 {
        return Ok(MediumSolve {
            k,
            positions,
            strengths,
            lu: None,
            condition: 1.0,
        });
    }
    let mut system = ComplexMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                system[(i, j)] -= strengths[i] * green_free(k, positions[i], positions[j])?;
            }
        }
    }
    let lu = Lu::new(&system).map_err(|_| Error::Resonance {
        condition: f64::INFINITY,
    })?;
    let condition = lu.condition_1norm();
    if !(condition < RESONANCE_CONDITION) {
        return Err(Error::Resonance { condition });
    }
    Ok(MediumSolve {
        k,
        positions,
        strengths,
        lu: Some(lu),
        condition,
    })
}

impl MediumSolve {
    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn num_scatterers(&self) -> usize {
        self.positions.len()
    }

    /// 1-norm condition number of the interaction matrix (1 when empty).
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Free-space coupling `G0(r_m, p)` from every scatterer to `p`.
    pub fn coupling(&self, p: Point2) -> Result<Vec<C64>> {
        self.positions
            .iter()
            .map(|&rm| green_free(self.k, rm, p))
            .collect()
    }

    /// Scattered amplitudes `u_m = t_m e_m` excited by a unit source at `source`.
    pub fn excitation(&self, source: Point2) -> Result<Vec<C64>> {
        let Some(lu) = &self.lu else {
            return Ok(Vec::new());
        };
        let rhs: Vec<C64> = self
            .coupling(source)?
            .into_iter()
            .zip(&self.strengths)
            .map(|(g, t)| g * t)
            .collect();
        lu.solve_vec(&rhs)
    }

    /// `G_bg(p, source)` for many observation points sharing one source.
    pub fn green_many(&self, points: &[Point2], source: Point2) -> Result<Vec<C64>> {
        let u = self.excitation(source)?;
        points
            .iter()
            .map(|&p| {
                let mut g = green_free(self.k, p, source)?;
                for (&rm, um) in self.positions.iter().zip(&u) {
                    g += green_free(self.k, p, rm)? * um;
                }
                Ok(g)
            })
            .collect()
    }

    /// Medium contribution `G_bg - G0` at `(p, source)`; finite when `p == source`.
    pub fn smooth_part(&self, p: Point2, source: Point2) -> Result<C64> {
        let u = self.excitation(source)?;
        let mut g = Complex::new(0.0, 0.0);
        for (&rm, um) in self.positions.iter().zip(&u) {
            g += green_free(self.k, p, rm)? * um;
        }
        Ok(g)
    }
}

/// Green's function of the background (free space plus medium) from `r'` to `r`.
pub fn green_background(solve: &MediumSolve, r: Point2, r_prime: Point2) -> Result<C64> {
    Ok(solve.green_many(&[r], r_prime)?[0])
}

/// Field at `r` radiated by transmitter `tx` (unit line current) through the background.
pub fn incident_field(scene: &Scene, solve: &MediumSolve, tx: usize, r: Point2) -> Result<C64> {
    let source = *scene.transmitters.get(tx).ok_or_else(|| {
        Error::Domain(format!(
            "transmitter index {tx} out of range ({} transmitters)",
            scene.transmitters.len()
        ))
    })?;
    green_background(solve, source, r)
}
