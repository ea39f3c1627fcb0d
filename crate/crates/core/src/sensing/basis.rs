use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::numerics::ComplexMatrix;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Identity,
    Haar,
}

/// Orthonormal sparsifying basis on an `nx x ny` grid (row-major images).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SparseBasis {
    kind: BasisKind,
    nx: usize,
    ny: usize,
}

impl SparseBasis {
    pub fn new(kind: BasisKind, nx: usize, ny: usize) -> Result<Self> {
        if kind == BasisKind::Haar && !(nx.is_power_of_two() && ny.is_power_of_two()) {
            return Err(Error::UnsupportedDimension(format!(
                "Haar basis needs power-of-two grid dimensions, got {nx}x{ny}"
            )));
        }
        Ok(Self { kind, nx, ny })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.nx * self.ny
    }

    /// `theta = Psi^T x`.
    pub fn analyze(&self, x: &[C64]) -> Result<Vec<C64>> {
        self.check(x.len())?;
        let mut v = x.to_vec();
        if self.kind == BasisKind::Haar {
            self.separable(&mut v, haar_forward);
        }
        Ok(v)
    }

    /// `x = Psi theta`.
    pub fn synthesize(&self, theta: &[C64]) -> Result<Vec<C64>> {
        self.check(theta.len())?;
        let mut v = theta.to_vec();
        if self.kind == BasisKind::Haar {
            self.separable(&mut v, haar_inverse);
        }
        Ok(v)
    }

    /// `A Psi`, computed row by row as `(Psi^T a_r^T)^T` (Psi is real).
    pub fn effective_matrix(&self, a: &ComplexMatrix<f64>) -> Result<ComplexMatrix<f64>> {
        self.check(a.cols())?;
        let mut out = a.clone();
        for i in 0..a.rows() {
            let row = self.analyze(a.row(i))?;
            out.row_mut(i).copy_from_slice(&row);
        }
        Ok(out)
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {len} for a basis of dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    fn separable(&self, v: &mut [C64], transform: fn(&mut [C64], &mut Vec<C64>)) {
        let (nx, ny) = (self.nx, self.ny);
        let mut scratch = Vec::new();
        for row in v.chunks_mut(nx) {
            transform(row, &mut scratch);
        }
        let mut column = vec![C64::new(0.0, 0.0); ny];
        for ix in 0..nx {
            for iy in 0..ny {
                column[iy] = v[iy * nx + ix];
            }
            transform(&mut column, &mut scratch);
            for iy in 0..ny {
                v[iy * nx + ix] = column[iy];
            }
        }
    }
}

/// Full-depth orthonormal 1D Haar analysis, coarsest coefficients first.
fn haar_forward(v: &mut [C64], scratch: &mut Vec<C64>) {
    let mut len = v.len();
    while len > 1 {
        let half = len / 2;
        scratch.clear();
        scratch.extend_from_slice(&v[..len]);
        for i in 0..half {
            let (a, b) = (scratch[2 * i], scratch[2 * i + 1]);
            v[i] = (a + b) * FRAC_1_SQRT_2;
            v[half + i] = (a - b) * FRAC_1_SQRT_2;
        }
        len = half;
    }
}

fn haar_inverse(v: &mut [C64], scratch: &mut Vec<C64>) {
    let mut len = 1;
    while len < v.len() {
        scratch.clear();
        scratch.extend_from_slice(&v[..2 * len]);
        for i in 0..len {
            let (s, d) = (scratch[i], scratch[len + i]);
            v[2 * i] = (s + d) * FRAC_1_SQRT_2;
            v[2 * i + 1] = (s - d) * FRAC_1_SQRT_2;
        }
        len *= 2;
    }
}
