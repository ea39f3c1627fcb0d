use crate::numerics::ComplexMatrix;
use crate::scattering::{cell_fields, MediumSolve, Scene};
use crate::{Error, Result, C64};

/// Born measurement matrix with its row layout and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementMatrix {
    pub matrix: ComplexMatrix<f64>,
    pub num_tx: usize,
    pub num_rx: usize,
    /// Fingerprint of the scene parameters the matrix was built from.
    pub scene_fingerprint: String,
}

impl MeasurementMatrix {
    /// Row of transmitter `s`, receiver `r`.
    pub fn row_index(&self, s: usize, r: usize) -> usize {
        s * self.num_rx + r
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Flattens an `N_R x N_S` field matrix into measurement order.
    pub fn vectorize(&self, field: &ComplexMatrix<f64>) -> Result<Vec<C64>> {
        if field.rows() != self.num_rx || field.cols() != self.num_tx {
            return Err(Error::DimensionMismatch(format!(
                "field is {}x{}, expected {}x{}",
                field.rows(),
                field.cols(),
                self.num_rx,
                self.num_tx
            )));
        }
        let mut y = Vec::with_capacity(self.rows());
        for s in 0..self.num_tx {
            for r in 0..self.num_rx {
                y.push(field[(r, s)]);
            }
        }
        Ok(y)
    }
}

/// `A[(s, r), j] = dx^2 k^2 G_bg(r_R, r_j) E_in(s, r_j)` with one quadrature
/// point per cell.
pub fn assemble_matrix(scene: &Scene, solve: &MediumSolve) -> Result<MeasurementMatrix> {
    let fields = cell_fields(scene, solve)?;
    let (n_s, n_r, n) = (scene.transmitters.len(), scene.receivers.len(), scene.num_cells());
    let weight = scene.cell_size * scene.cell_size * scene.wavenumber * scene.wavenumber;
    let mut a = ComplexMatrix::zeros(n_s * n_r, n);
    for s in 0..n_s {
        for r in 0..n_r {
            let row = a.row_mut(s * n_r + r);
            for (j, v) in row.iter_mut().enumerate() {
                *v = fields.to_receivers[(r, j)] * fields.incident[(s, j)] * weight;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Assembly { tx: s, rx: r, cell: j });
                }
            }
        }
    }
    Ok(MeasurementMatrix {
        matrix: a,
        num_tx: n_s,
        num_rx: n_r,
        scene_fingerprint: scene.fingerprint(),
    })
}

/// `[Re A; Im A]` as a real-valued `2M x N` system (stored complex).
pub fn stack_real_imag(a: &ComplexMatrix<f64>) -> ComplexMatrix<f64> {
    let m = a.rows();
    ComplexMatrix::from_fn(2 * m, a.cols(), |i, j| {
        let z = a[(i % m, j)];
        C64::new(if i < m { z.re } else { z.im }, 0.0)
    })
}

/// `[Re y; Im y]`, matching [`stack_real_imag`].
pub fn stack_vector(y: &[C64]) -> Vec<C64> {
    y.iter()
        .map(|z| C64::new(z.re, 0.0))
        .chain(y.iter().map(|z| C64::new(z.im, 0.0)))
        .collect()
}
