//! Measurement matrices, sparsifying bases, synthetic targets and noise.
//!
//! Rows of a measurement matrix are ordered transmitter-major: row
//! `s * N_R + r` pairs transmitter `s` with receiver `r`. Images are stored
//! row-major over the grid.

mod basis;
mod io;
mod matrix;
mod target;

pub use basis::{BasisKind, SparseBasis};
pub use io::{
    format_matrix, format_vector_csv, parse_matrix, parse_vector_csv, read_matrix, read_vector_csv,
    write_matrix, write_vector_csv,
};
pub use matrix::{assemble_matrix, stack_real_imag, stack_vector, MeasurementMatrix};
pub use target::{add_noise, random_sparse_target, NoiseSpec};
