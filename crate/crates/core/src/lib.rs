//! Compressive diffraction tomography at desk scale.
//!
//! The crate builds Born-approximation measurement matrices for 2D scalar
//! scattering, either in free space or inside a random medium of point
//! scatterers, and recovers sparse contrast images with a complex-valued fast
//! sparse Bayesian learning solver. The [`experiments`] module runs
//! recovery-rate sweeps over sparsity, resolution and background.
//!
//! Linear algebra and the recovery solver are generic over [`Real`]
//! (`f32`/`f64`); the physics and experiment layers use `f64` through the
//! aliases below.

// NaN-rejecting guards read as `!(x > 0.0)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod numerics;
pub mod recovery;
pub mod scattering;
pub mod sensing;

pub use error::{Error, Result};
pub use numerics::Real;

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn fingerprint<S: serde::Serialize + ?Sized>(value: &S) -> String {
    use sha2::{Digest, Sha256};
    let json = serde_json::to_vec(value).expect("value serializes to JSON");
    hex::encode(Sha256::digest(&json))
}

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type ComplexMatrix64 = numerics::ComplexMatrix<f64>;
pub type ComplexMatrix32 = numerics::ComplexMatrix<f32>;
pub type ComplexVector64 = numerics::ComplexVector<f64>;
pub type SblSolver64<'a> = recovery::SblSolver<'a, f64>;
pub type SblConfig64 = recovery::SblConfig<f64>;
pub type RecoveryResult64 = recovery::RecoveryResult<f64>;
