//! Special functions, dense complex linear algebra and reproducible random
//! streams shared by the rest of the crate.
//!
//! Everything here is generic over [`Real`], which is implemented for `f32`
//! and `f64`. The accuracy contracts quoted in the docs (1e-7 for Bessel
//! functions, 1e-10 residuals for Hermitian solves) are stated for `f64`.

mod bessel;
mod linalg;
mod rng;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub use bessel::{bessel_j0, bessel_j0y0, bessel_j1, bessel_j1y1, hankel1};
pub use linalg::{
    dot, hermitian_solve, norm2, norm2_sqr, Cholesky, ComplexMatrix, ComplexVector, Lu,
};
pub use rng::{complex_gaussian_sample, split_seed, RngStream};

/// Floating point scalar the numerical kernels are written against.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
