//! Scene geometry, background Green's functions and the full forward solver.
//!
//! The background is free space plus an optional random medium of point
//! scatterers. Multiple scattering inside the medium is solved exactly
//! (Foldy-Lax), so [`green_background`] is reciprocal up to rounding.

mod forward;
mod green;
mod scene;

pub use forward::{cell_fields, self_term, solve_full_forward, CellFields, FORWARD_CONDITION_LIMIT};
pub use green::{factorize_medium, green_background, green_free, incident_field, MediumSolve, RESONANCE_CONDITION};
pub use scene::{build_medium, ArcSpec, Exclusion, MediumParams, Point2, RandomMedium, Scatterer, Scene, SceneParams};
