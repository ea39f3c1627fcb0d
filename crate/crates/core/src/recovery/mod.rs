//! Sparse recovery: the complex fast sparse Bayesian learning solver, a
//! Tikhonov baseline and the success metric used by the experiments.

mod gamma;
mod metric;
pub mod prior;
mod sbl;
mod tikhonov;

pub use gamma::{evidence_term, evidence_term_derivative, gamma_update};
pub use metric::{success_metric, SuccessReport, SuccessThresholds};
pub use sbl::{
    sbl_recover, ActionKind, BetaMode, IterationRecord, LambdaMode, Posterior, RecoveryResult,
    SblConfig, SblSolver,
};
pub use tikhonov::tikhonov_recover;
