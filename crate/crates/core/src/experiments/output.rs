use std::fmt::Write as _;

use super::demo::DemoResult;
use super::phase::{Curve, KneeRow, TrialRecord};

/// `K,success_rate,trials,mean_rel_err`.
pub fn curve_csv(curve: &Curve) -> String {
    let mut out = String::from("K,success_rate,trials,mean_rel_err\n");
    for p in &curve.points {
        writeln!(out, "{},{},{},{:.9e}", p.k, p.success_rate, p.trials, p.mean_rel_err).unwrap();
    }
    out
}

/// One row per trial. Wall time is left out so the file is reproducible.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("K,trial,seed,success,support_match,rel_err,iterations,converged,error\n");
    for r in records {
        let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        writeln!(
            out,
            "{},{},{},{},{},{:.9e},{},{},{}",
            r.k, r.trial, r.seed, r.success, r.support_match, r.rel_err, r.iterations, r.converged, error
        )
        .unwrap();
    }
    out
}

/// `resolution,K_random,K_free`.
pub fn knee_csv(rows: &[KneeRow]) -> String {
    let mut out = String::from("resolution,K_random,K_free\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.resolution, r.k_random, r.k_free).unwrap();
    }
    out
}

/// `background,method,rel_err` for the four demo reconstructions.
pub fn demo_errors_csv(demo: &DemoResult) -> String {
    let mut out = String::from("background,method,rel_err\n");
    for r in &demo.reconstructions {
        writeln!(out, "{},{},{:.9e}", r.background.as_str(), r.method.as_str(), r.rel_err).unwrap();
    }
    out
}
