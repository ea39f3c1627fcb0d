//! `cdt`: scene matrices, single reconstructions and seeded experiment sweeps.
//!
//! Exit codes: 0 ok, 2 config or validation, 3 IO or environment,
//! 4 numerical failure or solver non-convergence.

// NaN-rejecting guards read as `!(x > 0.0)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cdt_core::experiments::{
    curve_csv, demo_errors_csv, default_demo_target, knee_csv, knee_point, resolution_sweep_with, run_demo,
    run_phase_transition_with, spearman, trials_csv, BetaSetting, PhaseTransition,
};
use cdt_core::numerics::norm2;
use cdt_core::recovery::{sbl_recover, tikhonov_recover};
use cdt_core::scattering::{factorize_medium, Scene};
use cdt_core::sensing::{assemble_matrix, format_matrix, format_vector_csv, parse_matrix, parse_vector_csv, stack_real_imag};
use clap::{Parser, Subcommand};

use config::{RunConfig, SolverMethod};

#[derive(Parser, Debug)]
#[command(name = "cdt", version, about = "Compressive diffraction tomography experiments")]
struct Cli {
    /// JSON run configuration; defaults apply to every missing field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Parent directory for run outputs (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replace an existing run directory.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads for trial-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `experiment.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the scene's measurement matrix as a CDT-MAT file.
    Matrix,
    /// Reconstruct from a matrix file and an `index,re,im` data file.
    Recover {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Success rate against sparsity for one configuration.
    PhaseTransition,
    /// Knees with and without the medium across cell sizes.
    ResolutionSweep,
    /// Tikhonov and SBL images in free space and in the medium.
    Demo,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Matrix => "matrix",
            Command::Recover { .. } => "recover",
            Command::PhaseTransition => "phase-transition",
            Command::ResolutionSweep => "resolution-sweep",
            Command::Demo => "demo",
        }
    }
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Io(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Io(m) => write!(f, "io error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<cdt_core::Error> for Failure {
    fn from(e: cdt_core::Error) -> Self {
        use cdt_core::Error::*;
        let msg = e.to_string();
        match e {
            Io(_) => Failure::Io(msg),
            Singularity(_)
            | NotHermitian { .. }
            | NotPositiveDefinite { .. }
            | Singular { .. }
            | Resonance { .. }
            | IllConditioned { .. }
            | Assembly { .. } => Failure::Numerical(msg),
            _ => Failure::Config(msg),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.experiment.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    cfg.version = Some(env!("CARGO_PKG_VERSION").to_string());
    cfg.validate().map_err(Failure::Config)?;
    Ok(cfg)
}

/// Files produced by a command, written together once it has finished.
struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, name: impl Into<String>, contents: impl Into<String>) {
        self.files.push((name.into(), contents.into()));
    }
}

/// Run directory `<out>/<command>-<fingerprint prefix>`.
fn run_dir(cfg: &RunConfig, fingerprint: &str, command: &str) -> PathBuf {
    cfg.output.dir.join(format!("{command}-{}", &fingerprint[..16]))
}

fn check_free(dir: &Path, force: bool) -> Result<(), Failure> {
    if dir.exists() && !force {
        return Err(Failure::Io(format!(
            "{} already exists (use --force to replace it)",
            dir.display()
        )));
    }
    Ok(())
}

/// Writes everything into a staging directory and renames it into place, so
/// a failed run leaves no partial output behind.
fn commit(dir: &Path, force: bool, outputs: &Outputs) -> Result<(), Failure> {
    let parent = dir.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    let staging = dir.with_extension("partial");
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| io_err(&staging, e))?;
    }
    fs::create_dir(&staging).map_err(|e| io_err(&staging, e))?;
    for (name, contents) in &outputs.files {
        let path = staging.join(name);
        fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
    }
    if dir.exists() {
        if !force {
            let _ = fs::remove_dir_all(&staging);
            return Err(Failure::Io(format!("{} already exists", dir.display())));
        }
        fs::remove_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::rename(&staging, dir).map_err(|e| io_err(dir, e))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let cfg = load_config(&cli)?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    }
    let command = cli.command.name();
    let meta = serde_json::to_string_pretty(&cfg).expect("config serializes") + "\n";

    let (fingerprint, inputs) = match &cli.command {
        Command::Recover { matrix, data } => {
            let m_text = fs::read_to_string(matrix).map_err(|e| io_err(matrix, e))?;
            let d_text = fs::read_to_string(data).map_err(|e| io_err(data, e))?;
            let fp = cdt_core::fingerprint(&(cfg.fingerprint(command), &m_text, &d_text));
            (fp, Some((m_text, d_text)))
        }
        _ => (cfg.fingerprint(command), None),
    };
    let dir = run_dir(&cfg, &fingerprint, command);
    check_free(&dir, cli.force)?;

    let mut out = Outputs::new();
    out.add("meta.json", meta);
    let status = match &cli.command {
        Command::Matrix => cmd_matrix(&cfg, &mut out)?,
        Command::Recover { .. } => {
            let (m_text, d_text) = inputs.expect("inputs read above");
            cmd_recover(&cfg, &m_text, &d_text, &mut out)?
        }
        Command::PhaseTransition => cmd_phase_transition(&cfg, &mut out)?,
        Command::ResolutionSweep => cmd_resolution_sweep(&cfg, &mut out)?,
        Command::Demo => cmd_demo(&cfg, &mut out)?,
    };
    commit(&dir, cli.force, &out)?;
    println!("{}", dir.display());
    Ok(status)
}

fn cmd_matrix(cfg: &RunConfig, out: &mut Outputs) -> Result<u8, Failure> {
    let params = cfg.trial_spec().effective_scene();
    let scene = Scene::build(&params)?;
    let solve = factorize_medium(&scene)?;
    let a = assemble_matrix(&scene, &solve)?;
    let m = if cfg.experiment.stack_real_imag {
        stack_real_imag(&a.matrix)
    } else {
        a.matrix
    };
    eprintln!("matrix {} x {} (scene {})", m.rows(), m.cols(), &a.scene_fingerprint[..16]);
    out.add("matrix.mat", format_matrix(&m));
    Ok(0)
}

fn cmd_recover(cfg: &RunConfig, m_text: &str, d_text: &str, out: &mut Outputs) -> Result<u8, Failure> {
    let a = parse_matrix(m_text).map_err(|e| Failure::Config(format!("matrix file: {e}")))?;
    let y = parse_vector_csv(d_text).map_err(|e| Failure::Config(format!("data file: {e}")))?;
    if y.len() != a.rows() {
        return Err(Failure::Config(format!(
            "data has {} entries but the matrix has {} rows",
            y.len(),
            a.rows()
        )));
    }
    match cfg.solver.method {
        SolverMethod::Tikhonov => {
            let alpha = cfg.solver.alpha.expect("validated");
            let x = tikhonov_recover(&a, &y, alpha)?;
            let fit = a.mul_vec(&x)?;
            let resid: Vec<_> = fit.iter().zip(&y).map(|(p, q)| p - q).collect();
            out.add("estimate.csv", format_vector_csv(&x));
            out.add(
                "diagnostics.csv",
                format!("method,alpha,residual_norm\ntikhonov,{alpha:.16e},{:.16e}\n", norm2(&resid)),
            );
            Ok(0)
        }
        SolverMethod::Sbl => {
            let settings = cfg.solver.settings();
            let power = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / y.len().max(1) as f64;
            let sbl = match (settings.beta_mode, cfg.solver.noise_variance) {
                (BetaSetting::Known, Some(v)) => settings.sbl_config(v, power),
                (BetaSetting::Known, None) => {
                    let mut s = settings;
                    s.beta_mode = BetaSetting::Estimate;
                    s.sbl_config(0.0, power)
                }
                _ => settings.sbl_config(0.0, power),
            };
            let r = sbl_recover(&a, &y, &sbl)?;
            out.add("estimate.csv", format_vector_csv(&r.estimate));
            out.add("diagnostics.csv", r.diagnostics_csv());
            if r.converged {
                Ok(0)
            } else {
                eprintln!("warning: solver stopped after {} iterations without converging", r.iterations);
                Ok(4)
            }
        }
    }
}

fn phase_files(out: &mut Outputs, suffix: &str, run: &PhaseTransition) {
    out.add(format!("curve{suffix}.csv"), curve_csv(&run.curve));
    out.add(format!("trials{suffix}.csv"), trials_csv(&run.records));
}

fn cmd_phase_transition(cfg: &RunConfig, out: &mut Outputs) -> Result<u8, Failure> {
    let spec = cfg.trial_spec();
    let run = run_phase_transition_with(&spec, |p| {
        eprintln!("K={:<4} success {}/{} mean rel_err {:.3e}", p.k, p.successes, p.trials, p.mean_rel_err);
    })?;
    let failed = run.records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} trials failed; see trials.csv");
    }
    eprintln!(
        "knee K*={} (threshold {}), spearman {:.3}",
        knee_point(&run.curve, cfg.experiment.knee_threshold),
        cfg.experiment.knee_threshold,
        spearman(&run.curve)
    );
    phase_files(out, "", &run);
    Ok(0)
}

fn cmd_resolution_sweep(cfg: &RunConfig, out: &mut Outputs) -> Result<u8, Failure> {
    let spec = cfg.trial_spec();
    let sweep = resolution_sweep_with(&spec, &cfg.experiment.resolutions, cfg.experiment.knee_threshold, |res, medium, p| {
        let bg = if medium { "random" } else { "free" };
        eprintln!("res={res} {bg:<6} K={:<4} success {}/{}", p.k, p.successes, p.trials);
    })?;
    out.add("knee.csv", knee_csv(&sweep.rows));
    for (res, random, free) in &sweep.runs {
        phase_files(out, &format!("-random-{res}"), random);
        phase_files(out, &format!("-free-{res}"), free);
    }
    Ok(0)
}

fn cmd_demo(cfg: &RunConfig, out: &mut Outputs) -> Result<u8, Failure> {
    let target = cfg.demo_target().unwrap_or_else(|| default_demo_target(&cfg.scene));
    let demo = run_demo(&cfg.scene, &target, &cfg.demo_settings())?;
    out.add("truth.csv", format_vector_csv(&demo.truth));
    for r in &demo.reconstructions {
        eprintln!("{:<12} {:<8} rel_err {:.4}", r.background.as_str(), r.method.as_str(), r.rel_err);
        out.add(
            format!("image-{}-{}.csv", r.background.as_str(), r.method.as_str()),
            format_vector_csv(&r.image),
        );
    }
    out.add("errors.csv", demo_errors_csv(&demo));
    Ok(0)
}
