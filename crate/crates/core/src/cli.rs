//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical
//! or I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::Error;
use crate::observables::wavefunction_slice;
use crate::output::{emit, write_patterns_csv, write_sweep_csv, write_wavefunction_csv, RunManifest};
use crate::params::{ModelParams, DEFAULT_DELTA, DEFAULT_N_MAX};
use crate::pattern::critical_coupling;
use crate::sweep::{analyze, run_sweep, SweepConfig};
use crate::validate::{run_validation, ValidationOptions};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qrm", version, about = "Pattern decomposition of the quantum Rabi model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the coupling and write sweep.csv, patterns.csv and manifest.json.
    Sweep(SweepArgs),
    /// Write up-spin wavefunctions and their pattern components.
    Wavefunction(WavefunctionArgs),
    /// Run the invariant suite and report pass/fail per check.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Two-level splitting Δ.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    /// Fock truncation N (photon states 0..=N).
    #[arg(long = "nmax", default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    /// Solve in the two parity sectors.
    #[arg(long)]
    parity: bool,
    /// Worker threads for independent grid points.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of low-lying levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Lower sweep bound in units of g_c.
    #[arg(long, default_value_t = 0.0)]
    gmin: f64,
    /// Upper sweep bound in units of g_c.
    #[arg(long, default_value_t = 1.5)]
    gmax: f64,
    #[arg(long, default_value_t = 61)]
    points: usize,
    /// Skip the finite-difference curvature pass.
    #[arg(long)]
    no_fd: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct WavefunctionArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Coupling in units of g_c; repeatable.
    #[arg(long = "at", default_values_t = [0.5, 1.0, 1.5])]
    at: Vec<f64>,
    /// Comma-separated level indices.
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
    levels: Vec<usize>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long = "nmax", default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    /// Compare E_0 at g/g_c = 1.5 against this second truncation.
    #[arg(long = "nmax-check")]
    n_max_check: Option<usize>,
    /// Grid points of the sum-rule sweep.
    #[arg(long, default_value_t = 61)]
    points: usize,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Offset Δ on the pattern side of the dual-build check (fault injection).
    #[arg(long, default_value_t = 0.0, hide = true)]
    inject_delta_mismatch: f64,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParams(_) | Error::TooFewPoints(_) | Error::PatternIndex(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SUCCESS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => cmd_sweep(&args, out),
        Command::Wavefunction(args) => cmd_wavefunction(&args, out),
        Command::Validate(args) => cmd_validate(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn prepare_dir(dir: &Path) -> crate::Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let config = SweepConfig {
        delta: args.model.delta,
        n_max: args.model.n_max,
        k_levels: args.levels,
        g_over_gc_min: args.gmin,
        g_over_gc_max: args.gmax,
        n_points: args.points,
        fd_enabled: !args.no_fd,
        parity: args.model.parity,
        threads: args.model.threads,
    };
    config.validate()?;
    let records = run_sweep(&config)?;

    prepare_dir(&args.out_dir)?;
    let mut manifest = RunManifest::new("sweep", serde_json::to_value(&config)?, config.n_max);
    emit(&mut manifest, &args.out_dir, "sweep.csv", |buf| write_sweep_csv(&records, buf))?;
    emit(&mut manifest, &args.out_dir, "patterns.csv", |buf| write_patterns_csv(&records, buf))?;
    let path = manifest.write(&args.out_dir)?;
    writeln!(
        out,
        "wrote {} grid points x {} levels to {}",
        records.len(),
        config.k_levels,
        path.parent().unwrap_or(Path::new(".")).display()
    )?;
    Ok(EXIT_SUCCESS)
}

fn cmd_wavefunction(args: &WavefunctionArgs, out: &mut dyn Write) -> crate::Result<i32> {
    if args.levels.is_empty() || args.at.is_empty() {
        return Err(Error::InvalidParams("need at least one --at and one level".into()));
    }
    let k = args.levels.iter().max().copied().unwrap_or(0) + 1;
    let gc = critical_coupling(args.model.delta);
    ModelParams::new(args.model.delta, 0.0, args.model.n_max, k)?;
    for &x in &args.at {
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidParams(format!("--at must be >= 0, got {x}")));
        }
    }

    let mut slices = Vec::new();
    for &ratio in &args.at {
        let params = ModelParams::new(args.model.delta, ratio * gc, args.model.n_max, k)?;
        let (_, point) = analyze(&params, args.model.parity)?;
        for &level in &args.levels {
            let slice = wavefunction_slice(
                &point.solution.states[level],
                point.solution.energies[level],
                &point.basis,
                &point.ops,
                level,
                params.g,
            );
            slices.push((ratio, slice));
        }
    }

    prepare_dir(&args.out_dir)?;
    let config = json!({
        "delta": args.model.delta,
        "n_max": args.model.n_max,
        "at": args.at,
        "levels": args.levels,
        "parity": args.model.parity,
    });
    let mut manifest = RunManifest::new("wavefunction", config, args.model.n_max);
    emit(&mut manifest, &args.out_dir, "wavefunction.csv", |buf| {
        write_wavefunction_csv(&slices, buf)
    })?;
    manifest.write(&args.out_dir)?;
    writeln!(out, "wrote {} wavefunction slices to {}", slices.len(), args.out_dir.display())?;
    Ok(EXIT_SUCCESS)
}

fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> crate::Result<i32> {
    let opts = ValidationOptions {
        delta: args.delta,
        n_max: args.n_max,
        n_max_check: args.n_max_check,
        n_points: args.points,
        k_levels: args.levels,
        threads: args.threads,
        delta_mismatch: args.inject_delta_mismatch,
    };
    let results = run_validation(&opts)?;
    for r in &results {
        writeln!(out, "{r}")?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} checks, {} failed", results.len(), failed)?;
    Ok(if failed == 0 { EXIT_SUCCESS } else { EXIT_VALIDATION })
}
