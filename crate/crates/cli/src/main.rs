//! `oatqfi`: time sweeps, theta0 scans, dephasing scans and self-checks.

mod settings;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oatqfi::output::{render, write_text};
use oatqfi::sweep::{SELF_CHECK_MAX_N, SELF_CHECK_TOLERANCE};
use oatqfi::{run_sweep, run_verify, EngineChoice, Error, ScanVariable, VerifyConfig};

use settings::{SettingsError, SweepArgs};

#[derive(Parser)]
#[command(name = "oatqfi", version, about = "One-axis twisting: squeezing and quantum Fisher information sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Metrics along a tau grid
    Dynamics(SweepArgs),
    /// Strongest squeezing and plateau chi^2 per theta0
    ThetaScan(SweepArgs),
    /// Time sweeps for several dephasing rates
    GammaScan(SweepArgs),
    /// Randomized analytic/brute and SLD cross-checks
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    engine_cases: usize,
    #[arg(long, default_value_t = 50)]
    sld_cases: usize,
    /// Report file, stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidConfig(_) | Error::DegenerateInitialState | Error::NormViolation { .. } => 2,
            Error::ResourceGuard(_) => 3,
            Error::Io { .. } => 5,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<SettingsError> for Failure {
    fn from(e: SettingsError) -> Self {
        match e {
            SettingsError::Read(path, err) => Failure { code: 5, message: format!("cannot read {}: {err}", path.display()) },
            SettingsError::Parse(msg) => Failure { code: 2, message: format!("invalid config file {msg}") },
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(write_text(path, text)?),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure { code: 5, message: format!("stdout: {e}") })
        }
    }
}

fn sweep(args: SweepArgs, scan: ScanVariable) -> Result<(), Failure> {
    let config = args.merged()?.to_config(scan);
    let output = run_sweep(&config)?;
    emit(&render(&output, &config, config.output_format)?, config.output_path.as_ref())?;
    if config.engine == EngineChoice::Both && config.n_particles <= SELF_CHECK_MAX_N {
        if let Some(c) = output.comparison().filter(|c| !c.within(SELF_CHECK_TOLERANCE)) {
            return Err(Failure {
                code: 4,
                message: format!("engines disagree: max relative difference {:e}", c.max_rel_diff),
            });
        }
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let config = VerifyConfig {
        seed: args.seed,
        engine_cases: args.engine_cases,
        sld_cases: args.sld_cases,
        ..VerifyConfig::default()
    };
    let report = run_verify(config)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure { code: 1, message: e.to_string() })?;
    text.push('\n');
    emit(&text, args.out.as_ref())?;
    if !report.passed {
        return Err(Failure {
            code: 4,
            message: format!(
                "self-check failed: engine {:e}, sld {:e}, sld mean {:e}",
                report.engine_max_rel_diff, report.sld_max_rel_diff, report.sld_max_abs_mean
            ),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Dynamics(a) => sweep(a, ScanVariable::Time),
        Command::ThetaScan(a) => sweep(a, ScanVariable::Theta0),
        Command::GammaScan(a) => sweep(a, ScanVariable::Gamma),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("oatqfi: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
