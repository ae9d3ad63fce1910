//! Sweep parameters gathered from flags and an optional TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use oatqfi::{EngineChoice, OutputFormat, ScanVariable, SweepConfig, TauGrid};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Analytic,
    Brute,
    Both,
}

impl From<EngineArg> for EngineChoice {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Analytic => EngineChoice::Analytic,
            EngineArg::Brute => EngineChoice::Brute,
            EngineArg::Both => EngineChoice::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

/// Every field is optional; unset values fall back to the config file, then
/// to the defaults of the scan.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct SweepArgs {
    /// TOML file with the same keys as the long flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Number of particles
    #[arg(long)]
    pub n: Option<usize>,

    /// Polar angle of the initial coherent state
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,

    /// Azimuth of the initial coherent state
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,

    /// Dephasing rate in units of kappa
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub tau_start: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub tau_stop: Option<f64>,

    #[arg(long)]
    pub tau_count: Option<usize>,

    /// Explicit comma-separated tau grid, replaces start/stop/count
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub tau_points: Option<Vec<f64>>,

    /// theta0 grid of a theta-scan
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thetas: Option<Vec<f64>>,

    /// gamma values of a gamma-scan
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Option<Vec<f64>>,

    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,

    /// Output file, stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug)]
pub enum SettingsError {
    Read(PathBuf, std::io::Error),
    Parse(String),
}

impl SweepArgs {
    pub fn load_file(path: &Path) -> Result<Self, SettingsError> {
        let text = std::fs::read_to_string(path).map_err(|e| SettingsError::Read(path.to_path_buf(), e))?;
        toml::from_str(&text).map_err(|e| SettingsError::Parse(format!("{}: {e}", path.display())))
    }

    /// Flags win over the file.
    pub fn merged(self) -> Result<Self, SettingsError> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let file = Self::load_file(&path)?;
        Ok(SweepArgs {
            config: self.config,
            n: self.n.or(file.n),
            theta0: self.theta0.or(file.theta0),
            phi0: self.phi0.or(file.phi0),
            gamma: self.gamma.or(file.gamma),
            tau_start: self.tau_start.or(file.tau_start),
            tau_stop: self.tau_stop.or(file.tau_stop),
            tau_count: self.tau_count.or(file.tau_count),
            tau_points: self.tau_points.or(file.tau_points),
            thetas: self.thetas.or(file.thetas),
            gammas: self.gammas.or(file.gammas),
            engine: self.engine.or(file.engine),
            out: self.out.or(file.out),
            format: self.format.or(file.format),
        })
    }

    pub fn to_config(&self, scan: ScanVariable) -> SweepConfig {
        let n = self.n.unwrap_or(match scan {
            ScanVariable::Gamma => 100,
            _ => 2000,
        });
        let mut c = SweepConfig::defaults(scan, n);
        if let Some(v) = self.theta0 {
            c.theta0 = v;
        }
        if let Some(v) = self.phi0 {
            c.phi0 = v;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        c.tau_grid = match (&self.tau_points, &c.tau_grid) {
            (Some(points), _) => TauGrid::Explicit { points: points.clone() },
            (None, TauGrid::Linear { start, stop, count }) => TauGrid::linear(
                self.tau_start.unwrap_or(*start),
                self.tau_stop.unwrap_or(*stop),
                self.tau_count.unwrap_or(*count),
            ),
            (None, explicit) => explicit.clone(),
        };
        if let Some(v) = &self.thetas {
            c.theta_grid = v.clone();
        }
        if let Some(v) = &self.gammas {
            c.gamma_list = v.clone();
        }
        if let Some(v) = self.engine {
            c.engine = v.into();
        }
        c.output_path = self.out.clone();
        if let Some(v) = self.format {
            c.output_format = v.into();
        }
        c
    }
}
