//! Grid drivers: time sweeps, theta0 scans and dephasing scans.
//!
//! Grid points are evaluated in parallel; rows always come back in grid
//! order so identical configs give identical output.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dicke::{CssParams, SpinSize};
use crate::dynamics::EvolutionParams;
use crate::engine::{evaluate, evaluate_squeezing, scaled_difference, Engine, DENSE_STATE_LIMIT};
use crate::error::{Error, Result};
use crate::metrics::t_min_closed_form;

/// `xi_K^2` must fall this far below 1 for a point to count as squeezed.
pub const SQUEEZING_MARGIN: f64 = 1e-9;
/// `N chi^2` at or below this marks arrival on the plateau.
pub const PLATEAU_LEVEL: f64 = 3.0;
/// Dual-engine runs with `N` up to this size must agree within [`SELF_CHECK_TOLERANCE`].
pub const SELF_CHECK_MAX_N: usize = 24;
pub const SELF_CHECK_TOLERANCE: f64 = 1e-8;
/// Golden-section termination width in `tau`.
pub const GOLDEN_TOLERANCE: f64 = 1e-10;
const BRACKET_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TauGrid {
    Linear { start: f64, stop: f64, count: usize },
    Explicit { points: Vec<f64> },
}

impl TauGrid {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        TauGrid::Linear { start, stop, count }
    }

    pub fn points(&self) -> Vec<f64> {
        match self {
            TauGrid::Linear { start, stop, count } => linspace(*start, *stop, *count),
            TauGrid::Explicit { points } => points.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pts = self.points();
        if pts.len() < 2 {
            return Err(Error::InvalidConfig(format!("tau grid needs at least 2 points, got {}", pts.len())));
        }
        if pts.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidConfig("tau grid values must be finite and >= 0".into()));
        }
        if pts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("tau grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// `count` evenly spaced points with both ends included exactly.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| if i == count - 1 { stop } else { start + step * i as f64 }).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineChoice {
    Analytic,
    Brute,
    Both,
}

impl EngineChoice {
    pub fn engines(&self) -> Vec<Engine> {
        match self {
            EngineChoice::Analytic => vec![Engine::Analytic],
            EngineChoice::Brute => vec![Engine::Brute],
            EngineChoice::Both => vec![Engine::Analytic, Engine::Brute],
        }
    }

    fn uses_brute(&self) -> bool {
        !matches!(self, EngineChoice::Analytic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanVariable {
    Time,
    Theta0,
    Gamma,
}

impl ScanVariable {
    pub fn tag(&self) -> &'static str {
        match self {
            ScanVariable::Time => "dynamics",
            ScanVariable::Theta0 => "theta-scan",
            ScanVariable::Gamma => "gamma-scan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_particles: usize,
    pub theta0: f64,
    pub phi0: f64,
    pub gamma: f64,
    pub tau_grid: TauGrid,
    pub engine: EngineChoice,
    pub scan_variable: ScanVariable,
    /// theta0 values for a theta0 scan.
    pub theta_grid: Vec<f64>,
    /// Dephasing rates for a gamma scan.
    pub gamma_list: Vec<f64>,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl SweepConfig {
    /// Defaults that regenerate the standard figures: `kappa t sqrt(N)` in
    /// `[0, 10]` for time sweeps, `kappa t` in `[0, pi]` for dephasing scans.
    pub fn defaults(scan_variable: ScanVariable, n_particles: usize) -> Self {
        let sqrt_n = (n_particles.max(1) as f64).sqrt();
        let (tau_grid, engine) = match scan_variable {
            ScanVariable::Gamma => (TauGrid::linear(0.0, PI, 2000), EngineChoice::Brute),
            _ => (TauGrid::linear(0.0, 10.0 / sqrt_n, 2000), EngineChoice::Analytic),
        };
        SweepConfig {
            n_particles,
            theta0: FRAC_PI_2,
            phi0: 0.0,
            gamma: 0.0,
            tau_grid,
            engine,
            scan_variable,
            theta_grid: (1..64).map(|k| k as f64 * PI / 64.0).collect(),
            gamma_list: vec![0.0, 0.01, 0.1],
            output_path: None,
            output_format: OutputFormat::Csv,
        }
    }

    pub fn size(&self) -> Result<SpinSize> {
        SpinSize::new(self.n_particles)
    }

    pub fn validate(&self) -> Result<()> {
        self.size()?;
        if !(self.theta0.is_finite() && (0.0..=PI).contains(&self.theta0)) {
            return Err(Error::InvalidConfig(format!("theta0 = {} outside [0, pi]", self.theta0)));
        }
        if !self.phi0.is_finite() {
            return Err(Error::InvalidConfig("phi0 must be finite".into()));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidConfig(format!("gamma = {} must be finite and >= 0", self.gamma)));
        }
        match self.scan_variable {
            ScanVariable::Time | ScanVariable::Gamma => self.tau_grid.validate()?,
            ScanVariable::Theta0 => {
                if self.theta_grid.is_empty() {
                    return Err(Error::InvalidConfig("theta grid is empty".into()));
                }
                if self.theta_grid.iter().any(|t| !(t.is_finite() && *t > 0.0 && *t < PI)) {
                    return Err(Error::InvalidConfig("theta grid values must lie in (0, pi)".into()));
                }
            }
        }
        if self.scan_variable == ScanVariable::Gamma {
            if self.gamma_list.is_empty() {
                return Err(Error::InvalidConfig("gamma list is empty".into()));
            }
            if self.gamma_list.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
                return Err(Error::InvalidConfig("gamma values must be finite and >= 0".into()));
            }
        }
        if self.engine.uses_brute() && self.n_particles > DENSE_STATE_LIMIT {
            return Err(Error::ResourceGuard(format!(
                "brute engine with N = {} exceeds the limit of {DENSE_STATE_LIMIT}",
                self.n_particles
            )));
        }
        Ok(())
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau: f64,
    pub theta0: f64,
    pub phi0: f64,
    pub gamma: f64,
    pub engine: Engine,
    pub xi_k2: f64,
    /// `None` when the mean spin vanishes.
    pub xi_w2: Option<f64>,
    pub chi2: f64,
    pub f_max: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub n_opt_x: f64,
    pub n_opt_y: f64,
    pub n_opt_z: f64,
    pub degenerate: bool,
}

impl SweepRow {
    fn numeric_fields(&self) -> [Option<f64>; 6] {
        [Some(self.xi_k2), self.xi_w2, Some(self.chi2), Some(self.f_max), Some(self.v_plus), Some(self.v_minus)]
    }
}

/// Per-theta0 summary of a theta0 scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaScanRow {
    pub theta0: f64,
    pub engine: Engine,
    /// Asymptotic large-N time of strongest squeezing.
    pub tau_min_closed: f64,
    pub xi_k2_at_closed: f64,
    /// Numerical minimizer of `xi_K^2` over `(0, 3 tau_min_closed]`.
    pub tau_min: f64,
    pub xi_k2_min: f64,
    pub xi_w2_min: Option<f64>,
    /// `3 / sqrt(N)`, inside the plateau.
    pub tau_plateau: f64,
    pub chi2_plateau: f64,
    /// `1 / sqrt(N)`, the early edge of the plateau window.
    pub tau_window_start: f64,
    pub chi2_window_start: f64,
}

impl ThetaScanRow {
    fn numeric_fields(&self) -> [Option<f64>; 5] {
        [Some(self.xi_k2_at_closed), Some(self.xi_k2_min), self.xi_w2_min, Some(self.chi2_plateau), Some(self.chi2_window_start)]
    }
}

/// Per-gamma summary of a dephasing scan, read off the tau grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSummary {
    pub gamma: f64,
    pub engine: Engine,
    pub xi_k2_min: f64,
    pub tau_at_min: f64,
    /// First and last grid `tau` of the first run with `xi_K^2 < 1 - SQUEEZING_MARGIN`.
    pub squeeze_start_tau: Option<f64>,
    pub squeeze_end_tau: Option<f64>,
    /// First grid `tau` with `N chi^2 <= PLATEAU_LEVEL`.
    pub plateau_arrival_tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineComparison {
    pub rows_compared: usize,
    pub max_abs_diff: f64,
    /// Largest `|a - b| / max(|a|, |b|, 1)`.
    pub max_rel_diff: f64,
}

impl EngineComparison {
    fn from_pairs(pairs: impl Iterator<Item = (Option<f64>, Option<f64>)>, rows_compared: usize) -> Self {
        let mut max_abs_diff = 0.0f64;
        let mut max_rel_diff = 0.0f64;
        for (a, b) in pairs {
            match (a, b) {
                (Some(a), Some(b)) => {
                    max_abs_diff = max_abs_diff.max((a - b).abs());
                    max_rel_diff = max_rel_diff.max(scaled_difference(a, b));
                }
                (None, None) => {}
                // one engine saw a degenerate frame and the other did not
                _ => {
                    max_abs_diff = f64::INFINITY;
                    max_rel_diff = f64::INFINITY;
                }
            }
        }
        EngineComparison { rows_compared, max_abs_diff, max_rel_diff }
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.max_rel_diff <= tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepOutput {
    Dynamics { rows: Vec<SweepRow>, comparison: Option<EngineComparison> },
    ThetaScan { rows: Vec<ThetaScanRow>, comparison: Option<EngineComparison> },
    GammaScan { rows: Vec<SweepRow>, summaries: Vec<GammaSummary>, comparison: Option<EngineComparison> },
}

impl SweepOutput {
    pub fn comparison(&self) -> Option<&EngineComparison> {
        match self {
            SweepOutput::Dynamics { comparison, .. }
            | SweepOutput::ThetaScan { comparison, .. }
            | SweepOutput::GammaScan { comparison, .. } => comparison.as_ref(),
        }
    }
}

/// Runs whichever scan `config.scan_variable` selects.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    match config.scan_variable {
        ScanVariable::Time => {
            let (rows, comparison) = run_dynamics_sweep(config)?;
            Ok(SweepOutput::Dynamics { rows, comparison })
        }
        ScanVariable::Theta0 => {
            let (rows, comparison) = run_theta_scan(config)?;
            Ok(SweepOutput::ThetaScan { rows, comparison })
        }
        ScanVariable::Gamma => {
            let (rows, summaries, comparison) = run_gamma_scan(config)?;
            Ok(SweepOutput::GammaScan { rows, summaries, comparison })
        }
    }
}

fn sweep_rows(config: &SweepConfig, gamma: f64) -> Result<Vec<SweepRow>> {
    let size = config.size()?;
    let params = CssParams::new(size, config.theta0, config.phi0)?;
    let engines = config.engine.engines();
    let taus = config.tau_grid.points();
    let nested: Vec<Vec<SweepRow>> = taus
        .par_iter()
        .map(|&tau| {
            let evo = EvolutionParams::new(tau, gamma)?;
            engines.iter().map(|&engine| sweep_row(engine, &params, &evo)).collect()
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

fn sweep_row(engine: Engine, params: &CssParams, evo: &EvolutionParams) -> Result<SweepRow> {
    let r = evaluate(engine, params, evo)?.report;
    let [n_opt_x, n_opt_y, n_opt_z] = r.n_opt.components();
    Ok(SweepRow {
        tau: evo.tau,
        theta0: params.theta0,
        phi0: params.phi0,
        gamma: evo.gamma,
        engine,
        xi_k2: r.xi_k2,
        xi_w2: r.xi_w2,
        chi2: r.chi2,
        f_max: r.f_max,
        v_plus: r.v_plus,
        v_minus: r.v_minus,
        n_opt_x,
        n_opt_y,
        n_opt_z,
        degenerate: r.degenerate_frame,
    })
}

fn compare_sweep_rows(config: &SweepConfig, rows: &[SweepRow]) -> Option<EngineComparison> {
    (config.engine == EngineChoice::Both).then(|| {
        let pairs = rows.chunks_exact(2).flat_map(|p| p[0].numeric_fields().into_iter().zip(p[1].numeric_fields()));
        EngineComparison::from_pairs(pairs, rows.len() / 2)
    })
}

/// Time sweep at fixed `(theta0, phi0, gamma)`. With both engines the rows
/// alternate analytic, brute at each `tau`.
pub fn run_dynamics_sweep(config: &SweepConfig) -> Result<(Vec<SweepRow>, Option<EngineComparison>)> {
    config.validate()?;
    let rows = sweep_rows(config, config.gamma)?;
    let comparison = compare_sweep_rows(config, &rows);
    Ok((rows, comparison))
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub fn golden_section_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    let best = [(x, fx), (c, fc), (d, fd)].into_iter().fold((x, fx), |acc, p| if p.1 < acc.1 { p } else { acc });
    Ok(best)
}

/// Minimum of `xi_K^2(tau)` on `(0, 3 t_min]`: coarse sampling picks the
/// basin, golden section refines it.
pub fn minimize_squeezing(engine: Engine, params: &CssParams, gamma: f64) -> Result<(f64, f64)> {
    let hi = 3.0 * t_min_closed_form(params)?;
    let xi = |tau: f64| -> Result<f64> { Ok(evaluate_squeezing(engine, params, &EvolutionParams::new(tau, gamma)?)?.xi_k2) };
    let step = hi / BRACKET_SAMPLES as f64;
    let mut best = (1, f64::INFINITY);
    for k in 1..=BRACKET_SAMPLES {
        let v = xi(step * k as f64)?;
        if v < best.1 {
            best = (k, v);
        }
    }
    let lo = step * (best.0 - 1) as f64;
    let up = (step * (best.0 + 1) as f64).min(hi);
    golden_section_min(xi, lo, up, GOLDEN_TOLERANCE)
}

fn theta_row(engine: Engine, size: SpinSize, theta0: f64, phi0: f64, gamma: f64) -> Result<ThetaScanRow> {
    let params = CssParams::new(size, theta0, phi0)?;
    let tau_min_closed = t_min_closed_form(&params)?;
    let xi_k2_at_closed = evaluate_squeezing(engine, &params, &EvolutionParams::new(tau_min_closed, gamma)?)?.xi_k2;
    let (tau_min, xi_k2_min) = minimize_squeezing(engine, &params, gamma)?;
    let xi_w2_min = evaluate_squeezing(engine, &params, &EvolutionParams::new(tau_min, gamma)?)?.xi_w2;
    let sqrt_n = size.n_f64().sqrt();
    let (tau_plateau, tau_window_start) = (3.0 / sqrt_n, 1.0 / sqrt_n);
    let chi2_at = |tau: f64| -> Result<f64> { Ok(evaluate(engine, &params, &EvolutionParams::new(tau, gamma)?)?.report.chi2) };
    Ok(ThetaScanRow {
        theta0,
        engine,
        tau_min_closed,
        xi_k2_at_closed,
        tau_min,
        xi_k2_min,
        xi_w2_min,
        tau_plateau,
        chi2_plateau: chi2_at(tau_plateau)?,
        tau_window_start,
        chi2_window_start: chi2_at(tau_window_start)?,
    })
}

/// Per theta0: strongest squeezing over time and `chi^2` on the plateau.
pub fn run_theta_scan(config: &SweepConfig) -> Result<(Vec<ThetaScanRow>, Option<EngineComparison>)> {
    config.validate()?;
    let size = config.size()?;
    let engines = config.engine.engines();
    let nested: Vec<Vec<ThetaScanRow>> = config
        .theta_grid
        .par_iter()
        .map(|&theta0| engines.iter().map(|&e| theta_row(e, size, theta0, config.phi0, config.gamma)).collect())
        .collect::<Result<_>>()?;
    let rows: Vec<ThetaScanRow> = nested.into_iter().flatten().collect();
    let comparison = (config.engine == EngineChoice::Both).then(|| {
        let pairs = rows.chunks_exact(2).flat_map(|p| p[0].numeric_fields().into_iter().zip(p[1].numeric_fields()));
        EngineComparison::from_pairs(pairs, rows.len() / 2)
    });
    Ok((rows, comparison))
}

/// Reads the squeezing interval, minimum and plateau arrival off one
/// engine's rows for one gamma, ordered by `tau`.
pub fn summarize_gamma(rows: &[SweepRow], n_particles: usize) -> Option<GammaSummary> {
    let first = rows.first()?;
    let (tau_at_min, xi_k2_min) =
        rows.iter().map(|r| (r.tau, r.xi_k2)).fold((first.tau, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
    let squeezed = |r: &&SweepRow| r.xi_k2 < 1.0 - SQUEEZING_MARGIN;
    let start = rows.iter().position(|r| squeezed(&r));
    let end = start.map(|s| s + rows[s..].iter().take_while(squeezed).count() - 1);
    let n = n_particles as f64;
    Some(GammaSummary {
        gamma: first.gamma,
        engine: first.engine,
        xi_k2_min,
        tau_at_min,
        squeeze_start_tau: start.map(|i| rows[i].tau),
        squeeze_end_tau: end.map(|i| rows[i].tau),
        plateau_arrival_tau: rows.iter().find(|r| n * r.chi2 <= PLATEAU_LEVEL).map(|r| r.tau),
    })
}

/// Time sweeps for every gamma in `config.gamma_list`, one summary per
/// `(gamma, engine)`.
pub fn run_gamma_scan(
    config: &SweepConfig,
) -> Result<(Vec<SweepRow>, Vec<GammaSummary>, Option<EngineComparison>)> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &gamma in &config.gamma_list {
        let block = sweep_rows(config, gamma)?;
        for engine in config.engine.engines() {
            let mine: Vec<SweepRow> = block.iter().filter(|r| r.engine == engine).copied().collect();
            summaries.extend(summarize_gamma(&mine, config.n_particles));
        }
        rows.extend(block);
    }
    let comparison = compare_sweep_rows(config, &rows);
    Ok((rows, summaries, comparison))
}
