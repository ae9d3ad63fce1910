//! Two independent routes from `(CSS, tau, gamma)` to a [`MetricReport`].
//!
//! The analytic engine evaluates closed-form moments and never builds the
//! state unless dephasing forces a mixed-state QFI. The brute engine builds
//! the Dicke-basis state and computes every quantity from explicit traces and
//! a spectral QFI.

use serde::{Deserialize, Serialize};

use crate::dicke::{build_css, CssParams, DensityMatrix};
use crate::dynamics::{evolve_dephased, evolve_pure, EvolutionParams};
use crate::error::{Error, Result};
use crate::frame::{
    build_frame, covariance_matrix, covariance_matrix_from_state, transverse_extrema, CovarianceMatrix3,
    MeanSpinFrame, TransverseExtrema,
};
use crate::metrics::{chi2, qfi_mixed_max, qfi_pure_max, squeezing_params, MetricReport, QfiMax, SqueezingParams};
use crate::moments::{moments_analytic, moments_from_state, MomentSet};

/// Largest N for which a dense `(N+1) x (N+1)` state is built.
pub const DENSE_STATE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Analytic,
    Brute,
}

impl Engine {
    pub fn tag(&self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Brute => "brute",
        }
    }
}

/// Intermediate and final results for one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub engine: Engine,
    pub moments: MomentSet,
    pub frame: MeanSpinFrame,
    pub covariance: CovarianceMatrix3,
    pub extrema: TransverseExtrema,
    pub report: MetricReport,
}

fn guard_dense(params: &CssParams) -> Result<()> {
    let n = params.size.n();
    if n > DENSE_STATE_LIMIT {
        return Err(Error::ResourceGuard(format!(
            "N = {n} needs a dense state; limit is {DENSE_STATE_LIMIT}"
        )));
    }
    Ok(())
}

fn dephased_state(params: &CssParams, evo: &EvolutionParams) -> DensityMatrix {
    evolve_dephased(&build_css(params).to_density(), *evo)
}

pub fn evaluate(engine: Engine, params: &CssParams, evo: &EvolutionParams) -> Result<Evaluation> {
    match engine {
        Engine::Analytic => evaluate_analytic(params, evo),
        Engine::Brute => evaluate_brute(params, evo),
    }
}

fn evaluate_analytic(params: &CssParams, evo: &EvolutionParams) -> Result<Evaluation> {
    let moments = moments_analytic(params, evo);
    let frame = build_frame(&moments);
    let covariance = covariance_matrix(&moments, &frame);
    let extrema = transverse_extrema(&covariance, &moments);
    let qfi = if evo.gamma * evo.tau == 0.0 {
        qfi_pure_max(&covariance)
    } else {
        // no closed form for the mixed-state QFI
        guard_dense(params)?;
        qfi_mixed_max(&dephased_state(params, evo))?
    };
    finish(Engine::Analytic, params, moments, frame, covariance, extrema, qfi)
}

fn evaluate_brute(params: &CssParams, evo: &EvolutionParams) -> Result<Evaluation> {
    guard_dense(params)?;
    let rho = if evo.gamma == 0.0 {
        evolve_pure(&build_css(params), evo.tau).to_density()
    } else {
        dephased_state(params, evo)
    };
    let moments = moments_from_state(&rho)?;
    let frame = build_frame(&moments);
    let covariance = covariance_matrix_from_state(&rho, &frame)?;
    let extrema = transverse_extrema(&covariance, &moments);
    let qfi = qfi_mixed_max(&rho)?;
    finish(Engine::Brute, params, moments, frame, covariance, extrema, qfi)
}

fn finish(
    engine: Engine,
    params: &CssParams,
    moments: MomentSet,
    frame: MeanSpinFrame,
    covariance: CovarianceMatrix3,
    extrema: TransverseExtrema,
    qfi: QfiMax,
) -> Result<Evaluation> {
    let sq = squeezing_params(&extrema, &frame, params.size);
    let report = MetricReport {
        f_max: qfi.f_max,
        n_opt: qfi.n_opt,
        chi2: chi2(qfi.f_max, params.size)?,
        xi_k2: sq.xi_k2,
        xi_w2: sq.xi_w2,
        v_plus: extrema.v_plus,
        v_minus: extrema.v_minus,
        theta_sq: extrema.theta_sq,
        degenerate_frame: frame.degenerate,
    };
    Ok(Evaluation { engine, moments, frame, covariance, extrema, report })
}

/// Squeezing parameters only, skipping the QFI. Cheap enough for inner
/// minimization loops.
pub fn evaluate_squeezing(engine: Engine, params: &CssParams, evo: &EvolutionParams) -> Result<SqueezingParams> {
    let moments = match engine {
        Engine::Analytic => moments_analytic(params, evo),
        Engine::Brute => {
            guard_dense(params)?;
            moments_from_state(&dephased_state(params, evo))?
        }
    };
    let frame = build_frame(&moments);
    let extrema = transverse_extrema(&covariance_matrix(&moments, &frame), &moments);
    Ok(squeezing_params(&extrema, &frame, params.size))
}

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn scaled_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Largest [`scaled_difference`] over moments, covariance entries, V+-,
/// squeezing and QFI of two evaluations of the same point.
pub fn max_discrepancy(a: &Evaluation, b: &Evaluation) -> f64 {
    let mut worst = 0.0f64;
    let mut take = |x: f64, y: f64| worst = worst.max(scaled_difference(x, y));
    for (x, y) in a.moments.as_array().iter().zip(b.moments.as_array()) {
        take(*x, y);
    }
    for (x, y) in a.covariance.entries.iter().zip(b.covariance.entries.iter()) {
        take(*x, *y);
    }
    let (ra, rb) = (&a.report, &b.report);
    take(ra.v_plus, rb.v_plus);
    take(ra.v_minus, rb.v_minus);
    take(ra.xi_k2, rb.xi_k2);
    take(ra.f_max, rb.f_max);
    take(ra.chi2, rb.chi2);
    if let (Some(x), Some(y)) = (ra.xi_w2, rb.xi_w2) {
        take(x, y);
    }
    worst
}
