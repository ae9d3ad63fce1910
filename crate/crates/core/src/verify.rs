//! Randomized self-checks: analytic against brute engine, and spectral
//! mixed-state QFI against the explicit SLD solution.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dicke::{build_css, CssParams, DensityMatrix, SpinDirection, SpinSize};
use crate::dynamics::{evolve_dephased, EvolutionParams};
use crate::engine::{evaluate, max_discrepancy, scaled_difference, Engine};
use crate::error::Result;
use crate::metrics::{qfi_mixed, sld_operator};

pub const GAMMA_CHOICES: [f64; 4] = [0.0, 0.01, 0.1, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub engine_cases: usize,
    pub max_engine_n: usize,
    pub sld_cases: usize,
    pub max_sld_n: usize,
    pub tolerance: f64,
    pub sld_mean_tolerance: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            engine_cases: 200,
            max_engine_n: 24,
            sld_cases: 50,
            max_sld_n: 8,
            tolerance: 1e-8,
            sld_mean_tolerance: 1e-10,
        }
    }
}

/// A random evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleCase {
    pub n: usize,
    pub theta0: f64,
    pub phi0: f64,
    pub tau: f64,
    pub gamma: f64,
}

impl SampleCase {
    pub fn random(rng: &mut impl Rng, max_n: usize) -> Self {
        SampleCase {
            n: rng.random_range(1..=max_n),
            theta0: rng.random_range(1e-6..PI),
            phi0: rng.random_range(0.0..2.0 * PI),
            tau: rng.random_range(0.0..=PI),
            gamma: GAMMA_CHOICES[rng.random_range(0..GAMMA_CHOICES.len())],
        }
    }

    pub fn params(&self) -> Result<(CssParams, EvolutionParams)> {
        Ok((
            CssParams::new(SpinSize::new(self.n)?, self.theta0, self.phi0)?,
            EvolutionParams::new(self.tau, self.gamma)?,
        ))
    }

    pub fn state(&self) -> Result<DensityMatrix> {
        let (p, e) = self.params()?;
        Ok(evolve_dephased(&build_css(&p).to_density(), e))
    }
}

/// Largest discrepancy between the two engines over one case.
pub fn engine_case_discrepancy(case: &SampleCase) -> Result<f64> {
    let (p, e) = case.params()?;
    let a = evaluate(Engine::Analytic, &p, &e)?;
    let b = evaluate(Engine::Brute, &p, &e)?;
    Ok(max_discrepancy(&a, &b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SldCheck {
    pub qfi: f64,
    pub sld_fisher: f64,
    pub sld_mean: f64,
}

pub fn sld_case(case: &SampleCase, direction: &SpinDirection) -> Result<SldCheck> {
    let rho = case.state()?;
    let sld = sld_operator(&rho, direction)?;
    Ok(SldCheck { qfi: qfi_mixed(&rho, direction)?, sld_fisher: sld.fisher, sld_mean: sld.mean })
}

pub fn random_direction(rng: &mut impl Rng) -> SpinDirection {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi = rng.random_range(0.0..2.0 * PI);
    SpinDirection::spherical(z.acos(), phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub engine_max_rel_diff: f64,
    pub worst_engine_case: Option<SampleCase>,
    pub sld_max_rel_diff: f64,
    pub sld_max_abs_mean: f64,
    pub passed: bool,
}

pub fn run_verify(config: VerifyConfig) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut engine_max = 0.0f64;
    let mut worst = None;
    for _ in 0..config.engine_cases {
        let case = SampleCase::random(&mut rng, config.max_engine_n);
        let d = engine_case_discrepancy(&case)?;
        if d > engine_max || worst.is_none() {
            engine_max = engine_max.max(d);
            worst = Some(case);
        }
    }
    let mut sld_max = 0.0f64;
    let mut mean_max = 0.0f64;
    for _ in 0..config.sld_cases {
        let mut case = SampleCase::random(&mut rng, config.max_sld_n);
        if case.gamma == 0.0 {
            case.gamma = GAMMA_CHOICES[1 + rng.random_range(0..GAMMA_CHOICES.len() - 1)];
        }
        let check = sld_case(&case, &random_direction(&mut rng))?;
        sld_max = sld_max.max(scaled_difference(check.qfi, check.sld_fisher));
        mean_max = mean_max.max(check.sld_mean.abs());
    }
    let passed = engine_max <= config.tolerance && sld_max <= config.tolerance && mean_max <= config.sld_mean_tolerance;
    Ok(VerifyReport {
        config,
        engine_max_rel_diff: engine_max,
        worst_engine_case: worst,
        sld_max_rel_diff: sld_max,
        sld_max_abs_mean: mean_max,
        passed,
    })
}
