//! Shared inputs for the benchmarks.

use oatqfi::{build_css, evolve_dephased, CssParams, DensityMatrix, EvolutionParams, SpinSize};

pub fn params(n: usize, theta0: f64) -> CssParams {
    CssParams::new(SpinSize::new(n).expect("n >= 1"), theta0, 0.0).expect("valid angles")
}

pub fn evolution(tau: f64, gamma: f64) -> EvolutionParams {
    EvolutionParams::new(tau, gamma).expect("valid evolution")
}

/// Dephased one-axis-twisted state at `theta0 = 1`.
pub fn dephased_state(n: usize, tau: f64, gamma: f64) -> DensityMatrix {
    evolve_dephased(&build_css(&params(n, 1.0)).to_density(), evolution(tau, gamma))
}
