//! Quantum Fisher information, precision bounds and spin-squeezing
//! parameters.

mod qfi;
mod squeezing;

pub use qfi::{
    chi2, qcrb, qfi_matrix, qfi_mixed, qfi_mixed_max, qfi_pure_max, qfi_pure_simplified, sld_operator, sld_oracle,
    MaxAxis, QcrbResult, QfiMax, SimplifiedQfi, SldSolution, SUPPORT_CUTOFF,
};
pub use squeezing::{squeezing_params, t_min_closed_form, SqueezingParams};

use serde::{Deserialize, Serialize};

use crate::dicke::SpinDirection;

/// Everything reported for one `(state, time)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Maximal QFI over generator directions.
    pub f_max: f64,
    /// Direction attaining `f_max`, in the lab frame.
    pub n_opt: SpinDirection,
    /// `N / f_max`; below 1 witnesses entanglement.
    pub chi2: f64,
    pub xi_k2: f64,
    /// `None` when the mean spin vanishes.
    pub xi_w2: Option<f64>,
    pub v_plus: f64,
    pub v_minus: f64,
    /// In-plane angle of minimal variance.
    pub theta_sq: f64,
    pub degenerate_frame: bool,
}

impl MetricReport {
    pub fn entanglement_witnessed(&self) -> bool {
        self.chi2 < 1.0
    }
}
