use serde::{Deserialize, Serialize};

use crate::dicke::{CssParams, SpinSize};
use crate::error::{Error, Result};
use crate::frame::{MeanSpinFrame, TransverseExtrema};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingParams {
    /// Kitagawa-Ueda parameter `V- / (N/4)`; exactly 1 for a coherent state.
    pub xi_k2: f64,
    /// Wineland parameter `N V- / R^2`; undefined for a vanishing mean spin.
    pub xi_w2: Option<f64>,
}

pub fn squeezing_params(extrema: &TransverseExtrema, frame: &MeanSpinFrame, size: SpinSize) -> SqueezingParams {
    let n = size.n_f64();
    let xi_k2 = 4.0 * extrema.v_minus / n;
    let xi_w2 = (!frame.degenerate).then(|| n * extrema.v_minus / (frame.length * frame.length));
    SqueezingParams { xi_k2, xi_w2 }
}

/// Short-time, large-N estimate of the time of strongest squeezing,
/// `kappa t = 3^{1/6} (2j sin^2 t0)^{-2/3} / (1 + 9j sin^2 t0 cos^2 t0)^{1/6}`.
pub fn t_min_closed_form(params: &CssParams) -> Result<f64> {
    let (s, c) = params.theta0.sin_cos();
    if s.abs() < 1e-15 {
        return Err(Error::DegenerateInitialState);
    }
    let j = params.size.j();
    let s2 = s * s;
    Ok(3f64.powf(1.0 / 6.0) * (2.0 * j * s2).powf(-2.0 / 3.0) / (1.0 + 9.0 * j * s2 * c * c).powf(1.0 / 6.0))
}
