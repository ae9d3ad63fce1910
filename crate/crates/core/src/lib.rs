//! Spin squeezing and quantum Fisher information of one-axis twisted
//! coherent spin states, with and without collective dephasing.
//!
//! Everything lives in the symmetric Dicke subspace of `N` spin-1/2
//! particles. Time is the dimensionless `tau = kappa t` and the dephasing
//! rate is `gamma` in units of `kappa`.

pub mod dicke;
pub mod dynamics;
pub mod engine;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod metrics;
pub mod moments;
pub mod output;
pub mod sweep;
pub mod verify;

pub use dicke::{
    build_css, collective_operator, direction_operator, CollectiveOp, CssParams, DensityMatrix, DickeVector,
    Expectation, SpinDirection, SpinSize,
};
pub use dynamics::{evolve_dephased, evolve_pure, lindblad_rhs, EvolutionParams};
pub use engine::{evaluate, Engine, Evaluation};
pub use error::{Error, Result};
pub use frame::{
    build_frame, covariance_matrix, covariance_matrix_from_state, transverse_extrema, CovarianceMatrix3,
    MeanSpinFrame, TransverseExtrema,
};
pub use metrics::{
    chi2, qcrb, qfi_mixed, qfi_mixed_max, qfi_pure_max, qfi_pure_simplified, sld_oracle, squeezing_params,
    t_min_closed_form, MetricReport, QfiMax, SqueezingParams,
};
pub use moments::{moments_analytic, moments_from_state, MomentSet};
pub use sweep::{
    run_dynamics_sweep, run_gamma_scan, run_sweep, run_theta_scan, EngineChoice, GammaSummary, OutputFormat,
    ScanVariable, SweepConfig, SweepOutput, SweepRow, TauGrid, ThetaScanRow,
};
pub use verify::{run_verify, VerifyConfig, VerifyReport};
