use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dicke::{apply_collective, apply_direction, direction_operator, CollectiveOp, DensityMatrix, SpinDirection, SpinSize};
use crate::error::{Error, Result};
use crate::frame::{CovarianceMatrix3, TransverseExtrema};
use crate::linalg::{fix_sign, hermitian_eigen, symmetric_eigen3, trace_of_product, CMatrix};

/// Eigenvalue pairs with `p_i + p_j` below this fraction of the largest
/// eigenvalue are outside the support and skipped.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

const NEGATIVE_EIGENVALUE_FLOOR: f64 = -1e-10;

/// Maximal QFI and the generator direction that attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiMax {
    pub f_max: f64,
    pub n_opt: SpinDirection,
}

/// Pure-state QFI is four times the generator variance, so its maximum is
/// four times the largest eigenvalue of the covariance matrix. Ties go to the
/// last eigenvector of the ascending solver output.
pub fn qfi_pure_max(cov: &CovarianceMatrix3) -> QfiMax {
    let (values, vectors) = symmetric_eigen3(&cov.entries);
    let lab = fix_sign(cov.frame.to_lab(&vectors[2]));
    QfiMax {
        f_max: 4.0 * values[2],
        n_opt: SpinDirection::normalized(lab).expect("eigenvector is nonzero"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxAxis {
    /// Maximum lies in the `n1 n2` plane.
    Transverse,
    /// Maximum lies along the mean spin `n3`.
    MeanSpin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplifiedQfi {
    pub f_max: f64,
    pub axis: MaxAxis,
}

/// `4 max(V+, Var(J_n3))`, valid for twisted coherent states where the
/// covariance matrix has no in-plane/axial coupling at the maximum. Ties are
/// reported as in-plane.
pub fn qfi_pure_simplified(extrema: &TransverseExtrema, cov: &CovarianceMatrix3) -> SimplifiedQfi {
    let axial = cov.var_n3();
    if axial > extrema.v_plus {
        SimplifiedQfi { f_max: 4.0 * axial, axis: MaxAxis::MeanSpin }
    } else {
        SimplifiedQfi { f_max: 4.0 * extrema.v_plus, axis: MaxAxis::Transverse }
    }
}

/// Spectral data shared by the mixed-state routines.
struct Spectrum {
    vectors: CMatrix,
    /// `2 (p_i - p_j)^2 / (p_i + p_j)` on the support, zero elsewhere.
    weights: DMatrix<f64>,
    probs: Vec<f64>,
}

fn spectrum(rho: &DensityMatrix) -> Result<Spectrum> {
    let eig = hermitian_eigen(rho.entries());
    let lowest = eig.values.first().copied().unwrap_or(0.0);
    if lowest < NEGATIVE_EIGENVALUE_FLOOR {
        return Err(Error::InvalidState(format!("negative eigenvalue {lowest}")));
    }
    let probs: Vec<f64> = eig.values.iter().map(|p| p.max(0.0)).collect();
    let top = probs.iter().copied().fold(0.0, f64::max);
    let eps = SUPPORT_CUTOFF * top;
    let d = probs.len();
    let weights = DMatrix::from_fn(d, d, |i, j| {
        let sum = probs[i] + probs[j];
        if sum > eps {
            let diff = probs[i] - probs[j];
            2.0 * diff * diff / sum
        } else {
            0.0
        }
    });
    Ok(Spectrum { vectors: eig.vectors, weights, probs })
}

fn in_eigenbasis(spec: &Spectrum, op: &CMatrix) -> CMatrix {
    spec.vectors.adjoint() * op * &spec.vectors
}

/// `V^dag (op V)` with the tridiagonal action of `op`.
fn collective_in_eigenbasis(spec: &Spectrum, size: SpinSize, op: CollectiveOp) -> CMatrix {
    spec.vectors.adjoint() * apply_collective(size, op, &spec.vectors)
}

/// QFI of `rho` for the phase generated by `J_n`:
/// `F = sum_ij 2 (p_i - p_j)^2 / (p_i + p_j) |<i|J_n|j>|^2`.
pub fn qfi_mixed(rho: &DensityMatrix, n: &SpinDirection) -> Result<f64> {
    let spec = spectrum(rho)?;
    let jn = spec.vectors.adjoint() * apply_direction(rho.size(), n, &spec.vectors);
    Ok(jn.iter().zip(spec.weights.iter()).map(|(z, w)| w * z.norm_sqr()).sum())
}

/// QFI matrix `C` with `F(n) = n^T C n`:
/// `C_ab = sum_ij 2 (p_i - p_j)^2 / (p_i + p_j) Re[<i|J_a|j><j|J_b|i>]`.
pub fn qfi_matrix(rho: &DensityMatrix) -> Result<Matrix3<f64>> {
    let spec = spectrum(rho)?;
    let size = rho.size();
    let raise = collective_in_eigenbasis(&spec, size, CollectiveOp::JPlus);
    let lower = raise.adjoint();
    let ops = [
        (&raise + &lower).unscale(2.0),
        (&raise - &lower) * Complex64::new(0.0, -0.5),
        collective_in_eigenbasis(&spec, size, CollectiveOp::Jz),
    ];
    let mut c = Matrix3::zeros();
    for a in 0..3 {
        for b in a..3 {
            let v: f64 = ops[a]
                .iter()
                .zip(ops[b].iter())
                .zip(spec.weights.iter())
                .map(|((x, y), w)| w * (x * y.conj()).re)
                .sum();
            c[(a, b)] = v;
            c[(b, a)] = v;
        }
    }
    Ok(c)
}

/// Largest eigenvalue of [`qfi_matrix`] and its eigenvector. For pure
/// states this equals [`qfi_pure_max`].
pub fn qfi_mixed_max(rho: &DensityMatrix) -> Result<QfiMax> {
    let c = qfi_matrix(rho)?;
    let (values, vectors) = symmetric_eigen3(&c);
    let n = fix_sign(vectors[2]);
    Ok(QfiMax {
        f_max: values[2],
        n_opt: SpinDirection::normalized(n).expect("eigenvector is nonzero"),
    })
}

/// Symmetric logarithmic derivative for `d rho / d phi = -i [J_n, rho]`.
#[derive(Debug, Clone)]
pub struct SldSolution {
    /// `L` in the Dicke basis.
    pub operator: CMatrix,
    /// `Tr(rho L^2)`
    pub fisher: f64,
    /// `Tr(rho L)`, zero for a valid solution.
    pub mean: f64,
}

/// Solves `d rho = (L rho + rho L) / 2` in the eigenbasis of `rho` and maps
/// `L` back. Kept as an oracle for [`qfi_mixed`]: it never touches the
/// closed-form weight sum.
pub fn sld_operator(rho: &DensityMatrix, n: &SpinDirection) -> Result<SldSolution> {
    let spec = spectrum(rho)?;
    let r = rho.entries();
    let jn = direction_operator(rho.size(), n);
    let drho = (&jn * r - r * &jn) * Complex64::new(0.0, -1.0);
    let d_eig = in_eigenbasis(&spec, &drho);
    let top = spec.probs.iter().copied().fold(0.0, f64::max);
    let eps = SUPPORT_CUTOFF * top;
    let dim = spec.probs.len();
    let l_eig = CMatrix::from_fn(dim, dim, |i, j| {
        let sum = spec.probs[i] + spec.probs[j];
        if sum > eps {
            d_eig[(i, j)] * (2.0 / sum)
        } else {
            Complex64::from(0.0)
        }
    });
    let operator = &spec.vectors * l_eig * spec.vectors.adjoint();
    let fisher = trace_of_product(r, &(&operator * &operator)).re;
    let mean = trace_of_product(r, &operator).re;
    Ok(SldSolution { operator, fisher, mean })
}

pub fn sld_oracle(rho: &DensityMatrix, n: &SpinDirection) -> Result<f64> {
    Ok(sld_operator(rho, n)?.fisher)
}

/// `chi^2 = N / F`.
pub fn chi2(f: f64, size: SpinSize) -> Result<f64> {
    if f.is_nan() || f <= 0.0 {
        return Err(Error::NonPositiveInformation(f));
    }
    Ok(size.n_f64() / f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcrbResult {
    pub delta_phi: f64,
    pub repetitions: u64,
}

/// Quantum Cramer-Rao bound `1 / sqrt(repetitions F)`.
pub fn qcrb(f: f64, repetitions: u64) -> Result<QcrbResult> {
    if f.is_nan() || f <= 0.0 {
        return Err(Error::NonPositiveInformation(f));
    }
    if repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
    }
    Ok(QcrbResult { delta_phi: 1.0 / (repetitions as f64 * f).sqrt(), repetitions })
}
