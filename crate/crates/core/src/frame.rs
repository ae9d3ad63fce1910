//! Mean-spin frame `(n1, n2, n3)`, the 3x3 spin covariance matrix in that
//! frame, and the extremal variances perpendicular to the mean spin.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dicke::{apply_direction, DensityMatrix, SpinDirection};
use crate::error::Result;
use crate::moments::MomentSet;

/// Mean spin shorter than this times `j` is treated as zero.
pub const DEGENERATE_MEAN_SPIN: f64 = 1e-12;

/// Orthonormal triad with `n3` along the mean spin. `n1` and `n2` span the
/// plane where squeezing is measured.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSpinFrame {
    pub n1: SpinDirection,
    pub n2: SpinDirection,
    pub n3: SpinDirection,
    pub theta: f64,
    pub phi: f64,
    /// Mean-spin length `|<J>|`.
    pub length: f64,
    /// Set when the mean spin vanishes; the frame then falls back to
    /// `theta = pi/2, phi = 0`.
    pub degenerate: bool,
}

impl MeanSpinFrame {
    pub fn from_angles(theta: f64, phi: f64, length: f64, degenerate: bool) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        // components are unit norm by construction
        Self {
            n1: SpinDirection::normalized(Vector3::new(-sp, cp, 0.0)).expect("unit"),
            n2: SpinDirection::normalized(Vector3::new(-ct * cp, -ct * sp, st)).expect("unit"),
            n3: SpinDirection::normalized(Vector3::new(st * cp, st * sp, ct)).expect("unit"),
            theta,
            phi,
            length,
            degenerate,
        }
    }

    pub fn basis(&self) -> [SpinDirection; 3] {
        [self.n1, self.n2, self.n3]
    }

    /// Maps frame coordinates `(a1, a2, a3)` to the lab vector `a1 n1 + a2 n2 + a3 n3`.
    pub fn to_lab(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.n1.as_vector() * v.x + self.n2.as_vector() * v.y + self.n3.as_vector() * v.z
    }
}

/// Symmetrized covariance `Cov(J_ni, J_nj)` in the mean-spin frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceMatrix3 {
    pub entries: Matrix3<f64>,
    /// `(<J_n1>, <J_n2>, <J_n3>)`; the first two vanish for a proper frame.
    pub means: Vector3<f64>,
    pub frame: MeanSpinFrame,
}

impl CovarianceMatrix3 {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// `Var(J_n3) = <J_n3^2> - <J_n3>^2`.
    pub fn var_n3(&self) -> f64 {
        self.entries[(2, 2)]
    }
}

/// Extremal variances of `J_perp(v) = J_n1 cos v + J_n2 sin v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransverseExtrema {
    pub v_plus: f64,
    pub v_minus: f64,
    /// Angle of minimal variance, measured from `n1` towards `n2`.
    pub theta_sq: f64,
    /// Angle of maximal variance.
    pub delta: f64,
    /// `<J_n1^2 - J_n2^2>`
    pub a_coef: f64,
    /// `<[J_n1, J_n2]_+>`
    pub b_coef: f64,
    /// `<J_n1^2 + J_n2^2>`
    pub c_coef: f64,
}

impl TransverseExtrema {
    /// Variance along the in-plane angle `v`.
    pub fn variance_at(&self, v: f64) -> f64 {
        0.5 * (self.c_coef + self.a_coef * (2.0 * v).cos() + self.b_coef * (2.0 * v).sin())
    }
}

pub fn build_frame(moments: &MomentSet) -> MeanSpinFrame {
    let r = moments.jp.norm();
    let length = r.hypot(moments.jz);
    if length < DEGENERATE_MEAN_SPIN * moments.size.j() {
        return MeanSpinFrame::from_angles(FRAC_PI_2, 0.0, length, true);
    }
    let theta = r.atan2(moments.jz);
    let phi = moments.jp.im.atan2(moments.jp.re);
    MeanSpinFrame::from_angles(theta, phi, length, false)
}

/// Covariance matrix assembled from the six moments.
///
/// With `a1 = <J+> e^{-i phi}`, `a2 = <J+^2> e^{-2i phi}` and
/// `a3 = <J+(2Jz+1)> e^{-i phi}`, and `Ja = cos(phi) Jx + sin(phi) Jy`:
///
/// ```text
/// <J_n1^2>        = (<J^2> - <Jz^2>)/2 - Re a2/2
/// <Ja^2>          = (<J^2> - <Jz^2>)/2 + Re a2/2
/// <J_n2^2>        = cos^2 <Ja^2> + sin^2 <Jz^2> - sin2th/2 Re a3
/// <J_n3^2>        = sin^2 <Ja^2> + cos^2 <Jz^2> + sin2th/2 Re a3
/// <{J_n1, J_n2}>  = -cos Im a2 + sin Im a3
/// <{J_n1, J_n3}>  =  sin Im a2 + cos Im a3
/// <{J_n2, J_n3}>  = -sin2th/2 (<J^2> - 3<Jz^2> + Re a2) - cos2th Re a3
/// ```
pub fn covariance_matrix(moments: &MomentSet, frame: &MeanSpinFrame) -> CovarianceMatrix3 {
    let rot = Complex64::from_polar(1.0, -frame.phi);
    let a1 = moments.jp * rot;
    let a2 = moments.jp2 * rot * rot;
    let a3 = moments.jp_jz * rot;
    let (s, c) = frame.theta.sin_cos();
    let (s2, c2) = (2.0 * frame.theta).sin_cos();
    let (j2, jz, jz2) = (moments.j2, moments.jz, moments.jz2);

    let transverse = 0.5 * (j2 - jz2);
    let ja_sq = transverse + 0.5 * a2.re;
    let n1_sq = transverse - 0.5 * a2.re;
    let n2_sq = c * c * ja_sq + s * s * jz2 - 0.5 * s2 * a3.re;
    let n3_sq = s * s * ja_sq + c * c * jz2 + 0.5 * s2 * a3.re;
    let anti12 = -c * a2.im + s * a3.im;
    let anti13 = s * a2.im + c * a3.im;
    let anti23 = -0.5 * s2 * (j2 - 3.0 * jz2 + a2.re) - c2 * a3.re;

    let means = Vector3::new(a1.im, -c * a1.re + s * jz, s * a1.re + c * jz);
    let second = Matrix3::new(
        n1_sq,
        0.5 * anti12,
        0.5 * anti13,
        0.5 * anti12,
        n2_sq,
        0.5 * anti23,
        0.5 * anti13,
        0.5 * anti23,
        n3_sq,
    );
    CovarianceMatrix3 { entries: second - means * means.transpose(), means, frame: *frame }
}

/// Covariance matrix from explicit operator products `J_ni J_nj` traced
/// against `rho`; independent of the moment algebra above.
pub fn covariance_matrix_from_state(rho: &DensityMatrix, frame: &MeanSpinFrame) -> Result<CovarianceMatrix3> {
    let size = rho.size();
    let basis = frame.basis();
    let applied = basis.map(|n| apply_direction(size, &n, rho.entries()));
    let mut means = Vector3::zeros();
    for i in 0..3 {
        means[i] = applied[i].trace().re;
    }
    let mut entries = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            // Tr(rho {A, B}) = Tr(A B rho) + Tr(B A rho)
            let ab = apply_direction(size, &basis[i], &applied[j]).trace();
            let ba = apply_direction(size, &basis[j], &applied[i]).trace();
            let v = 0.5 * (ab + ba).re - means[i] * means[j];
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    Ok(CovarianceMatrix3 { entries, means, frame: *frame })
}

/// `V+- = (C +- sqrt(A^2 + B^2)) / 2` with `C = j(j+1) - <J_n3^2>`.
pub fn transverse_extrema(cov: &CovarianceMatrix3, moments: &MomentSet) -> TransverseExtrema {
    let e = &cov.entries;
    let n3_sq = e[(2, 2)] + cov.means.z * cov.means.z;
    // subtract the (vanishing) in-plane means so that C is a variance sum
    let c_coef = moments.j2 - n3_sq - cov.means.x * cov.means.x - cov.means.y * cov.means.y;
    let a_coef = e[(0, 0)] - e[(1, 1)];
    let b_coef = 2.0 * e[(0, 1)];
    let radius = a_coef.hypot(b_coef);
    let (theta_sq, delta) = if radius == 0.0 {
        (0.0, 0.0)
    } else {
        let ang = b_coef.atan2(a_coef);
        ((ang + PI) / 2.0, ang / 2.0)
    };
    TransverseExtrema {
        v_plus: 0.5 * (c_coef + radius),
        v_minus: 0.5 * (c_coef - radius),
        theta_sq,
        delta,
        a_coef,
        b_coef,
        c_coef,
    }
}
