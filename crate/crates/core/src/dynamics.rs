//! Exact one-axis-twisting evolution, `H = kappa Jz^2`, optionally with
//! collisional (Jz) dephasing. Time is dimensionless: `tau = kappa t`,
//! `gamma = Gamma / kappa`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dicke::{collective_operator, CollectiveOp, DensityMatrix, DickeVector};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub tau: f64,
    pub gamma: f64,
}

impl EvolutionParams {
    pub fn new(tau: f64, gamma: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidConfig(format!("tau must be finite and >= 0, got {tau}")));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidConfig(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { tau, gamma })
    }

    pub fn unitary(tau: f64) -> Result<Self> {
        Self::new(tau, 0.0)
    }

    /// The twisting angle `mu = 2 kappa t`.
    pub fn mu(&self) -> f64 {
        2.0 * self.tau
    }
}

/// `c_m(tau) = c_m(0) exp(-i m^2 tau)`.
pub fn evolve_pure(state0: &DickeVector, tau: f64) -> DickeVector {
    let size = state0.size();
    let amps = state0
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let m = size.m_at(k);
            c * Complex64::from_polar(1.0, -m * m * tau)
        })
        .collect::<Vec<_>>();
    DickeVector::from_parts_unchecked(size, amps.into())
}

/// Closed-form solution of the dephasing master equation:
/// `rho_mn(tau) = rho_mn(0) exp(i(n^2 - m^2) tau - (m - n)^2 gamma tau)`.
pub fn evolve_dephased(rho0: &DensityMatrix, params: EvolutionParams) -> DensityMatrix {
    let size = rho0.size();
    let EvolutionParams { tau, gamma } = params;
    let d = size.dim();
    let src = rho0.entries();
    let out = CMatrix::from_fn(d, d, |a, b| {
        if a == b {
            return src[(a, b)];
        }
        let (m, n) = (size.m_at(a), size.m_at(b));
        let phase = (n * n - m * m) * tau;
        let damping = (-(m - n) * (m - n) * gamma * tau).exp();
        src[(a, b)] * Complex64::from_polar(damping, phase)
    });
    DensityMatrix::from_parts_unchecked(size, out)
}

/// Right-hand side of the master equation in units of kappa,
/// `d rho / d tau = i[rho, Jz^2] + gamma (2 Jz rho Jz - rho Jz^2 - Jz^2 rho)`.
///
/// Only used to check [`evolve_dephased`] against the ODE.
pub fn lindblad_rhs(rho: &DensityMatrix, gamma: f64) -> CMatrix {
    let size = rho.size();
    let jz = collective_operator(size, CollectiveOp::Jz);
    let jz2 = &jz * &jz;
    let r = rho.entries();
    let coherent = (r * &jz2 - &jz2 * r) * Complex64::i();
    let dissipative = (&jz * r * &jz) * Complex64::from(2.0) - r * &jz2 - &jz2 * r;
    coherent + dissipative * Complex64::from(gamma)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use nalgebra::DMatrix;

    use super::*;
    use crate::dicke::{build_css, CssParams, Expectation, SpinSize};
    use crate::linalg::{hermitian_eigen, is_hermitian};

    fn css(n: usize, theta: f64, phi: f64) -> DickeVector {
        build_css(&CssParams::new(SpinSize::new(n).unwrap(), theta, phi).unwrap())
    }

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn params_validation() {
        assert!(EvolutionParams::new(-0.1, 0.0).is_err());
        assert!(EvolutionParams::new(0.1, -1.0).is_err());
        assert!(EvolutionParams::new(f64::NAN, 0.0).is_err());
        assert_eq!(EvolutionParams::new(0.3, 0.0).unwrap().mu(), 0.6);
    }

    #[test]
    fn zero_time_is_identity() {
        let psi = css(7, 1.0, 0.4);
        assert_eq!(evolve_pure(&psi, 0.0), psi);
    }

    #[test]
    fn moduli_preserved() {
        let psi = css(9, 1.0, 0.4);
        let out = evolve_pure(&psi, 2.7);
        for (a, b) in psi.amplitudes().iter().zip(out.amplitudes().iter()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_matches_dense_exponential() {
        // exp(-i tau Jz^2) by Taylor series on the dense matrix, independent of
        // the diagonal-phase shortcut
        let psi = css(4, FRAC_PI_2, 0.0);
        let tau = 0.3;
        let jz = collective_operator(psi.size(), CollectiveOp::Jz);
        let a = (&jz * &jz) * Complex64::new(0.0, -tau);
        let d = psi.size().dim();
        let mut u = DMatrix::<Complex64>::identity(d, d);
        let mut term = DMatrix::<Complex64>::identity(d, d);
        for k in 1..60 {
            term = &term * &a / Complex64::from(k as f64);
            u += &term;
        }
        let want = u * psi.amplitudes();
        let got = evolve_pure(&psi, tau);
        let err = (got.amplitudes() - want).norm();
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn dephased_without_gamma_is_unitary() {
        let psi = css(6, 0.9, 1.7);
        let tau = 0.77;
        let a = evolve_dephased(&psi.to_density(), EvolutionParams::new(tau, 0.0).unwrap());
        let b = evolve_pure(&psi, tau).to_density();
        assert!(max_diff(a.entries(), b.entries()) < 1e-12);
    }

    #[test]
    fn populations_unchanged() {
        let rho = css(8, 1.1, 0.2).to_density();
        let out = evolve_dephased(&rho, EvolutionParams::new(1.3, 0.4).unwrap());
        for k in 0..9 {
            assert_eq!(out.entries()[(k, k)], rho.entries()[(k, k)]);
        }
    }

    #[test]
    fn strong_dephasing_kills_coherences() {
        let rho = css(5, 1.1, 0.2).to_density();
        let out = evolve_dephased(&rho, EvolutionParams::new(50.0, 2.0).unwrap());
        for a in 0..6 {
            for b in 0..6 {
                if a != b {
                    assert!(out.entries()[(a, b)].norm() < 1e-30);
                }
            }
        }
    }

    #[test]
    fn diagonal_state_is_fixed_point() {
        let s = SpinSize::new(4).unwrap();
        let rho = DensityMatrix::maximally_mixed(s);
        let rhs = lindblad_rhs(&rho, 0.3);
        assert!(rhs.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn closed_form_solves_master_equation() {
        let psi = css(6, 1.2, 0.5);
        let rho0 = psi.to_density();
        let (tau, gamma, h) = (0.4, 0.15, 1e-5);
        let at = |t: f64| evolve_dephased(&rho0, EvolutionParams::new(t, gamma).unwrap());
        let fd = (at(tau + h).entries() - at(tau - h).entries()) / Complex64::from(2.0 * h);
        let rhs = lindblad_rhs(&at(tau), gamma);
        let err = max_diff(&fd, &rhs);
        assert!(err < 1e-6, "err = {err}");
    }

    #[test]
    fn rhs_is_traceless() {
        let psi = css(8, 0.8, 0.1);
        let rho = evolve_dephased(&psi.to_density(), EvolutionParams::new(0.5, 0.2).unwrap());
        assert!(lindblad_rhs(&rho, 0.2).trace().norm() < 1e-13);
    }

    #[test]
    fn output_stays_hermitian_and_positive() {
        let rho = css(12, 1.0, 0.3).to_density();
        let out = evolve_dephased(&rho, EvolutionParams::new(0.9, 0.5).unwrap());
        assert!(is_hermitian(out.entries(), 1e-14));
        assert!(hermitian_eigen(out.entries()).values[0] > -1e-10);
        let jz = collective_operator(out.size(), CollectiveOp::Jz);
        let e0 = rho.expectation(&(&jz * &jz)).unwrap().re;
        let e1 = out.expectation(&(&jz * &jz)).unwrap().re;
        assert!((e0 - e1).abs() < 1e-12);
    }
}
