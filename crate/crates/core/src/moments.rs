//! The six expectation values that fix the spin covariance matrix of a
//! twisted (and possibly dephased) coherent spin state.
//!
//! Closed forms use the Heisenberg-picture ladder operator
//! `J+(t) = J+ exp(i mu (Jz + 1/2))`, `mu = 2 kappa t`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dicke::{apply_collective, CollectiveOp, CssParams, DensityMatrix, SpinSize};
use crate::linalg::CMatrix;
use crate::dynamics::EvolutionParams;
use crate::error::Result;

/// Below this transverse length the azimuth is meaningless.
pub const DEGENERATE_TRANSVERSE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub size: SpinSize,
    /// `<J^2>`
    pub j2: f64,
    /// `<Jz>`
    pub jz: f64,
    /// `<Jz^2>`
    pub jz2: f64,
    /// `<J+>`
    pub jp: Complex64,
    /// `<J+^2>`
    pub jp2: Complex64,
    /// `<J+ (2 Jz + 1)>`
    pub jp_jz: Complex64,
}

impl MomentSet {
    /// Lab-frame mean spin `(<Jx>, <Jy>, <Jz>)`.
    pub fn mean_spin(&self) -> [f64; 3] {
        [self.jp.re, self.jp.im, self.jz]
    }

    pub fn mean_spin_length(&self) -> f64 {
        self.jp.norm().hypot(self.jz)
    }

    pub fn as_array(&self) -> [f64; 9] {
        [
            self.j2,
            self.jz,
            self.jz2,
            self.jp.re,
            self.jp.im,
            self.jp2.re,
            self.jp2.im,
            self.jp_jz.re,
            self.jp_jz.im,
        ]
    }
}

/// `<J+> = r e^{i phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarDecomposition {
    pub r: f64,
    pub phi: f64,
    pub degenerate: bool,
}

/// `z^p` through modulus and argument; `p` is `2j - 1` or `2j - 2`, always
/// a non-negative integer here, so the branch of `arg z` is irrelevant.
fn power(z: Complex64, p: f64) -> Complex64 {
    Complex64::from_polar(z.norm().powf(p), p * z.arg())
}

/// Dephasing multiplies the `|m><m + dm|` coherences by `exp(-dm^2 gamma tau)`.
pub fn coherence_damping(delta_m: u32, evo: &EvolutionParams) -> f64 {
    let dm = f64::from(delta_m);
    (-dm * dm * evo.gamma * evo.tau).exp()
}

/// Closed-form moments of the twisted CSS, including dephasing.
pub fn moments_analytic(params: &CssParams, evo: &EvolutionParams) -> MomentSet {
    let size = params.size;
    let j = size.j();
    let (sin_t, cos_t) = params.theta0.sin_cos();
    let half = evo.mu() / 2.0;
    let (sh, ch) = half.sin_cos();
    let (sm, cm) = evo.mu().sin_cos();

    let base = Complex64::new(ch, cos_t * sh);
    let e_phi = Complex64::from_polar(1.0, params.phi0);

    let jp = e_phi * (j * sin_t) * power(base, 2.0 * j - 1.0) * coherence_damping(1, evo);

    // j(j - 1/2) vanishes for a single spin, where the powers below would be 1/0
    let (jp2, jp_jz) = if size.n() < 2 {
        (Complex64::from(0.0), Complex64::from(0.0))
    } else {
        let pref = j * (j - 0.5);
        let jp2 = e_phi * e_phi
            * (pref * sin_t * sin_t)
            * power(Complex64::new(cm, cos_t * sm), 2.0 * j - 2.0)
            * coherence_damping(2, evo);
        let jp_half = e_phi
            * (pref * sin_t)
            * power(base, 2.0 * j - 2.0)
            * Complex64::new(cos_t * ch, sh)
            * coherence_damping(1, evo);
        (jp2, jp_half * 2.0)
    };

    MomentSet {
        size,
        j2: size.casimir(),
        jz: j * cos_t,
        jz2: j / 2.0 + j * (j - 0.5) * cos_t * cos_t,
        jp,
        jp2,
        jp_jz,
    }
}

/// The same six moments as explicit traces against the state.
pub fn moments_from_state(rho: &DensityMatrix) -> Result<MomentSet> {
    let size = rho.size();
    let r = rho.entries();
    let act = |op, m: &CMatrix| apply_collective(size, op, m);
    let trace = |m: &CMatrix| m.trace();
    let jz_rho = act(CollectiveOp::Jz, r);
    let jp_rho = act(CollectiveOp::JPlus, r);
    let jm_rho = act(CollectiveOp::JMinus, r);
    // J^2 = (J+ J- + J- J+) / 2 + Jz^2
    let j2 = 0.5 * (trace(&act(CollectiveOp::JPlus, &jm_rho)) + trace(&act(CollectiveOp::JMinus, &jp_rho)))
        + trace(&act(CollectiveOp::Jz, &jz_rho));
    let shifted = &jz_rho * Complex64::from(2.0) + r;
    Ok(MomentSet {
        size,
        j2: j2.re,
        jz: trace(&jz_rho).re,
        jz2: trace(&act(CollectiveOp::Jz, &jz_rho)).re,
        jp: trace(&jp_rho),
        jp2: trace(&act(CollectiveOp::JPlus, &jp_rho)),
        jp_jz: trace(&act(CollectiveOp::JPlus, &shifted)),
    })
}

pub fn polar_decompose(moments: &MomentSet) -> PolarDecomposition {
    let r = moments.jp.norm();
    if r < DEGENERATE_TRANSVERSE {
        return PolarDecomposition { r, phi: 0.0, degenerate: true };
    }
    PolarDecomposition { r, phi: moments.jp.arg(), degenerate: false }
}

/// `r = j sin(theta0) (1 - sin^2(theta0) sin^2(mu/2))^{j - 1/2} e^{-gamma tau}`.
pub fn transverse_length(params: &CssParams, evo: &EvolutionParams) -> f64 {
    let j = params.size.j();
    let s = params.theta0.sin();
    let sh = (evo.mu() / 2.0).sin();
    j * s * (1.0 - s * s * sh * sh).powf(j - 0.5) * coherence_damping(1, evo)
}

/// Mean-spin azimuth `phi0 + (2j - 1) arctan(cos(theta0) tan(mu/2))`,
/// continued across the poles of `tan` so that it is a smooth function of
/// time instead of jumping by `(2j - 1) pi`.
pub fn mean_spin_azimuth(params: &CssParams, evo: &EvolutionParams) -> f64 {
    let j = params.size.j();
    let c = params.theta0.cos();
    let x = evo.mu() / 2.0;
    let branch = (x / PI).round();
    let reduced = x - branch * PI;
    let cont = (c * reduced.tan()).atan() + c.signum_or_zero() * branch * PI;
    params.phi0 + (2.0 * j - 1.0) * cont
}

trait SignumOrZero {
    fn signum_or_zero(self) -> f64;
}

impl SignumOrZero for f64 {
    fn signum_or_zero(self) -> f64 {
        if self == 0.0 {
            0.0
        } else {
            self.signum()
        }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};

    use super::*;
    use crate::dicke::{build_css, collective_operator, Expectation};
    use crate::dynamics::evolve_dephased;

    fn css(n: usize, theta: f64, phi: f64) -> CssParams {
        CssParams::new(SpinSize::new(n).unwrap(), theta, phi).unwrap()
    }

    fn evo(tau: f64, gamma: f64) -> EvolutionParams {
        EvolutionParams::new(tau, gamma).unwrap()
    }

    fn brute(p: &CssParams, e: &EvolutionParams) -> MomentSet {
        let rho = evolve_dephased(&build_css(p).to_density(), *e);
        moments_from_state(&rho).unwrap()
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
    }

    #[test]
    fn traces_match_dense_operators() {
        let p = css(9, 1.2, 0.4);
        let rho = evolve_dephased(&build_css(&p).to_density(), evo(0.7, 0.2));
        let size = p.size;
        let jz = collective_operator(size, CollectiveOp::Jz);
        let jp = collective_operator(size, CollectiveOp::JPlus);
        let id = CMatrix::identity(size.dim(), size.dim());
        let m = moments_from_state(&rho).unwrap();
        let ex = |op: &CMatrix| rho.expectation(op).unwrap();
        let sq = |op: CollectiveOp| {
            let o = collective_operator(size, op);
            &o * &o
        };
        let j2 = ex(&(sq(CollectiveOp::Jx) + sq(CollectiveOp::Jy) + sq(CollectiveOp::Jz)));
        assert!(close(Complex64::from(m.j2), j2, 1e-13));
        assert!(close(Complex64::from(m.jz), ex(&jz), 1e-13));
        assert!(close(Complex64::from(m.jz2), ex(&(&jz * &jz)), 1e-13));
        assert!(close(m.jp, ex(&jp), 1e-13));
        assert!(close(m.jp2, ex(&(&jp * &jp)), 1e-13));
        assert!(close(m.jp_jz, ex(&(&jp * (&jz * Complex64::from(2.0) + id))), 1e-13));
    }

    #[test]
    fn initial_transverse_moment() {
        let p = css(9, 0.8, 1.9);
        let m = moments_analytic(&p, &evo(0.0, 0.0));
        let want = Complex64::from_polar(4.5 * 0.8f64.sin(), 1.9);
        assert!(close(m.jp, want, 1e-15));
    }

    #[test]
    fn equatorial_transverse_moment() {
        let p = css(11, FRAC_PI_2, 0.6);
        let e = evo(0.37, 0.0);
        let m = moments_analytic(&p, &e);
        let want = Complex64::from_polar(5.5 * 0.37f64.cos().powi(10), 0.6);
        assert!(close(m.jp, want, 1e-14));
    }

    #[test]
    fn analytic_matches_brute_force_with_dephasing() {
        let p = css(12, FRAC_PI_3, 0.4);
        let e = evo(0.2, 0.05);
        let a = moments_analytic(&p, &e);
        let b = brute(&p, &e);
        for (x, y) in a.as_array().iter().zip(b.as_array()) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(y.abs()).max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn attenuation_follows_delta_m_squared() {
        for n in [2usize, 5, 13, 20] {
            let p = css(n, 1.05, 2.0);
            let (tau, gamma) = (0.61, 0.3);
            let pure = moments_analytic(&p, &evo(tau, 0.0));
            let b = brute(&p, &evo(tau, gamma));
            let d1 = (-gamma * tau).exp();
            let d2 = (-4.0 * gamma * tau).exp();
            assert!(close(b.jp, pure.jp * d1, 1e-10));
            assert!(close(b.jp_jz, pure.jp_jz * d1, 1e-10));
            assert!(close(b.jp2, pure.jp2 * d2, 1e-10));
            assert!((b.jz - pure.jz).abs() < 1e-10);
            assert!((b.jz2 - pure.jz2).abs() < 1e-10);
            assert!((b.j2 - pure.j2).abs() < 1e-10);
        }
    }

    #[test]
    fn single_spin_has_no_pair_moments() {
        let p = css(1, 1.0, 0.0);
        let m = moments_analytic(&p, &evo(0.5, 0.1));
        assert_eq!(m.jp2, Complex64::from(0.0));
        let b = brute(&p, &evo(0.5, 0.1));
        assert!(b.jp2.norm() < 1e-15 && b.jp_jz.norm() < 1e-15);
        assert!(close(m.jp, b.jp, 1e-14));
    }

    #[test]
    fn polar_at_start() {
        let p = css(6, 0.9, 0.3);
        let pd = polar_decompose(&moments_analytic(&p, &evo(0.0, 0.0)));
        assert!((pd.r - 3.0 * 0.9f64.sin()).abs() < 1e-14);
        assert!((pd.phi - 0.3).abs() < 1e-14);
        assert!(!pd.degenerate);
    }

    #[test]
    fn polar_degenerate_at_half_period() {
        // theta0 = pi/2, mu = pi: cos^{2j-1}(pi/2) = 0
        for n in [2usize, 3, 8] {
            let p = css(n, FRAC_PI_2, 0.0);
            let pd = polar_decompose(&moments_analytic(&p, &evo(FRAC_PI_2, 0.0)));
            assert!(pd.degenerate, "n = {n}, r = {}", pd.r);
            assert_eq!(pd.phi, 0.0);
        }
    }

    #[test]
    fn closed_form_r_and_phi_match_a1() {
        let p = css(20, 1.1, 0.25);
        let e = evo(0.35, 0.0);
        let pd = polar_decompose(&moments_analytic(&p, &e));
        assert!((pd.r - transverse_length(&p, &e)).abs() < 1e-12);
        let phi = mean_spin_azimuth(&p, &e);
        let wrapped = (phi - pd.phi).rem_euclid(TAU);
        assert!(wrapped.min(TAU - wrapped) < 1e-12, "phi {phi} vs {}", pd.phi);
    }

    #[test]
    fn dephased_r_carries_damping() {
        let p = css(10, 1.3, 0.0);
        let e = evo(0.4, 0.2);
        let pd = polar_decompose(&moments_analytic(&p, &e));
        assert!((pd.r - transverse_length(&p, &e)).abs() < 1e-12);
    }

    #[test]
    fn azimuth_is_continuous_across_tan_poles() {
        // fine grid: the step bound is (2j - 1) max|d/dtau arctan(c tan tau)| dtau
        for (n, theta) in [(10usize, 1.0), (1000, 1.0), (1000, 2.4), (31, FRAC_PI_3)] {
            let p = css(n, theta, 0.0);
            let c: f64 = theta.cos();
            let dtau = if n > 100 { 1e-5 } else { 1e-2 };
            let bound = (n as f64 - 1.0) * dtau * c.abs().max(1.0 / c.abs()) * 1.01 + 1e-9;
            let steps = (3.0 * PI / dtau) as usize;
            let mut prev = mean_spin_azimuth(&p, &evo(0.0, 0.0));
            for k in 1..=steps {
                let cur = mean_spin_azimuth(&p, &evo(k as f64 * dtau, 0.0));
                let jump = (cur - prev).abs();
                assert!(jump < bound, "n = {n} jump {jump} at step {k}");
                assert!(jump < PI, "n = {n} jump {jump} at step {k}");
                prev = cur;
            }
        }
    }

    #[test]
    fn azimuth_agrees_with_principal_argument_mod_two_pi() {
        let p = css(15, 0.7, 0.9);
        for k in 0..200 {
            let e = evo(k as f64 * 0.031, 0.0);
            let pd = polar_decompose(&moments_analytic(&p, &e));
            if pd.degenerate {
                continue;
            }
            let w = (mean_spin_azimuth(&p, &e) - pd.phi).rem_euclid(TAU);
            assert!(w.min(TAU - w) < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn z_moments_are_time_and_dephasing_independent() {
        let p = css(14, 0.66, 1.0);
        let a = moments_analytic(&p, &evo(0.0, 0.0));
        for (tau, gamma) in [(0.3, 0.0), (1.7, 0.2), (2.9, 1.0)] {
            let b = brute(&p, &evo(tau, gamma));
            assert!((a.jz - b.jz).abs() < 1e-11);
            assert!((a.jz2 - b.jz2).abs() < 1e-10);
            assert!((a.j2 - b.j2).abs() < 1e-10);
        }
    }
}
