//! Symmetric N-spin states in the Dicke basis `|j, m>` with `j = N/2`.
//!
//! Every vector and matrix in this crate uses descending-m indexing:
//! index `k` holds `m = j - k`, so `Jz` is `diag(j, j-1, ..., -j)`.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{is_hermitian, trace_of_product, CMatrix, CVector};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;

/// Binomial coefficients switch from exact integers to log-gamma at this N.
const LOG_SPACE_THRESHOLD: usize = 60;

/// Number of spin-1/2 particles; fixes the symmetric sector `j = N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinSize {
    n_particles: usize,
}

impl SpinSize {
    pub fn new(n_particles: usize) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidConfig("particle number must be at least 1".into()));
        }
        Ok(Self { n_particles })
    }

    pub fn n(&self) -> usize {
        self.n_particles
    }

    pub fn n_f64(&self) -> f64 {
        self.n_particles as f64
    }

    pub fn j(&self) -> f64 {
        self.n_particles as f64 / 2.0
    }

    /// Dimension of the symmetric subspace, `N + 1`.
    pub fn dim(&self) -> usize {
        self.n_particles + 1
    }

    /// Magnetic quantum number stored at index `k`.
    pub fn m_at(&self, k: usize) -> f64 {
        self.j() - k as f64
    }

    /// `j(j+1)`, the value of `J^2` on the whole symmetric subspace.
    pub fn casimir(&self) -> f64 {
        let j = self.j();
        j * (j + 1.0)
    }
}

/// Initial coherent spin state direction `(theta0, phi0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CssParams {
    pub theta0: f64,
    pub phi0: f64,
    pub size: SpinSize,
}

impl CssParams {
    pub fn new(size: SpinSize, theta0: f64, phi0: f64) -> Result<Self> {
        if !theta0.is_finite() || !phi0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "CSS angles must be finite (theta0 = {theta0}, phi0 = {phi0})"
            )));
        }
        Ok(Self { theta0, phi0, size })
    }
}

/// Unit vector `n` selecting the generator `J_n = n . J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinDirection([f64; 3]);

impl SpinDirection {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormViolation { norm });
        }
        Ok(Self([x, y, z]))
    }

    /// Normalizes `v`; fails only for the zero (or non-finite) vector.
    pub fn normalized(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NormViolation { norm });
        }
        let u = v / norm;
        Ok(Self([u.x, u.y, u.z]))
    }

    /// Direction with polar angle `theta` and azimuth `phi`.
    pub fn spherical(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub const fn x_axis() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub const fn y_axis() -> Self {
        Self([0.0, 1.0, 0.0])
    }

    pub const fn z_axis() -> Self {
        Self([0.0, 0.0, 1.0])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn dot(&self, other: &SpinDirection) -> f64 {
        self.as_vector().dot(&other.as_vector())
    }
}

/// Pure symmetric state: `N + 1` amplitudes, descending in m.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeVector {
    size: SpinSize,
    amplitudes: CVector,
}

impl DickeVector {
    pub fn new(size: SpinSize, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != size.dim() {
            return Err(Error::ShapeViolation {
                expected: size.dim(),
                rows: amplitudes.len(),
                cols: 1,
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { size, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalize(size: SpinSize, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(size, amplitudes.unscale(norm))
    }

    pub(crate) fn from_parts_unchecked(size: SpinSize, amplitudes: CVector) -> Self {
        Self { size, amplitudes }
    }

    pub fn size(&self) -> SpinSize {
        self.size
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// The projector `|psi><psi|`.
    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { size: self.size, entries: m }
    }
}

/// Mixed symmetric state. Hermiticity and unit trace are checked once, at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    size: SpinSize,
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(size: SpinSize, entries: CMatrix) -> Result<Self> {
        check_shape(size, &entries)?;
        if !is_hermitian(&entries, HERMITIAN_TOL) {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        Ok(Self { size, entries })
    }

    pub(crate) fn from_parts_unchecked(size: SpinSize, entries: CMatrix) -> Self {
        Self { size, entries }
    }

    pub fn maximally_mixed(size: SpinSize) -> Self {
        let d = size.dim();
        let entries = CMatrix::identity(d, d).unscale(d as f64);
        Self { size, entries }
    }

    pub fn size(&self) -> SpinSize {
        self.size
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn purity(&self) -> f64 {
        trace_of_product(&self.entries, &self.entries).re
    }
}

impl From<&DickeVector> for DensityMatrix {
    fn from(psi: &DickeVector) -> Self {
        psi.to_density()
    }
}

/// Coherent spin state with every spin along `(theta0, phi0)`:
/// `c_m = sqrt(C(2j, j-m)) sin(theta0/2)^(j-m) cos(theta0/2)^(j+m) e^{i(j-m)phi0}`.
pub fn build_css(params: &CssParams) -> DickeVector {
    let size = params.size;
    let n = size.n();
    let (s, c) = (params.theta0 / 2.0).sin_cos();
    let mut amps = CVector::zeros(size.dim());

    if n < LOG_SPACE_THRESHOLD {
        for k in 0..=n {
            let modulus = (binomial_exact(n, k) as f64).sqrt() * s.powi(k as i32) * c.powi((n - k) as i32);
            amps[k] = Complex64::from_polar(modulus, k as f64 * params.phi0);
        }
        return DickeVector::from_parts_unchecked(size, amps);
    }

    let (ln_s, ln_c) = (s.abs().ln(), c.abs().ln());
    let ln_n_fact = ln_gamma(n as f64 + 1.0);
    for k in 0..=n {
        let ln_binom = ln_n_fact - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
        // 0 * ln(0) must contribute nothing, not NaN
        let mut ln_mod = 0.5 * ln_binom;
        if k > 0 {
            ln_mod += k as f64 * ln_s;
        }
        if n - k > 0 {
            ln_mod += (n - k) as f64 * ln_c;
        }
        let sign = sign_pow(s, k) * sign_pow(c, n - k);
        amps[k] = Complex64::from_polar(sign * ln_mod.exp(), k as f64 * params.phi0);
    }
    // log-space rounding leaves the norm off by ~N eps
    let norm = amps.norm();
    DickeVector::from_parts_unchecked(size, amps.unscale(norm))
}

fn sign_pow(x: f64, k: usize) -> f64 {
    if x < 0.0 && k % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn binomial_exact(n: usize, k: usize) -> u64 {
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u64 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The collective operators available in matrix form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectiveOp {
    Jx,
    Jy,
    Jz,
    JPlus,
    JMinus,
}

/// Matrix of a collective operator in the descending-m Dicke basis.
pub fn collective_operator(size: SpinSize, which: CollectiveOp) -> CMatrix {
    match which {
        CollectiveOp::Jz => {
            let diag = CVector::from_fn(size.dim(), |k, _| Complex64::from(size.m_at(k)));
            CMatrix::from_diagonal(&diag)
        }
        CollectiveOp::JPlus => raising(size),
        CollectiveOp::JMinus => raising(size).adjoint(),
        CollectiveOp::Jx => {
            let jp = raising(size);
            (&jp + jp.adjoint()).unscale(2.0)
        }
        CollectiveOp::Jy => {
            let jp = raising(size);
            (&jp - jp.adjoint()) * Complex64::new(0.0, -0.5)
        }
    }
}

/// `<j, m+1| J+ |j, m> = sqrt(j(j+1) - m(m+1))`; with descending indexing
/// the entry sits at `(k - 1, k)`.
fn raising(size: SpinSize) -> CMatrix {
    let d = size.dim();
    let a = raising_coefficients(size);
    let mut jp = CMatrix::zeros(d, d);
    for k in 1..d {
        jp[(k - 1, k)] = Complex64::from(a[k]);
    }
    jp
}

/// `J_n = n_x Jx + n_y Jy + n_z Jz`.
pub fn direction_operator(size: SpinSize, n: &SpinDirection) -> CMatrix {
    let [x, y, z] = n.components();
    let jp = raising(size);
    let jm = jp.adjoint();
    // J_n = (x - iy)/2 J+ + (x + iy)/2 J- + z Jz
    let a = Complex64::new(x, -y) * 0.5;
    let mut out = jp * a + jm * a.conj();
    for k in 0..size.dim() {
        out[(k, k)] += Complex64::from(z * size.m_at(k));
    }
    out
}

/// `raising(size)[(k - 1, k)]`, indexed by `k`; entry 0 is unused.
fn raising_coefficients(size: SpinSize) -> Vec<f64> {
    let casimir = size.casimir();
    (0..size.dim())
        .map(|k| {
            let m = size.m_at(k);
            if k == 0 {
                0.0
            } else {
                (casimir - m * (m + 1.0)).sqrt()
            }
        })
        .collect()
}

/// `J_n * m` for a `dim x dim` matrix `m`, using the tridiagonal structure of
/// `J_n` instead of a dense product.
pub fn apply_direction(size: SpinSize, n: &SpinDirection, m: &CMatrix) -> CMatrix {
    let [x, y, z] = n.components();
    apply_combination(size, Complex64::new(x, -y) * 0.5, Complex64::new(x, y) * 0.5, z, m)
}

/// `op * m` with the same structure-aware product as [`apply_direction`].
pub fn apply_collective(size: SpinSize, which: CollectiveOp, m: &CMatrix) -> CMatrix {
    let (zero, half, i_half) = (Complex64::from(0.0), Complex64::from(0.5), Complex64::new(0.0, 0.5));
    match which {
        CollectiveOp::Jz => apply_combination(size, zero, zero, 1.0, m),
        CollectiveOp::JPlus => apply_combination(size, Complex64::from(1.0), zero, 0.0, m),
        CollectiveOp::JMinus => apply_combination(size, zero, Complex64::from(1.0), 0.0, m),
        CollectiveOp::Jx => apply_combination(size, half, half, 0.0, m),
        CollectiveOp::Jy => apply_combination(size, -i_half, i_half, 0.0, m),
    }
}

/// `(up J+ + down J- + z Jz) * m`.
fn apply_combination(size: SpinSize, up: Complex64, down: Complex64, z: f64, m: &CMatrix) -> CMatrix {
    let d = size.dim();
    assert_eq!(m.nrows(), d, "row count must match the Dicke dimension");
    let a = raising_coefficients(size);
    let mut out = CMatrix::zeros(d, m.ncols());
    for col in 0..m.ncols() {
        for r in 0..d {
            let mut v = m[(r, col)] * (z * size.m_at(r));
            if r + 1 < d {
                v += m[(r + 1, col)] * (up * a[r + 1]);
            }
            if r > 0 {
                v += m[(r - 1, col)] * (down * a[r]);
            }
            out[(r, col)] = v;
        }
    }
    out
}

/// Checked variant of [`direction_operator`] for raw components.
pub fn direction_operator_from(size: SpinSize, n: [f64; 3]) -> Result<CMatrix> {
    let dir = SpinDirection::new(n[0], n[1], n[2])?;
    Ok(direction_operator(size, &dir))
}

fn check_shape(size: SpinSize, op: &CMatrix) -> Result<()> {
    let d = size.dim();
    if op.nrows() != d || op.ncols() != d {
        return Err(Error::ShapeViolation {
            expected: d,
            rows: op.nrows(),
            cols: op.ncols(),
        });
    }
    Ok(())
}

/// `<psi|A|psi>` for pure states, `Tr(rho A)` for mixed ones.
pub trait Expectation {
    fn expectation(&self, op: &CMatrix) -> Result<Complex64>;
}

impl Expectation for DickeVector {
    fn expectation(&self, op: &CMatrix) -> Result<Complex64> {
        check_shape(self.size, op)?;
        let a = op * &self.amplitudes;
        Ok(self.amplitudes.dotc(&a))
    }
}

impl Expectation for DensityMatrix {
    fn expectation(&self, op: &CMatrix) -> Result<Complex64> {
        check_shape(self.size, op)?;
        Ok(trace_of_product(&self.entries, op))
    }
}
