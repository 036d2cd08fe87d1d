//! Time evolution on the single-excitation block.
//!
//! [`closed_form_propagator`] is the analytic `exp(-iHt)`. Two numerical
//! routes are kept alongside it as oracles: [`evolve_oracle_expm`]
//! diagonalizes the Hermitian generator, and [`evolve_oracle_rk4`]
//! integrates the Schrödinger equation directly, which also covers the
//! non-Hermitian no-click generator.
//!
//! Every qubit-qubit entry of the closed form is `δjk - 2γjγkβ`. A `+` sign
//! on any single off-diagonal entry breaks unitarity; the oracle suites
//! detect it.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::linalg::{CMatrix, C64, I};
use crate::model::{collective_rabi, GeneratorKind, GeneratorMatrix, StateVector, SystemConfig};
use crate::{Error, Result};

/// `U(t)` on basis indices `1..=M+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorMatrix {
    matrix: CMatrix,
    t: f64,
}

impl PropagatorMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Entry for basis indices `row`, `col` in `1..=M+1`.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row - 1, col - 1)]
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IntegrationMethod {
    /// Classical fourth-order Runge–Kutta with a fixed step.
    #[default]
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorSettings {
    pub dt: f64,
    pub method: IntegrationMethod,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            method: IntegrationMethod::Rk4,
        }
    }
}

impl IntegratorSettings {
    pub fn with_step(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }
}

/// Analytic propagator. With `β = sin²(ωt/2)/ω²`:
///
/// * `U[j][k] = δjk - 2γjγkβ` for qubits `j, k`,
/// * `U[j][M+1] = U[M+1][j] = -iγj sin(ωt)/ω`,
/// * `U[M+1][M+1] = cos(ωt)`.
pub fn closed_form_propagator(config: &SystemConfig, t: f64) -> PropagatorMatrix {
    let m = config.m();
    let g = config.couplings();
    let omega = collective_rabi(config);
    let half = libm::sin(omega * t / 2.0);
    let beta = half * half / (omega * omega);
    let exchange = -I * (libm::sin(omega * t) / omega);

    let matrix = CMatrix::from_fn(m + 1, |i, j| match (i < m, j < m) {
        (true, true) => {
            let delta = if i == j { 1.0 } else { 0.0 };
            C64::new(delta - 2.0 * g[i] * g[j] * beta, 0.0)
        }
        (true, false) => exchange * g[i],
        (false, true) => exchange * g[j],
        (false, false) => C64::new(libm::cos(omega * t), 0.0),
    });
    PropagatorMatrix { matrix, t }
}

/// Applies `U(t)` to the single-excitation block; `φ0` is carried through
/// unchanged.
pub fn evolve(state: &StateVector, config: &SystemConfig, t: f64) -> Result<StateVector> {
    if !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    state.check_dim(config.m())?;
    let u = closed_form_propagator(config, t);
    Ok(splice(state, u.matrix.apply(state.excited_block())))
}

/// Shortest positive time `mπ/ω` (with `m` odd) at which the cavity returns
/// to the vacuum.
pub fn trapping_time(config: &SystemConfig, m_odd: u32) -> Result<f64> {
    if m_odd.is_multiple_of(2) {
        return Err(Error::InvalidTrappingOrder(m_odd));
    }
    Ok(f64::from(m_odd) * PI / collective_rabi(config))
}

/// `exp(-iHt)` by Hermitian eigendecomposition, `V diag(e^{-iλt}) V†`.
pub fn expm_propagator(generator: &GeneratorMatrix, t: f64) -> Result<CMatrix> {
    if generator.kind() != GeneratorKind::Hermitian {
        return Err(Error::NotHermitian(generator.matrix().hermitian_defect()));
    }
    if !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let n = generator.dim();
    let h = DMatrix::from_fn(n, n, |i, j| generator.matrix()[(i, j)]);
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, 10_000).ok_or(Error::EigenFailure)?;
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&l| C64::from_polar(1.0, -l * t))
        .collect();
    let v = &eig.eigenvectors;
    Ok(CMatrix::from_fn(n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * phases[k] * v[(j, k)].conj())
            .sum()
    }))
}

/// Evolves `state` with `exp(-iHt)` built from the eigendecomposition of a
/// Hermitian generator.
pub fn evolve_oracle_expm(
    generator: &GeneratorMatrix,
    state: &StateVector,
    t: f64,
) -> Result<StateVector> {
    state.check_dim(generator.dim() - 1)?;
    let u = expm_propagator(generator, t)?;
    Ok(splice(state, u.apply(state.excited_block())))
}

/// Integrates `dψ/dt = -iGψ` from `0` to `t` with fixed-step RK4.
///
/// The step is shrunk to `t / ceil(t / dt)` so the last step lands on `t`.
/// No renormalization is applied: under a dissipative generator the norm
/// decays as it should. The output keeps the `normalized` flag only for
/// Hermitian generators.
pub fn evolve_oracle_rk4(
    generator: &GeneratorMatrix,
    state: &StateVector,
    t: f64,
    settings: IntegratorSettings,
) -> Result<StateVector> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidTime(t));
    }
    if !(settings.dt.is_finite() && settings.dt > 0.0) {
        return Err(Error::InvalidStep(settings.dt));
    }
    state.check_dim(generator.dim() - 1)?;

    let mut psi = state.excited_block().to_vec();
    if t > 0.0 {
        let steps = libm::ceil(t / settings.dt).max(1.0) as usize;
        let h = t / steps as f64;
        let rhs = Rhs::new(generator.matrix());
        let n = psi.len();
        let zeros = alloc::vec![C64::default(); n];
        let (mut k1, mut k2, mut k3, mut k4) =
            (zeros.clone(), zeros.clone(), zeros.clone(), zeros.clone());
        let mut tmp = zeros;
        for _ in 0..steps {
            rhs.eval(&psi, &mut k1);
            axpy_into(&psi, h / 2.0, &k1, &mut tmp);
            rhs.eval(&tmp, &mut k2);
            axpy_into(&psi, h / 2.0, &k2, &mut tmp);
            rhs.eval(&tmp, &mut k3);
            axpy_into(&psi, h, &k3, &mut tmp);
            rhs.eval(&tmp, &mut k4);
            for i in 0..n {
                psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        if !psi.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
    }

    let normalized = state.is_normalized() && generator.kind() == GeneratorKind::Hermitian;
    let mut amplitudes = Vec::with_capacity(psi.len() + 1);
    amplitudes.push(state.amplitudes()[0]);
    amplitudes.extend(psi);
    Ok(StateVector::from_parts(amplitudes, normalized))
}

/// `-iG` stored as a list of non-zero entries; generators here are arrow
/// shaped, so this is far cheaper than a dense product.
struct Rhs {
    entries: Vec<(usize, usize, C64)>,
}

impl Rhs {
    fn new(g: &CMatrix) -> Self {
        let entries = g
            .nonzeros()
            .into_iter()
            .map(|(i, j, v)| (i, j, -I * v))
            .collect();
        Self { entries }
    }

    fn eval(&self, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::default());
        for &(i, j, v) in &self.entries {
            out[i] += v * psi[j];
        }
    }
}

fn axpy_into(x: &[C64], a: f64, y: &[C64], out: &mut [C64]) {
    for ((o, xi), yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + yi * a;
    }
}

fn splice(state: &StateVector, block: Vec<C64>) -> StateVector {
    let mut amplitudes = Vec::with_capacity(block.len() + 1);
    amplitudes.push(state.amplitudes()[0]);
    amplitudes.extend(block);
    StateVector::from_parts(amplitudes, state.is_normalized())
}
