//! Configurations, the excitation basis, state vectors and the generators of
//! the single-excitation dynamics.
//!
//! Basis ordering is fixed everywhere: index `0` is `φ0` (all qubits ground,
//! empty cavity), indices `1..=M` are `φj` (qubit `j` excited), and index
//! `M+1` is `φ_{M+1}` (one photon). Generators only cover indices `1..=M+1`;
//! `φ0` is stationary under both of them and is spliced back by the
//! evolution routines.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{norm_sqr, CMatrix, C64, I, ZERO};
use crate::{Error, Result};

/// Physical parameters of the qubits-plus-cavity machine.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemConfig {
    couplings: Vec<f64>,
    gamma_decay: f64,
    kappa: f64,
}

impl SystemConfig {
    /// Lossless machine with the given qubit-cavity couplings `γ_j`.
    pub fn new(couplings: Vec<f64>) -> Result<Self> {
        Self::with_decay(couplings, 0.0, 0.0)
    }

    pub fn with_decay(couplings: Vec<f64>, gamma_decay: f64, kappa: f64) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::TooFewQubits { min: 1, got: 0 });
        }
        for (idx, &g) in couplings.iter().enumerate() {
            if !(g.is_finite() && g > 0.0) {
                return Err(Error::InvalidCoupling {
                    index: idx + 1,
                    value: g,
                });
            }
        }
        for (name, value) in [("gamma_decay", gamma_decay), ("kappa", kappa)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidDecayRate { name, value });
            }
        }
        Ok(Self {
            couplings,
            gamma_decay,
            kappa,
        })
    }

    /// Star profile: `γ1 = r`, `γj = 1` for `j > 1`.
    pub fn star(m: usize, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidRatio(r));
        }
        if m == 0 {
            return Err(Error::TooFewQubits { min: 1, got: 0 });
        }
        let mut couplings = vec![1.0; m];
        couplings[0] = r;
        Self::new(couplings)
    }

    /// Same couplings with qubit decay `Γ` and cavity decay `κ`.
    pub fn decaying(self, gamma_decay: f64, kappa: f64) -> Result<Self> {
        Self::with_decay(self.couplings, gamma_decay, kappa)
    }

    pub fn m(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn gamma_decay(&self) -> f64 {
        self.gamma_decay
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn basis(&self) -> ExcitationBasis {
        ExcitationBasis { m: self.m() }
    }

    /// `(γ1, γ)` when all partner couplings `γ2..γM` are equal. For a single
    /// qubit the partner coupling is taken equal to `γ1`.
    pub fn star_couplings(&self) -> Option<(f64, f64)> {
        let g1 = self.couplings[0];
        match self.couplings.get(1) {
            None => Some((g1, g1)),
            Some(&g) if self.couplings[1..].iter().all(|&x| x == g) => Some((g1, g)),
            Some(_) => None,
        }
    }
}

/// Collective Rabi frequency `ω = sqrt(Σ γj²)`.
pub fn collective_rabi(config: &SystemConfig) -> f64 {
    libm::sqrt(config.couplings.iter().map(|g| g * g).sum())
}

/// Labels of the `M+2` basis states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisState {
    /// `φ0`: all qubits in `|0⟩`, no photon.
    Vacuum,
    /// `φj`: qubit `j` (1-based) excited, no photon.
    Qubit(usize),
    /// `φ_{M+1}`: all qubits in `|0⟩`, one photon.
    Photon,
}

/// The ordered zero/one-excitation basis for `M` qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExcitationBasis {
    m: usize,
}

impl ExcitationBasis {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m + 2
    }

    pub fn index_of(&self, state: BasisState) -> usize {
        match state {
            BasisState::Vacuum => 0,
            BasisState::Qubit(j) => {
                assert!(
                    (1..=self.m).contains(&j),
                    "qubit {j} outside 1..={}",
                    self.m
                );
                j
            }
            BasisState::Photon => self.m + 1,
        }
    }

    pub fn label(&self, index: usize) -> BasisState {
        match index {
            0 => BasisState::Vacuum,
            i if i <= self.m => BasisState::Qubit(i),
            i if i == self.m + 1 => BasisState::Photon,
            i => panic!("basis index {i} outside 0..{}", self.dim()),
        }
    }

    pub fn photon_index(&self) -> usize {
        self.m + 1
    }
}

/// Amplitudes over `{φ0, φ1 … φM, φ_{M+1}}`.
///
/// Conditional (no-click) states are sub-normalized and carry
/// `normalized == false`; their squared norm is the no-click probability.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    normalized: bool,
}

impl StateVector {
    /// Wraps amplitudes of a normalized state. Panics if the norm is off by
    /// more than `1e-12` or there are fewer than three amplitudes.
    pub fn normalized(amplitudes: Vec<C64>) -> Self {
        assert!(
            amplitudes.len() >= 3,
            "a state needs at least M+2 = 3 amplitudes"
        );
        let n = norm_sqr(&amplitudes);
        assert!((n - 1.0).abs() <= 1e-12, "state norm² {n} is not 1");
        Self {
            amplitudes,
            normalized: true,
        }
    }

    /// Wraps amplitudes of a conditional state (norm² at most 1).
    pub fn conditional(amplitudes: Vec<C64>) -> Self {
        assert!(
            amplitudes.len() >= 3,
            "a state needs at least M+2 = 3 amplitudes"
        );
        let n = norm_sqr(&amplitudes);
        assert!(n <= 1.0 + 1e-12, "conditional state norm² {n} exceeds 1");
        Self {
            amplitudes,
            normalized: false,
        }
    }

    pub(crate) fn from_parts(amplitudes: Vec<C64>, normalized: bool) -> Self {
        Self {
            amplitudes,
            normalized,
        }
    }

    pub fn m(&self) -> usize {
        self.amplitudes.len() - 2
    }

    pub fn basis(&self) -> ExcitationBasis {
        ExcitationBasis::new(self.m())
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, state: BasisState) -> C64 {
        self.amplitudes[self.basis().index_of(state)]
    }

    /// Amplitudes on the single-excitation block (indices `1..=M+1`).
    pub fn excited_block(&self) -> &[C64] {
        &self.amplitudes[1..]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Rescaled copy with unit norm.
    pub fn renormalized(&self) -> Result<Self> {
        let n = libm::sqrt(self.norm_sqr());
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|c| c / n).collect(),
            normalized: true,
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                got: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_dim(&self, m: usize) -> Result<()> {
        if self.amplitudes.len() != m + 2 {
            return Err(Error::DimensionMismatch {
                expected: m + 2,
                got: self.amplitudes.len(),
            });
        }
        Ok(())
    }
}

/// Input qubit 1 in `sin(θ/2)|0⟩ + e^{iα}cos(θ/2)|1⟩`, everything else in
/// its ground state.
pub fn initial_state(theta: f64, alpha: f64, config: &SystemConfig) -> StateVector {
    let mut amplitudes = vec![ZERO; config.m() + 2];
    amplitudes[0] = C64::new(libm::sin(theta / 2.0), 0.0);
    amplitudes[1] = C64::from_polar(libm::cos(theta / 2.0), alpha);
    StateVector {
        amplitudes,
        normalized: true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    Hermitian,
    Dissipative,
}

/// Generator of the dynamics on the single-excitation block, indices
/// `1..=M+1` of the basis (so matrix row `k` is basis index `k+1`).
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorMatrix {
    matrix: CMatrix,
    kind: GeneratorKind,
}

impl GeneratorMatrix {
    /// Accepts an arbitrary Hermitian block (defect at most `1e-14`).
    pub fn hermitian(matrix: CMatrix) -> Result<Self> {
        let defect = matrix.hermitian_defect();
        if defect > 1e-14 {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self {
            matrix,
            kind: GeneratorKind::Hermitian,
        })
    }

    /// Accepts an arbitrary block as a non-Hermitian generator.
    pub fn dissipative(matrix: CMatrix) -> Self {
        Self {
            matrix,
            kind: GeneratorKind::Dissipative,
        }
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `(G - G†) / 2`.
    pub fn anti_hermitian_part(&self) -> CMatrix {
        let adj = self.matrix.adjoint();
        CMatrix::from_fn(self.dim(), |i, j| (self.matrix[(i, j)] - adj[(i, j)]) / 2.0)
    }
}

/// Interaction Hamiltonian restricted to the one-excitation block: the only
/// non-zero entries couple qubit `j` to the photon with strength `γj`.
pub fn build_hamiltonian(config: &SystemConfig) -> GeneratorMatrix {
    let m = config.m();
    let mut h = CMatrix::zeros(m + 1);
    for (j, &g) in config.couplings().iter().enumerate() {
        h[(j, m)] = C64::new(g, 0.0);
        h[(m, j)] = C64::new(g, 0.0);
    }
    GeneratorMatrix {
        matrix: h,
        kind: GeneratorKind::Hermitian,
    }
}

/// `H - iΓ Σ σ⁺σ⁻ - iκ a†a` on the one-excitation block.
pub fn build_dissipative_hamiltonian(config: &SystemConfig) -> GeneratorMatrix {
    let m = config.m();
    let mut h = build_hamiltonian(config).matrix;
    for j in 0..m {
        h[(j, j)] -= I * config.gamma_decay();
    }
    h[(m, m)] -= I * config.kappa();
    GeneratorMatrix {
        matrix: h,
        kind: GeneratorKind::Dissipative,
    }
}
