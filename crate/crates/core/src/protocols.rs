//! The two machine operations run at the vacuum-trapping time: one-step
//! W-state generation (input qubit fully excited) and phase-covariant
//! anti-cloning (input qubit on the Bloch equator).
//!
//! All protocols use the star profile `γ1 = rγ`, `γj = γ = 1` for `j > 1`.
//! At `τ*` the cavity is back in the vacuum and the qubits hold
//!
//! ```text
//! a1 = (M-1-r²)/(M-1+r²) on qubit 1,    a = -2r/(M-1+r²) on every partner.
//! ```

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::C64;
use crate::model::{initial_state, BasisState, StateVector, SystemConfig};
use crate::propagator::{closed_form_propagator, evolve, trapping_time};
use crate::{Error, Result};

/// Magnitude tolerance used to classify trapped states.
pub const CLASSIFY_TOL: f64 = 1e-10;

/// How the input qubit's coupling relates to the common partner coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingScheme {
    /// `r = 1`.
    Identical,
    /// `r = √M + 1`: symmetric W state.
    WPlus,
    /// `r = √M - 1`: antisymmetric W state.
    WMinus,
    /// `r = √(M-1)`: qubit 1 ends in `|0⟩`, W state on the other `M-1`.
    WPrime,
    Custom(f64),
}

impl CouplingScheme {
    pub const NAMED: [CouplingScheme; 4] =
        [Self::Identical, Self::WPlus, Self::WMinus, Self::WPrime];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Identical => "identical",
            Self::WPlus => "w_plus",
            Self::WMinus => "w_minus",
            Self::WPrime => "w_prime",
            Self::Custom(_) => "custom",
        }
    }

    /// Coupling ratio `r = γ1/γ` for `m` qubits.
    pub fn ratio(&self, m: usize) -> Result<f64> {
        let sm = libm::sqrt(m as f64);
        let r = match *self {
            Self::Identical => 1.0,
            Self::WPlus => sm + 1.0,
            Self::WMinus | Self::WPrime if m < 2 => {
                return Err(Error::UnsupportedScheme {
                    scheme: self.label(),
                    m,
                })
            }
            Self::WMinus => sm - 1.0,
            Self::WPrime => libm::sqrt(m as f64 - 1.0),
            Self::Custom(r) => r,
        };
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidRatio(r));
        }
        Ok(r)
    }

    pub fn config(&self, m: usize) -> Result<SystemConfig> {
        SystemConfig::star(m, self.ratio(m)?)
    }
}

/// Shape of the trapped qubit state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateClass {
    /// All `M` amplitudes equal in magnitude, `a1 = +a`.
    SymmetricW,
    /// All `M` amplitudes equal in magnitude, `a1 = -a`.
    AntisymmetricW,
    /// Qubit 1 empty, the other `M-1` equal in magnitude.
    SeparableW,
    Generic,
}

impl StateClass {
    pub fn label(&self) -> &'static str {
        match self {
            Self::SymmetricW => "symmetric_W",
            Self::AntisymmetricW => "antisymmetric_W",
            Self::SeparableW => "separable_W",
            Self::Generic => "generic",
        }
    }
}

/// Classifies the qubit amplitudes `c1 … cM` of a single-excitation state.
pub fn classify(qubits: &[C64]) -> StateClass {
    if qubits.len() < 2 {
        return StateClass::Generic;
    }
    let partners = &qubits[1..];
    let mag = partners[0].norm();
    if partners
        .iter()
        .any(|c| (c.norm() - mag).abs() > CLASSIFY_TOL)
    {
        return StateClass::Generic;
    }
    let c1 = qubits[0];
    if c1.norm() < CLASSIFY_TOL {
        return StateClass::SeparableW;
    }
    if (c1.norm() - mag).abs() > CLASSIFY_TOL {
        return StateClass::Generic;
    }
    // global phase drops out of the relative sign
    if (c1 * partners[0].conj()).re > 0.0 {
        StateClass::SymmetricW
    } else {
        StateClass::AntisymmetricW
    }
}

/// Single-qubit reduced density matrix in the `{|0⟩, |1⟩}` basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitDensity {
    rho: [[C64; 2]; 2],
}

impl QubitDensity {
    pub fn from_matrix(rho: [[C64; 2]; 2]) -> Self {
        Self { rho }
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho[0][0] + self.rho[1][1]
    }

    pub fn hermitian_defect(&self) -> f64 {
        let off = (self.rho[0][1] - self.rho[1][0].conj()).norm();
        off.max(self.rho[0][0].im.abs())
            .max(self.rho[1][1].im.abs())
    }

    /// Smaller eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.rho[0][0].re;
        let d = self.rho[1][1].re;
        let b = (self.rho[0][1] + self.rho[1][0].conj()) / 2.0;
        let half_gap = libm::sqrt(((a - d) / 2.0) * ((a - d) / 2.0) + b.norm_sqr());
        (a + d) / 2.0 - half_gap
    }

    /// `⟨q̃|ρ|q̃⟩` for the equatorial state `(|0⟩ + e^{iμ}|1⟩)/√2`.
    pub fn equatorial_fidelity(&self, mu: f64) -> f64 {
        let phase = C64::from_polar(1.0, mu);
        let r = &self.rho;
        let v = r[0][0] + r[1][1] + r[0][1] * phase + r[1][0] * phase.conj();
        v.re / 2.0
    }
}

/// Reduced state of qubit `j` (1-based), tracing out the other qubits and the
/// cavity. Sub-normalized states are renormalized first.
///
/// Within the zero/one-excitation sector qubit `j` is excited only in `φj`;
/// its coherence with `|0⟩` comes from `φ0`, the only component whose
/// environment matches `φj`'s.
pub fn reduced_qubit_density(state: &StateVector, j: usize) -> Result<QubitDensity> {
    let m = state.m();
    if !(1..=m).contains(&j) {
        return Err(Error::QubitIndex { index: j, m });
    }
    let norm = state.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let c = state.amplitudes();
    let excited = c[j].norm_sqr() / norm;
    let coherence = c[j] * c[0].conj() / norm;
    Ok(QubitDensity {
        rho: [
            [C64::new(1.0 - excited, 0.0), coherence.conj()],
            [coherence, C64::new(excited, 0.0)],
        ],
    })
}

/// Qubit amplitudes at the trapping time for the star profile.
pub fn trapped_amplitudes(m: usize, r: f64) -> Result<(f64, f64)> {
    if m < 2 {
        return Err(Error::TooFewQubits { min: 2, got: m });
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidRatio(r));
    }
    let partners = m as f64 - 1.0;
    let den = partners + r * r;
    Ok(((partners - r * r) / den, -2.0 * r / den))
}

/// Row type of every protocol table.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolReport {
    pub m: usize,
    pub scheme: CouplingScheme,
    pub r: f64,
    pub trapping_time: f64,
    /// Per-qubit copy fidelities `F1 … FM`; empty for W-state generation.
    pub fidelities: Vec<f64>,
    /// Qubit-1 amplitude of the excited branch at `τ*`.
    pub a1: f64,
    /// Partner amplitude of the excited branch at `τ*`.
    pub a: f64,
    pub classification: StateClass,
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::TooFewQubits { min: 2, got: m });
    }
    Ok(())
}

/// Starts from `|1⟩` on qubit 1 and evolves to the `m_odd`-th trapping time.
pub fn generate_w_state(
    m: usize,
    scheme: CouplingScheme,
    m_odd: u32,
) -> Result<(StateVector, ProtocolReport)> {
    check_m(m)?;
    let r = scheme.ratio(m)?;
    let config = SystemConfig::star(m, r)?;
    let tau = trapping_time(&config, m_odd)?;
    let state = evolve(&initial_state(0.0, 0.0, &config), &config, tau)?;
    let qubits = &state.amplitudes()[1..=m];
    let report = ProtocolReport {
        m,
        scheme,
        r,
        trapping_time: tau,
        fidelities: Vec::new(),
        a1: qubits[0].re,
        a: qubits[1].re,
        classification: classify(qubits),
    };
    Ok((state, report))
}

/// Fidelity of qubit `j` with `(|0⟩ + e^{iμ}|1⟩)/√2` after evolving the
/// equatorial input `(|0⟩ + e^{iα}|1⟩)/√2` for time `t`.
pub fn copy_fidelity(config: &SystemConfig, j: usize, t: f64, alpha: f64, mu: f64) -> Result<f64> {
    let state = evolve(&initial_state(PI / 2.0, alpha, config), config, t)?;
    Ok(reduced_qubit_density(&state, j)?.equatorial_fidelity(mu))
}

/// Target- and input-qubit anti-cloning fidelities at `τ*` in closed form.
pub fn fidelity_curve(m: usize, scheme: CouplingScheme) -> Result<(f64, f64)> {
    check_m(m)?;
    let mf = m as f64;
    let inv_sqrt = 1.0 / libm::sqrt(mf);
    Ok(match scheme {
        CouplingScheme::Identical => (0.5 * (1.0 + 2.0 / mf), 1.0 / mf),
        CouplingScheme::WPlus => (0.5 * (1.0 + inv_sqrt), 0.5 * (1.0 + inv_sqrt)),
        CouplingScheme::WMinus => (0.5 * (1.0 + inv_sqrt), 0.5 * (1.0 - inv_sqrt)),
        CouplingScheme::WPrime => (0.5 * (1.0 + 1.0 / libm::sqrt(mf - 1.0)), 0.5),
        CouplingScheme::Custom(_) => {
            return Err(Error::UnsupportedScheme {
                scheme: scheme.label(),
                m,
            })
        }
    })
}

/// Full anti-cloning pipeline: equatorial input with phase `alpha`, evolution
/// to `τ*`, partial traces, and fidelities against the orthogonal complement
/// `μ = α - π`.
pub fn run_anticlone(
    m: usize,
    scheme: CouplingScheme,
    alpha: f64,
    m_odd: u32,
) -> Result<ProtocolReport> {
    check_m(m)?;
    let r = scheme.ratio(m)?;
    let config = SystemConfig::star(m, r)?;
    let tau = trapping_time(&config, m_odd)?;
    let state = evolve(&initial_state(PI / 2.0, alpha, &config), &config, tau)?;
    let mu = alpha - PI;
    let fidelities = (1..=m)
        .map(|j| Ok(reduced_qubit_density(&state, j)?.equatorial_fidelity(mu)))
        .collect::<Result<Vec<_>>>()?;

    let u = closed_form_propagator(&config, tau);
    let column: Vec<C64> = (1..=m).map(|j| u.entry(j, 1)).collect();
    Ok(ProtocolReport {
        m,
        scheme,
        r,
        trapping_time: tau,
        fidelities,
        a1: column[0].re,
        a: column[1].re,
        classification: classify(&column),
    })
}

/// What [`optimize_coupling_ratio`] looks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// `|a1| = |a|`: both W-state branches.
    WSymmetry,
    /// Maximum anti-cloning fidelity of the target qubits.
    TargetFidelity,
    /// `a1 = 0`.
    SeparableTransfer,
}

impl Objective {
    pub fn label(&self) -> &'static str {
        match self {
            Self::WSymmetry => "w_symmetry",
            Self::TargetFidelity => "target_fidelity",
            Self::SeparableTransfer => "separable_transfer",
        }
    }
}

const GRID_POINTS: usize = 400;
const GOLDEN_TOL: f64 = 1e-10;

/// Locates the optimal coupling ratio(s) for `objective` by a logarithmic
/// scan of `(0, 4√M]` followed by golden-section refinement. Returned ratios
/// are ascending.
pub fn optimize_coupling_ratio(m: usize, objective: Objective) -> Result<Vec<f64>> {
    check_m(m)?;
    let hi = 4.0 * libm::sqrt(m as f64);
    let lo = hi * 1e-4;
    let step = libm::log(hi / lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| lo * libm::exp(step * i as f64))
        .collect();
    let amps = |r: f64| trapped_amplitudes(m, r).expect("grid ratios are positive");

    let found = match objective {
        Objective::WSymmetry => roots(&grid, |r| {
            let (a1, a) = amps(r);
            a1.abs() - a.abs()
        }),
        Objective::SeparableTransfer => roots(&grid, |r| amps(r).0),
        Objective::TargetFidelity => {
            // F_target - 1/2 = -a/2, maximized directly to keep the
            // rounding floor low near the flat top
            let gain = |r: f64| -amps(r).1;
            let best = (0..grid.len())
                .max_by(|&i, &k| gain(grid[i]).total_cmp(&gain(grid[k])))
                .expect("non-empty grid");
            if best == 0 || best == grid.len() - 1 {
                Vec::new()
            } else {
                vec![golden_section(grid[best - 1], grid[best + 1], |r| -gain(r))]
            }
        }
    };
    if found.is_empty() {
        return Err(Error::NoRoot(objective.label()));
    }
    Ok(found)
}

/// Sign changes of `f` on the grid, each refined by minimizing `|f|`.
fn roots(grid: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
    let values: Vec<f64> = grid.iter().map(|&r| f(r)).collect();
    let mut out = Vec::new();
    for i in 0..grid.len() - 1 {
        if values[i] == 0.0 {
            out.push(grid[i]);
        } else if values[i] * values[i + 1] < 0.0 {
            out.push(golden_section(grid[i], grid[i + 1], |r| f(r).abs()));
        }
    }
    out
}

/// Minimizer of a unimodal `f` on `[a, b]`.
fn golden_section(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

pub fn photon_amplitude(state: &StateVector) -> C64 {
    state.amplitude(BasisState::Photon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use core::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
    use proptest::prelude::*;

    #[test]
    fn scheme_ratios() {
        assert_eq!(CouplingScheme::Identical.ratio(7).unwrap(), 1.0);
        assert_eq!(CouplingScheme::WPlus.ratio(4).unwrap(), 3.0);
        assert_eq!(CouplingScheme::WMinus.ratio(9).unwrap(), 2.0);
        assert_eq!(CouplingScheme::WPrime.ratio(3).unwrap(), SQRT_2);
        assert_eq!(CouplingScheme::Custom(0.25).ratio(5).unwrap(), 0.25);
        assert!(matches!(
            CouplingScheme::WMinus.ratio(1),
            Err(Error::UnsupportedScheme {
                scheme: "w_minus",
                m: 1
            })
        ));
        assert!(matches!(
            CouplingScheme::WPrime.ratio(1),
            Err(Error::UnsupportedScheme {
                scheme: "w_prime",
                m: 1
            })
        ));
        assert!(matches!(
            CouplingScheme::Custom(-1.0).ratio(3),
            Err(Error::InvalidRatio(_))
        ));
    }

    #[test]
    fn trapped_amplitude_examples() {
        assert_eq!(trapped_amplitudes(4, 3.0).unwrap(), (-0.5, -0.5));
        assert_eq!(trapped_amplitudes(4, 1.0).unwrap(), (0.5, -0.5));
        let (a1, a) = trapped_amplitudes(3, SQRT_2).unwrap();
        assert!(a1.abs() < 1e-15);
        assert!((a + FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(
            trapped_amplitudes(1, 1.0),
            Err(Error::TooFewQubits { min: 2, got: 1 })
        );
    }

    #[test]
    fn trapped_amplitudes_match_evolution() {
        for m in 2..12 {
            for r in [0.3, 1.0, 2.2, 5.0] {
                let (a1, a) = trapped_amplitudes(m, r).unwrap();
                let config = SystemConfig::star(m, r).unwrap();
                let s = evolve(
                    &initial_state(0.0, 0.0, &config),
                    &config,
                    trapping_time(&config, 1).unwrap(),
                )
                .unwrap();
                assert!((s.amplitudes()[1] - C64::new(a1, 0.0)).norm() < 1e-13);
                for j in 2..=m {
                    assert!((s.amplitudes()[j] - C64::new(a, 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn w_state_examples() {
        let (state, report) = generate_w_state(4, CouplingScheme::WPlus, 1).unwrap();
        assert_eq!(report.r, 3.0);
        for j in 1..=4 {
            assert!((state.amplitudes()[j] - C64::new(-0.5, 0.0)).norm() < 1e-12);
        }
        assert_eq!(report.classification, StateClass::SymmetricW);
        assert!(photon_amplitude(&state).norm() < 1e-12);

        let (state, report) = generate_w_state(3, CouplingScheme::WPrime, 1).unwrap();
        assert!(state.amplitudes()[1].norm() < 1e-10);
        for j in 2..=3 {
            assert!((state.amplitudes()[j].re + FRAC_1_SQRT_2).abs() < 1e-12);
        }
        assert_eq!(report.classification, StateClass::SeparableW);

        let (_, report) = generate_w_state(4, CouplingScheme::Identical, 1).unwrap();
        assert_eq!(report.classification, StateClass::AntisymmetricW);

        let (_, report) = generate_w_state(2, CouplingScheme::Identical, 1).unwrap();
        assert_eq!(report.classification, StateClass::SeparableW);

        let (_, report) = generate_w_state(5, CouplingScheme::Custom(1.7), 1).unwrap();
        assert_eq!(report.classification, StateClass::Generic);

        for m in [100, 10_000] {
            let r = CouplingScheme::WPlus.ratio(m).unwrap();
            assert!((r / (m as f64).sqrt() - 1.0) < 0.11);
        }
        assert!(generate_w_state(1, CouplingScheme::Identical, 1).is_err());
    }

    #[test]
    fn w_minus_is_antisymmetric() {
        for m in 2..10 {
            let (_, report) = generate_w_state(m, CouplingScheme::WMinus, 1).unwrap();
            assert_eq!(report.classification, StateClass::AntisymmetricW, "M = {m}");
        }
    }

    #[test]
    fn classification_ignores_global_phase() {
        let amps = [C64::new(0.0, 0.5); 4];
        assert_eq!(classify(&amps), StateClass::SymmetricW);
        let mut flipped = amps;
        flipped[0] = -flipped[0];
        assert_eq!(classify(&flipped), StateClass::AntisymmetricW);
    }

    // Independent oracle: build the full 2^M ⊗ 2 state vector and trace out
    // everything except qubit j by brute force.
    fn brute_force_density(state: &StateVector, j: usize) -> [[C64; 2]; 2] {
        let m = state.m();
        let dim = 1usize << (m + 1);
        let mut full = std::vec![ZERO; dim];
        // bit k (k < m) is qubit k+1, bit m is the photon
        full[0] = state.amplitudes()[0];
        for q in 1..=m {
            full[1 << (q - 1)] = state.amplitudes()[q];
        }
        full[1 << m] = state.amplitudes()[m + 1];
        let norm: f64 = full.iter().map(|c| c.norm_sqr()).sum();
        let bit = 1 << (j - 1);
        let mut rho = [[ZERO; 2]; 2];
        for env in 0..dim {
            if env & bit != 0 {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    let ia = env | if a == 1 { bit } else { 0 };
                    let ib = env | if b == 1 { bit } else { 0 };
                    rho[a][b] += full[ia] * full[ib].conj() / norm;
                }
            }
        }
        rho
    }

    #[test]
    fn density_at_time_zero() {
        let config = SystemConfig::star(3, 1.0).unwrap();
        let s = initial_state(PI / 2.0, 0.0, &config);
        let rho = reduced_qubit_density(&s, 1).unwrap().matrix();
        for row in rho {
            for v in row {
                assert!((v - C64::new(0.5, 0.0)).norm() < 1e-15);
            }
        }
        let rho = reduced_qubit_density(&s, 2).unwrap().matrix();
        assert_eq!(rho, [[C64::new(1.0, 0.0), ZERO], [ZERO, ZERO]]);
        assert_eq!(
            reduced_qubit_density(&s, 4),
            Err(Error::QubitIndex { index: 4, m: 3 })
        );
        assert!(reduced_qubit_density(&s, 0).is_err());
    }

    #[test]
    fn density_matches_closed_form_reduced_matrix() {
        let r = SQRT_2 + 1.0;
        let config = SystemConfig::star(2, r).unwrap();
        let tau = trapping_time(&config, 1).unwrap();
        let s = evolve(&initial_state(PI / 2.0, 0.0, &config), &config, tau).unwrap();
        let u21 = -2.0 * r / (r * r + 1.0);
        assert!((u21 + FRAC_1_SQRT_2).abs() < 1e-15);
        let rho = reduced_qubit_density(&s, 2).unwrap().matrix();
        // ½[(2-|U|²)|0⟩⟨0| + |U|²|1⟩⟨1| + U(e^{-iα}|0⟩⟨1| + e^{iα}|1⟩⟨0|)]
        let want = [
            [
                C64::new((2.0 - u21 * u21) / 2.0, 0.0),
                C64::new(u21 / 2.0, 0.0),
            ],
            [C64::new(u21 / 2.0, 0.0), C64::new(u21 * u21 / 2.0, 0.0)],
        ];
        for a in 0..2 {
            for b in 0..2 {
                assert!((rho[a][b] - want[a][b]).norm() < 1e-12);
            }
        }
        let brute = brute_force_density(&s, 2);
        for a in 0..2 {
            for b in 0..2 {
                assert!((rho[a][b] - brute[a][b]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn copy_fidelity_examples() {
        let config = SystemConfig::star(4, 2.0).unwrap();
        for j in 1..=4 {
            for t in [0.0, 0.4, 1.7] {
                let f = copy_fidelity(&config, j, t, 0.3, 0.3 - PI / 2.0).unwrap();
                assert!((f - 0.5).abs() < 1e-15);
            }
        }
        let tau = trapping_time(&config, 1).unwrap();
        let omega2 = 4.0 + 3.0;
        for j in 2..=4 {
            let (alpha, mu) = (0.9, -0.4);
            let f = copy_fidelity(&config, j, tau, alpha, mu).unwrap();
            let want = 0.5 * (1.0 - 2.0 * 2.0 * 1.0 * libm::cos(alpha - mu) / omega2);
            assert!((f - want).abs() < 1e-12);
        }
        let config = SystemConfig::star(2, 1.0).unwrap();
        let tau = trapping_time(&config, 1).unwrap();
        assert!((copy_fidelity(&config, 2, tau, 0.0, -PI).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_curve_examples() {
        let (target, input) = fidelity_curve(2, CouplingScheme::WPlus).unwrap();
        assert!((target - 0.853_553_390_593_273_7).abs() < 1e-15);
        assert_eq!(target, input);
        let (target, _) = fidelity_curve(3, CouplingScheme::WPrime).unwrap();
        assert!((target - 0.5 * (1.0 + FRAC_1_SQRT_2)).abs() < 1e-15);
        for m in 2..40 {
            let plus = fidelity_curve(m, CouplingScheme::WPlus).unwrap().0;
            let sep = fidelity_curve(m + 1, CouplingScheme::WPrime).unwrap().0;
            assert_eq!(plus, sep);
        }
        assert!(fidelity_curve(3, CouplingScheme::Custom(2.0)).is_err());
        assert!(fidelity_curve(1, CouplingScheme::Identical).is_err());
    }

    #[test]
    fn anticlone_examples() {
        let report = run_anticlone(2, CouplingScheme::WPlus, 0.0, 1).unwrap();
        let opt = 0.5 * (1.0 + FRAC_1_SQRT_2);
        assert!((report.fidelities[0] - opt).abs() < 1e-12);
        assert!((report.fidelities[1] - opt).abs() < 1e-12);

        let report = run_anticlone(5, CouplingScheme::Identical, 0.0, 1).unwrap();
        assert!((report.fidelities[1] - 0.7).abs() < 1e-12);
        assert!((report.fidelities[0] - 0.2).abs() < 1e-12);

        let report = run_anticlone(3, CouplingScheme::WPrime, 1.1, 1).unwrap();
        assert!((report.fidelities[0] - 0.5).abs() < 1e-12);
        assert_eq!(report.classification, StateClass::SeparableW);
        let config = SystemConfig::star(3, SQRT_2).unwrap();
        let s = evolve(
            &initial_state(PI / 2.0, 1.1, &config),
            &config,
            report.trapping_time,
        )
        .unwrap();
        let rho1 = reduced_qubit_density(&s, 1).unwrap().matrix();
        assert!((rho1[0][0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_matches_pipeline() {
        for m in 2..=32 {
            for scheme in CouplingScheme::NAMED {
                let (target, input) = fidelity_curve(m, scheme).unwrap();
                let report = run_anticlone(m, scheme, 0.37, 1).unwrap();
                assert!(
                    (report.fidelities[0] - input).abs() < 1e-12,
                    "{m} {scheme:?}"
                );
                for &f in &report.fidelities[1..] {
                    assert!((f - target).abs() < 1e-12, "{m} {scheme:?}");
                }
            }
        }
    }

    #[test]
    fn fidelity_ordering() {
        let f = |m, s| fidelity_curve(m, s).unwrap().0;
        for m in 2..200 {
            let iden = f(m, CouplingScheme::Identical);
            let sep = f(m, CouplingScheme::WPrime);
            let pm = f(m, CouplingScheme::WPlus);
            assert!(sep >= iden);
            if m >= 3 {
                assert!(sep > iden);
            }
            if m > 4 {
                assert!(pm > iden);
            }
            if m >= 3 {
                for s in CouplingScheme::NAMED {
                    let t = f(m, s);
                    assert!((0.5..=0.5 * (1.0 + FRAC_1_SQRT_2) + 1e-15).contains(&t));
                }
            }
        }
    }

    #[test]
    fn optimizer_examples() {
        let w = optimize_coupling_ratio(4, Objective::WSymmetry).unwrap();
        assert_eq!(w.len(), 2);
        assert!(
            (w[0] - 1.0).abs() < 1e-6 && (w[1] - 3.0).abs() < 1e-6,
            "{w:?}"
        );
        let s = optimize_coupling_ratio(3, Objective::SeparableTransfer).unwrap();
        assert!((s[0] - SQRT_2).abs() < 1e-6);
        let w = optimize_coupling_ratio(9, Objective::WSymmetry).unwrap();
        assert!((w[1] - 4.0).abs() < 1e-6);
        let t = optimize_coupling_ratio(10, Objective::TargetFidelity).unwrap();
        assert!((t[0] - 3.0).abs() < 1e-6, "{t:?}");
        assert!(optimize_coupling_ratio(1, Objective::WSymmetry).is_err());
    }

    proptest! {
        #[test]
        fn trapped_state_is_normalized(m in 2usize..200, r in 1e-3f64..50.0) {
            let (a1, a) = trapped_amplitudes(m, r).unwrap();
            prop_assert!((a1 * a1 + (m as f64 - 1.0) * a * a - 1.0).abs() < 1e-12);
        }

        #[test]
        fn densities_are_legal(
            m in 2usize..10, r in 0.05f64..6.0, t in 0.0f64..10.0,
            theta in 0.0f64..PI, alpha in 0.0f64..6.3, j in 1usize..10,
        ) {
            let j = 1 + (j - 1) % m;
            let config = SystemConfig::star(m, r).unwrap();
            let s = evolve(&initial_state(theta, alpha, &config), &config, t).unwrap();
            let rho = reduced_qubit_density(&s, j).unwrap();
            prop_assert!(rho.hermitian_defect() < 1e-12);
            prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
            prop_assert!(rho.min_eigenvalue() > -1e-12);
            let brute = brute_force_density(&s, j);
            for a in 0..2 {
                for b in 0..2 {
                    prop_assert!((rho.matrix()[a][b] - brute[a][b]).norm() < 1e-13);
                }
            }
        }

        #[test]
        fn partner_exchange_symmetry(m in 3usize..10, r in 0.1f64..5.0, t in 0.0f64..5.0) {
            let config = SystemConfig::star(m, r).unwrap();
            let s = evolve(&initial_state(0.4, 0.2, &config), &config, t).unwrap();
            let c2 = s.amplitudes()[2];
            for j in 3..=m {
                prop_assert_eq!(s.amplitudes()[j], c2);
            }
        }

        #[test]
        fn copy_fidelity_closed_form(
            m in 2usize..10, r in 0.1f64..5.0, t in 0.0f64..10.0,
            alpha in 0.0f64..6.3, mu in 0.0f64..6.3, j in 1usize..10,
        ) {
            let j = 1 + (j - 1) % m;
            let config = SystemConfig::star(m, r).unwrap();
            let u = closed_form_propagator(&config, t).entry(j, 1).re;
            let f = copy_fidelity(&config, j, t, alpha, mu).unwrap();
            prop_assert!((f - 0.5 * (1.0 + u * (alpha - mu).cos())).abs() < 1e-12);
        }
    }
}
