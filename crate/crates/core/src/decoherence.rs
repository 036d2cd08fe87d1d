//! No-click conditional dynamics with qubit dipole decay `Γ` and cavity decay
//! `κ`.
//!
//! Conditioned on no photon being detected, the state evolves under
//! `H̃ = H - iΓ Σ σ⁺σ⁻ - iκ a†a` without renormalization; its squared norm is
//! the no-click probability `P(0,t)`. For the star profile (`γ1 = rγ`, the
//! other couplings `γ`) the excited branch started from `φ1` stays of the form
//! `b1 φ1 + b Σ_{j>1} φj + b_{M+1} φ_{M+1}` with, writing `α = γ1γ/ω²`,
//! `Ω = sqrt(4ω² - (κ-Γ)²)`, `u = sin(Ωt/2)`, `v = cos(Ωt/2)`:
//!
//! ```text
//! b(t)       = α e^{-Γt} [-1 + e^{(Γ-κ)t/2} (v + (κ-Γ) u/Ω)]
//! b1(t)      = e^{-Γt} + r b(t)
//! b_{M+1}(t) = -2i γ1 e^{-(Γ+κ)t/2} u/Ω
//! ```
//!
//! The qubit-1 amplitude carries the dark-mode decay `e^{-Γt}`. The undamped
//! variant `1 + r b(t)` is kept as [`QubitOneForm::Undamped`] only so the
//! oracle comparison can show that it is wrong whenever `Γ > 0`.
//!
//! The photon amplitude vanishes identically at `τ*_c = 2mπ/Ω` (`m` odd).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use crate::linalg::{C64, I, ZERO};
use crate::model::{collective_rabi, StateVector, SystemConfig};
use crate::propagator::{evolve, trapping_time};
use crate::protocols::CouplingScheme;
use crate::{Error, Result};

/// Reading of the qubit-1 amplitude in the conditional closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitOneForm {
    /// `b1 = e^{-Γt} + r b(t)`; agrees with direct integration.
    Damped,
    /// `b1 = 1 + r b(t)`; only correct for `Γ = 0`.
    Undamped,
}

impl QubitOneForm {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Damped => "b1=exp(-Gamma*t)+r*b",
            Self::Undamped => "b1=1+r*b",
        }
    }
}

/// Excited-branch amplitudes of the conditional state at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalAmplitudes {
    pub t: f64,
    /// Qubit 1.
    pub b1: C64,
    /// Each partner qubit `j = 2..M`.
    pub b: C64,
    pub b_photon: C64,
    /// `γ1γ/ω²`.
    pub alpha_coupling: f64,
    /// `Ω = sqrt(4ω² - (κ-Γ)²)`.
    pub omega_split: f64,
}

impl ConditionalAmplitudes {
    /// Squared norm of the branch for `m` qubits.
    pub fn norm_sqr(&self, m: usize) -> f64 {
        self.b1.norm_sqr() + (m as f64 - 1.0) * self.b.norm_sqr() + self.b_photon.norm_sqr()
    }
}

struct StarParams {
    g1: f64,
    g: f64,
    omega: f64,
    omega_split: f64,
}

fn star_params(config: &SystemConfig) -> Result<StarParams> {
    let (g1, g) = config.star_couplings().ok_or(Error::NotStar)?;
    let omega = collective_rabi(config);
    let splitting = (config.kappa() - config.gamma_decay()).abs();
    let disc = 4.0 * omega * omega - splitting * splitting;
    if disc <= 0.0 {
        return Err(Error::Overdamped {
            two_omega: 2.0 * omega,
            splitting,
        });
    }
    Ok(StarParams {
        g1,
        g,
        omega,
        omega_split: libm::sqrt(disc),
    })
}

/// Oracle-validated conditional amplitudes for a star configuration.
pub fn conditional_amplitudes(config: &SystemConfig, t: f64) -> Result<ConditionalAmplitudes> {
    conditional_amplitudes_with(config, t, QubitOneForm::Damped)
}

/// Conditional amplitudes with an explicit reading of the qubit-1 term.
pub fn conditional_amplitudes_with(
    config: &SystemConfig,
    t: f64,
    form: QubitOneForm,
) -> Result<ConditionalAmplitudes> {
    if !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let p = star_params(config)?;
    let (gd, k) = (config.gamma_decay(), config.kappa());
    let alpha = p.g1 * p.g / (p.omega * p.omega);
    let r = p.g1 / p.g;
    let u = libm::sin(p.omega_split * t / 2.0);
    let v = libm::cos(p.omega_split * t / 2.0);
    let dark = libm::exp(-gd * t);

    let bright = libm::exp((gd - k) * t / 2.0) * (v + (k - gd) * u / p.omega_split);
    let b = alpha * dark * (bright - 1.0);
    let b1 = match form {
        QubitOneForm::Damped => dark + r * b,
        QubitOneForm::Undamped => 1.0 + r * b,
    };
    let b_photon = -I * (2.0 * p.g1 * libm::exp(-(gd + k) * t / 2.0) * u / p.omega_split);

    Ok(ConditionalAmplitudes {
        t,
        b1: C64::new(b1, 0.0),
        b: C64::new(b, 0.0),
        b_photon,
        alpha_coupling: alpha,
        omega_split: p.omega_split,
    })
}

/// Unnormalized conditional state for the input `sin(θ/2)|0⟩ + e^{iα}cos(θ/2)|1⟩`
/// on qubit 1. `φ0` neither evolves nor decays.
pub fn conditional_state(
    config: &SystemConfig,
    theta: f64,
    alpha: f64,
    t: f64,
) -> Result<StateVector> {
    let amps = conditional_amplitudes(config, t)?;
    let m = config.m();
    let weight = C64::from_polar(libm::cos(theta / 2.0), alpha);
    let mut out = vec![ZERO; m + 2];
    out[0] = C64::new(libm::sin(theta / 2.0), 0.0);
    out[1] = weight * amps.b1;
    for slot in &mut out[2..=m] {
        *slot = weight * amps.b;
    }
    out[m + 1] = weight * amps.b_photon;
    Ok(StateVector::conditional(out))
}

/// `τ*_c = 2·m_odd·π/Ω`.
pub fn renormalized_trapping_time(config: &SystemConfig, m_odd: u32) -> Result<f64> {
    if m_odd.is_multiple_of(2) {
        return Err(Error::InvalidTrappingOrder(m_odd));
    }
    let p = star_params(config)?;
    Ok(2.0 * f64::from(m_odd) * PI / p.omega_split)
}

/// `P(0,t)` for the excited branch (input qubit in `|1⟩`).
pub fn no_click_probability(config: &SystemConfig, t: f64) -> Result<f64> {
    Ok(conditional_amplitudes(config, t)?.norm_sqr(config.m()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceReport {
    pub m: usize,
    pub r: f64,
    pub gamma_decay: f64,
    pub kappa: f64,
    /// Renormalized trapping time `τ*_c`.
    pub tau_c: f64,
    /// `|⟨Ψ(τ*)|Ψ̃_cond(τ*_c)⟩|` with the conditional state normalized.
    pub fidelity: f64,
    /// `P(0, τ*_c)`.
    pub p_no_click: f64,
}

/// Compares the normalized conditional state at `τ*_c` with the lossless
/// trapped state at `τ*`, both started from `|1⟩` on qubit 1.
pub fn decohered_fidelity(config: &SystemConfig, m_odd: u32) -> Result<DecoherenceReport> {
    let m = config.m();
    let tau_c = renormalized_trapping_time(config, m_odd)?;
    let cond = conditional_state(config, 0.0, 0.0, tau_c)?;
    let p_no_click = cond.norm_sqr();

    let lossless = SystemConfig::new(config.couplings().to_vec())?;
    let tau = trapping_time(&lossless, m_odd)?;
    let pure = evolve(
        &crate::model::initial_state(0.0, 0.0, &lossless),
        &lossless,
        tau,
    )?;
    let fidelity = pure.inner(&cond.renormalized()?)?.norm();

    let (g1, g) = config.star_couplings().ok_or(Error::NotStar)?;
    Ok(DecoherenceReport {
        m,
        r: g1 / g,
        gamma_decay: config.gamma_decay(),
        kappa: config.kappa(),
        tau_c,
        fidelity,
        p_no_click,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure2Row {
    pub scheme: CouplingScheme,
    pub report: DecoherenceReport,
}

/// Decohered fidelity and no-click probability for the `w_plus` and
/// `w_prime` schemes over a range of qubit counts, ordered by `(M, scheme)`.
pub fn figure2_scan(
    ms: RangeInclusive<usize>,
    gamma_decay: f64,
    kappa: f64,
    m_odd: u32,
) -> Result<Vec<Figure2Row>> {
    let mut rows = Vec::new();
    for m in ms {
        for scheme in [CouplingScheme::WPlus, CouplingScheme::WPrime] {
            let config = scheme.config(m)?.decaying(gamma_decay, kappa)?;
            rows.push(Figure2Row {
                scheme,
                report: decohered_fidelity(&config, m_odd)?,
            });
        }
    }
    Ok(rows)
}
