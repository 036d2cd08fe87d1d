//! Exact dynamics of `M` qubits coupled to a single cavity mode in the
//! zero/one-excitation sector.
//!
//! The crate is `no_std` (it needs `alloc`). Everything lives in the basis
//! `{φ0, φ1 … φM, φ_{M+1}}`: `φ0` is the global ground state with an empty
//! cavity, `φj` has qubit `j` excited and `φ_{M+1}` holds one photon. Rates
//! and couplings are measured in units of a reference coupling `γ = 1`, so
//! times are in units of `1/γ`.
//!
//! * [`model`]: configurations, basis, states and generators.
//! * [`propagator`]: closed-form evolution plus the eigendecomposition and
//!   Runge–Kutta oracles it is checked against.
//! * [`protocols`]: W-state generation and phase-covariant anti-cloning.
//! * [`decoherence`]: no-click conditional dynamics with qubit and cavity decay.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod decoherence;
mod error;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod protocols;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use model::{
    build_dissipative_hamiltonian, build_hamiltonian, collective_rabi, initial_state,
    ExcitationBasis, GeneratorKind, GeneratorMatrix, StateVector, SystemConfig,
};
