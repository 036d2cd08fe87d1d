use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("at least {min} qubit(s) required, got {got}")]
    TooFewQubits { min: usize, got: usize },

    #[error("coupling of qubit {index} must be positive and finite, got {value}")]
    InvalidCoupling { index: usize, value: f64 },

    #[error("decay rate {name} must be non-negative and finite, got {value}")]
    InvalidDecayRate { name: &'static str, value: f64 },

    #[error("coupling ratio must be positive and finite, got {0}")]
    InvalidRatio(f64),

    #[error("time must be finite (and non-negative for integration), got {0}")]
    InvalidTime(f64),

    #[error("integrator step must be positive and finite, got {0}")]
    InvalidStep(f64),

    #[error("state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("trapping order must be a positive odd integer, got {0}")]
    InvalidTrappingOrder(u32),

    #[error("qubit index {index} outside 1..={m}")]
    QubitIndex { index: usize, m: usize },

    #[error("generator is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("Hermitian eigendecomposition did not converge")]
    EigenFailure,

    #[error("integration produced non-finite amplitudes; step size too large")]
    NonFinite,

    #[error("overdamped regime: 2ω = {two_omega} does not exceed |κ − Γ| = {splitting}")]
    Overdamped { two_omega: f64, splitting: f64 },

    #[error(
        "closed-form conditional dynamics need a star coupling profile (equal partner couplings)"
    )]
    NotStar,

    #[error("scheme `{scheme}` is not defined for M = {m}")]
    UnsupportedScheme { scheme: &'static str, m: usize },

    #[error("objective `{0}` has no optimum inside the search bracket")]
    NoRoot(&'static str),

    #[error("state has zero norm")]
    ZeroNorm,
}
