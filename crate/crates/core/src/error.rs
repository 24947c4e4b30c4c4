use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{routine} did not converge within {iterations} iterations")]
    NonConvergence {
        routine: &'static str,
        iterations: usize,
    },
    #[error("matrix is not Hermitian (anti-Hermitian part {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (‖U†U − I‖ = {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("{0}")]
    InvalidInput(String),
    #[error("channel is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },
    #[error("channel is not completely positive (Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("{name} = {value} lies outside the valid range [{lo}, {hi}]")]
    DomainViolation {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("degenerate eigenvalue cluster near {value} could not be resolved: {reason}")]
    DegenerateUnresolved { value: String, reason: String },
    #[error(
        "derivative of the state has weight {weight:.3e} outside the support of the state; \
         the QFI is discontinuous here, perturb the input state so the output rank does not change"
    )]
    RankDeficientSignal { weight: f64 },
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("purity Tr(rho^2) = {purity:.3e} is below the usable threshold")]
    DegeneratePurity { purity: f64 },
    #[error("subspace refinement did not stabilize within {rounds} rounds")]
    NoConvergence { rounds: usize },
    #[error("algorithm invariant violated: {0}")]
    AlgorithmInvariantViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
