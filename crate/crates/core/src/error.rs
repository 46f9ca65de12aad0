use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator has {found} entries, expected {expected}")]
    EntryCount { expected: usize, found: usize },

    #[error("non-finite entry")]
    NonFinite,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("basis is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },

    #[error("invalid density operator: {reason}")]
    InvalidDensity { reason: &'static str, value: f64 },

    #[error("invalid program state: {0}")]
    InvalidProgram(&'static str),

    #[error("invalid POVM: {reason} (element {element}, value {value:e})")]
    InvalidPovm {
        reason: &'static str,
        element: usize,
        value: f64,
    },

    #[error("malformed outcome partition: {0}")]
    MalformedPartition(&'static str),

    #[error("outcome {outcome} is impossible (probability {probability:e})")]
    OutcomeImpossible { outcome: usize, probability: f64 },

    #[error("invalid probability vector: {reason} ({value:e})")]
    InvalidProbabilities { reason: &'static str, value: f64 },

    #[error("POVM is not informationally complete: rank {rank} < {required}")]
    UnderDetermined { rank: usize, required: usize },

    #[error("probabilities inconsistent with the POVM (residual {residual:e})")]
    Inconsistent { residual: f64 },

    #[error("linear inversion does not yield a state (smallest eigenvalue {min_eigenvalue:e})")]
    NotPhysical { min_eigenvalue: f64 },

    #[error("not a rank-1 projective measurement: {reason} (outcome {outcome})")]
    InvalidMeasurement { reason: &'static str, outcome: usize },

    #[error("invalid slot map: {0}")]
    InvalidSlotMap(&'static str),

    #[error(
        "isometry condition violated for programs ({alpha}, {beta}): residual {residual:e}{}",
        match slot { Some(s) => alloc::format!(", first nonzero product at slot {s}"), None => alloc::string::String::new() }
    )]
    IsometryViolated {
        alpha: usize,
        beta: usize,
        slot: Option<usize>,
        residual: f64,
    },

    #[error("program states are linearly dependent")]
    DependentPrograms,

    #[error("{count} measurements exceed the data dimension {dim}")]
    TooManyMeasurements { count: usize, dim: usize },

    #[error("invalid Pauli axis {0} (expected 1, 2 or 3)")]
    InvalidAxis(usize),
}

impl Error {
    /// The request was well formed but asks for something mathematically
    /// impossible (as opposed to malformed input).
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::UnderDetermined { .. }
                | Error::IsometryViolated { .. }
                | Error::DependentPrograms
                | Error::TooManyMeasurements { .. }
                | Error::OutcomeImpossible { .. }
                | Error::Inconsistent { .. }
                | Error::NotPhysical { .. }
        )
    }
}
