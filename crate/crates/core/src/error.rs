use thiserror::Error;

use crate::fock::Statistics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("occupation vector has {found} entries, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("fermionic mode {mode} has occupation {occupation}")]
    FermionOccupancyViolation { mode: usize, occupation: u8 },
    #[error("mode occupation {occupation} exceeds the single-digit limit of {max}")]
    OccupationOverflow { occupation: u32, max: u8 },
    #[error("terms carry different particle numbers ({first} and {second})")]
    MixedParticleNumber { first: usize, second: usize },
    #[error("states live on different spaces ({0})")]
    ShapeMismatch(String),
    #[error("mode index {index} out of range for {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },
    #[error("cannot combine {0:?} and {1:?} states")]
    StatsMismatch(Statistics, Statistics),
    #[error("operation requires a non-zero state")]
    EmptyState,
    #[error("partition assigns {alice} modes to Alice but the state has {modes}")]
    InvalidPartition { alice: usize, modes: usize },
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("operation requires {expected} particles, state has {found}")]
    WrongParticleNumber { expected: usize, found: usize },
    #[error("operation requires {expected:?} statistics")]
    WrongStatistics { expected: Statistics },
    #[error("single-particle spectrum is not pairwise degenerate: {0}")]
    DegeneracyViolation(String),
    #[error("local particle-number sector n = {0} is empty")]
    EmptySector(usize),
    #[error("state too large: {0}")]
    TooLarge(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("kets have mismatched arity: expected {expected:?}, found {found:?} at offset {offset}")]
    ArityMismatch {
        expected: (usize, usize),
        found: (usize, usize),
        offset: usize,
    },
}

impl Error {
    /// True for malformed input text, as opposed to a well-formed but
    /// physically invalid state.
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Syntax { .. })
    }
}
