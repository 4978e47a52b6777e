use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("plurality manipulation needs more than two candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("duplicate candidate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown candidate label {0:?}")]
    UnknownLabel(String),
    #[error("candidate index {index} out of range for {m} candidates")]
    InvalidCandidate { index: usize, m: usize },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("the candidate set is empty")]
    EmptyCandidateSet,
    #[error("partial preference contains a cycle")]
    CyclicPreference,
    #[error("expansion of {what} exceeds the cap of {cap} elements")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("invalid focal element: {0}")]
    InvalidFocal(String),
    #[error("invalid mass function: {0}")]
    InvalidMass(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid layered belief: {0}")]
    InvalidLayered(String),
    #[error("layer {0} of a partitioned belief is empty")]
    EmptyRing(usize),
    #[error("score vector has {got} entries, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operation requires a mass with exactly one focal element, got {0}")]
    NotSingleFocal(usize),
    #[error("invalid decision rule: {0}")]
    InvalidRule(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("unknown scenario family {0:?}")]
    UnknownFamily(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
