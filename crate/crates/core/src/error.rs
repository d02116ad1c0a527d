use alloc::string::String;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("unknown environment `{0}`")]
    UnknownEnvironment(String),
    #[error("subsystem `{label}` has invalid dimension {dim}")]
    InvalidDimension { label: String, dim: usize },
    #[error("total dimension {0} exceeds the supported maximum of 256")]
    DimensionTooLarge(usize),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("matrix shape {rows}x{cols} does not match expected dimension {expected}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace {0} is outside the allowed range")]
    InvalidTrace(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("Kraus operators do not satisfy the completeness bound (deviation {0:e})")]
    NotTracePreserving(f64),
    #[error("probability `{name}` = {value} is outside its allowed range")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("all outcome probabilities are zero")]
    NullBranch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid objective subspace specification: {0}")]
    InvalidSpec(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("hypothesis not met: {0}")]
    HypothesisUnmet(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error(
        "Monte Carlo run stalled: {successes} successes in the last {window} attempts \
         ({attempts} attempts total, {completed} runs completed)"
    )]
    Stalled {
        successes: u64,
        window: u64,
        attempts: u64,
        completed: u64,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
