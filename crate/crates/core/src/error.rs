use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode count must be at least {min}, got {got}")]
    TooFewModes { min: usize, got: usize },

    #[error("dimension mismatch: expected {expected} modes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has {found} entries, expected {expected}")]
    MalformedMatrix { expected: usize, found: usize },

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("cannot compose an empty element list")]
    EmptyNetwork,

    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("mode {0} listed more than once")]
    DuplicateMode(usize),

    #[error("mode subset must be nonempty")]
    EmptyModeSet,

    #[error("at most one coherent source is supported, got {0}")]
    MultipleCoherentSources(usize),

    #[error("coherent amplitude must be finite")]
    NonFiniteAmplitude,

    #[error("tail epsilon must lie in (0, 1), got {0}")]
    InvalidTailEpsilon(f64),

    #[error("detector efficiency must lie in (0, 1], got {0}")]
    InvalidEfficiency(f64),

    #[error("phase grid must be nonempty and finite")]
    InvalidPhaseGrid,

    #[error("phase grid spacing is not uniform")]
    NonUniformGrid,

    #[error("need at least {min} scan rows, got {got}")]
    TooFewRows { min: usize, got: usize },

    #[error(
        "evolution would generate about {estimate:.3e} intermediate terms (limit {limit:.0e})"
    )]
    ComplexityGuard { estimate: f64, limit: f64 },
}
