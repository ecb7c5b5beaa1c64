//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Variants carry enough context
//! (indices, residuals, file positions) that callers can report failures
//! without re-deriving state.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix must be square for this operation, got {rows}x{cols}")]
    NonSquareMatrix { rows: usize, cols: usize },

    #[error("matrix dimensions must be at least 1x1, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("matrix entry ({row},{col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("expected {expected} matrix entries, got {got}")]
    EntryCount { expected: usize, got: usize },

    #[error("{context}: dimension {n} exceeds supported maximum {limit}")]
    DimensionTooLarge {
        context: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("duplicate mode index {index} in mode configuration")]
    DuplicateMode { index: usize },

    #[error("photon count {photons} exceeds mode count {modes}")]
    TooManyPhotons { photons: usize, modes: usize },

    #[error("mode configuration is empty (need at least one photon)")]
    EmptyModeConfig,

    #[error("occupation pattern has {got} photons where {expected} were expected")]
    OccupationMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary: max |U\u{2020}U - I| = {residual:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error(
        "decomposition failed to converge: recomposition residual {residual:.3e} \
         exceeds {tolerance:.1e} (input is likely not unitary)"
    )]
    DecompositionResidual { residual: f64, tolerance: f64 },

    #[error("circuit element {index}: {message}")]
    InvalidCircuitElement { index: usize, message: String },

    #[error("all raw output weights are zero; the model puts no mass on no-collision outputs")]
    DegenerateDistribution,

    #[error("distributions are over different supports ({left} vs {right})")]
    SupportMismatch { left: String, right: String },

    #[error("event {index} ({modes}) lies outside the distribution support")]
    EventOutsideSupport { index: usize, modes: String },

    #[error("event log is empty")]
    EmptyEventLog,

    #[error(
        "model probability for event {index} must be positive \
         (p_ind = {p_ind:.3e}, q_dis = {q_dis:.3e})"
    )]
    NonPositiveProbability { index: usize, p_ind: f64, q_dis: f64 },

    #[error("invalid parameter `{field}`: {message}")]
    InvalidParameter { field: &'static str, message: String },

    #[error("no unitary in the ensemble satisfies the convergence criterion")]
    AllUnitariesExcluded,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    FileFormat { path: String, message: String },

    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Attach a path to a raw [`std::io::Error`].
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
