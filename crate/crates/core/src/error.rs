use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed structure-constant tensor: {0}")]
    MalformedTensor(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical rank is ambiguous: singular value {singular_value:e} lies within a factor 10 of the cutoff {cutoff:e}")]
    NumericalRankAmbiguity { singular_value: f64, cutoff: f64 },

    #[error("algebra is not semisimple: radical has dimension {radical_dim}")]
    NotSemisimple { radical_dim: usize },

    #[error("subspace is not an ideal (residual {residual:e})")]
    NotAnIdeal { residual: f64 },

    #[error("generator {generator} has eigenvalue {re:+.3e}{im:+.9}i, which is not in iZ")]
    NonIntegralGenerator { generator: usize, re: f64, im: f64 },

    #[error("eigenvalue tuple {tuple:?} misses the integer lattice by {distance:e}")]
    WeightRoundingAmbiguity { tuple: Vec<f64>, distance: f64 },

    #[error("two independent computations disagree: {0}")]
    InternalDisagreement(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("second-kind coordinates could not be recovered (residual {residual:e})")]
    RecoordinatizationFailure { residual: f64 },

    #[error("1 - phi is not invertible (smallest singular value {sigma_min:e})")]
    NotInvertible { sigma_min: f64 },

    #[error("Newton iteration stalled after {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("ellipticity undetermined: obstruction {obstruction:e} is within 10x of tolerance")]
    Undetermined { obstruction: f64 },

    #[error("spectral classification ambiguous: eigenvalue modulus {modulus} is within a factor 10 of the tolerance band")]
    SpectralAmbiguity { modulus: f64 },

    #[error("matrix is not invertible (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("element is not elliptic; no conjugating witness exists")]
    NoWitness,

    #[error("compact part has {components} extra components; the decision theorems require a connected compact group")]
    DisconnectedCompactPart { components: usize },

    #[error("equivalence violated: {0}")]
    EquivalenceViolation(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("unknown gallery entry `{0}`")]
    UnknownGalleryEntry(String),

    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidPresentation(msg.into())
    }
}
