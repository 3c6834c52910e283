use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid measure space: {0}")]
    InvalidSpace(String),

    #[error("objects live over different base spaces")]
    SpaceMismatch,

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    #[error("module mismatch: {0}")]
    ModuleMismatch(String),

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("dual norm of {0} cannot be evaluated exactly")]
    UnsupportedDual(String),

    #[error("norm {0} cannot be restricted to a subspace")]
    UnsupportedRestriction(String),

    #[error("vertex enumeration limited to dimension {cap}, got {dim}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("vertex enumeration would visit {candidates} candidates")]
    EnumerationTooLarge { candidates: u128 },

    #[error("operator norm bracket [{lower}, {upper}] too wide")]
    BracketTooWide { lower: f64, upper: f64 },

    #[error("empty family")]
    EmptyFamily,

    #[error("unrecognized tail rule: {0}")]
    UnrecognizedTail(String),

    #[error("family diverges at atom {atom}")]
    Divergent { atom: String },

    #[error("unknown atom id `{0}`")]
    UnknownAtom(String),

    #[error("pushforward is not absolutely continuous at atom {0}")]
    NotAbsolutelyContinuous(String),

    #[error("invalid index set: {0}")]
    InvalidIndex(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("cone compatibility violated at ({i}, {j}): deviation {deviation:e}")]
    TargetLaw { i: String, j: String, deviation: f64 },

    #[error("no factorization: worst square at stage {stage} deviates by {deviation:e}")]
    NoFactorization { stage: String, deviation: f64 },

    #[error("incompatible thread components ({i}, {j}): deviation {deviation:e}")]
    IncompatibleThread { i: String, j: String, deviation: f64 },

    #[error("thread has infinite norm at atoms {0:?}")]
    InfiniteNorm(Vec<String>),

    #[error("generators do not exhaust the module: atom {atom} has rank {rank} < {dim}")]
    DeficientGenerators { atom: String, rank: usize, dim: usize },

    #[error("not a morphism: {0}")]
    NotAMorphism(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("document error at {path}: {message}")]
    Document { path: String, message: String },
}
