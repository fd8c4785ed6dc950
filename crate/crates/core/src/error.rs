use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("objective {objective}: value {value} outside [{min}, {max}]")]
    OutOfRange {
        objective: usize,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("objective {objective}: value {value} is not on the lattice (step {resolution})")]
    Quantization {
        objective: usize,
        value: f64,
        resolution: f64,
    },
    #[error("distribution is empty (no observations)")]
    EmptyDistribution,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid probability mass: {0}")]
    InvalidMass(String),
    #[error("empty candidate list")]
    NoCandidates,
    #[error("index {index} out of range for {len} arms")]
    InvalidArm { index: usize, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{path}: probabilities sum to {sum}, expected 1")]
    ProbabilitySum { path: String, sum: f64 },
    #[error("{path}: {source}")]
    Outcome {
        path: String,
        #[source]
        source: Box<Error>,
    },
    #[error("duplicate arm name {name:?} at arms[{index}]")]
    DuplicateArmName { name: String, index: usize },
    #[error("true_esr_set: unknown arm {0:?}")]
    UnknownArm(String),
    #[error(
        "true_esr_set {declared:?} does not match the ESR set computed from the arms {computed:?}"
    )]
    EsrSetMismatch {
        declared: Vec<String>,
        computed: Vec<String>,
    },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
