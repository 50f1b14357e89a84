use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the valid range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("not a physical error-rate vector: {0}")]
    UnphysicalErrorRates(String),
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{op} requires N = {expected} parties, got {found}")]
    PartyCount {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("sequence mixes the Z-basis (B, P) and X-basis (B', P') alphabets")]
    MixedAlphabet,
    #[error("invalid step sequence {0:?}")]
    InvalidSequence(String),
    #[error("degenerate state at step {step_index}: no surviving population")]
    Degenerate { step_index: usize },
    #[error("not CSS in this presentation: generator {index} mixes X and Z")]
    NotCss { index: usize },
    #[error("not a state (incomplete stabilizer): rank {rank} < {n_qubits} qubits")]
    IncompleteStabilizer { rank: usize, n_qubits: usize },
    #[error("generators {0} and {1} anticommute")]
    NonCommuting(usize, usize),
    #[error("stabilizer generators are linearly dependent")]
    DependentGenerators,
    #[error("not a complete CSS pair: {0}")]
    NotCompleteCssPair(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("sample shortfall at step {step_index}: {available} trios left, {needed} needed")]
    Shortfall {
        step_index: usize,
        available: usize,
        needed: usize,
    },
    #[error("{0}")]
    Domain(String),
}
