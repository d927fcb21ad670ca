use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("directed cycle detected: {}", format_cycle(.cycle))]
    CycleDetected { cycle: Vec<usize> },

    #[error("ambiguous ancestral order: estimated ancestral edges contain the cycle {}", format_cycle(.cycle))]
    AmbiguousAncestralOrder { cycle: Vec<usize> },

    #[error("input vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample size {n} too small (need at least {min})")]
    SampleTooSmall { n: usize, min: usize },

    #[error("non-finite value encountered in input data")]
    NonFinite,

    #[error("significance level must lie strictly in (0, 1), got {alpha}")]
    DegenerateAlpha { alpha: f64 },

    #[error("matrix shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("gamma {gamma} out of range for candidate set of size {size}")]
    GammaOutOfRange { gamma: usize, size: usize },

    #[error("degenerate basis: column {column} is constant after centering")]
    DegenerateBasis { column: usize },

    #[error("column {column} declared binary contains a value other than 0 or 1")]
    NonBinaryValue { column: usize },

    #[error("column {column} has a single observed level; cannot dummy-encode")]
    SingleLevel { column: usize },

    #[error("basis for node {node} would have {size} columns, above the cap {cap}; lower the degree or raise gamma")]
    BasisTooLarge { node: usize, size: usize, cap: usize },

    #[error("node {node} has descendants but an empty candidate IV set; the moment system is not identified")]
    EmptyCandidateSet { node: usize },

    #[error("singular GMM normal matrix: the surrogate IVs carry no information about some effect (relevance failure)")]
    SingularNormalMatrix,

    #[error("sandwich variance is not positive semidefinite (min diagonal {min_diag:e})")]
    VarianceNotPsd { min_diag: f64 },

    #[error("standard error for edge ({k}, {j}) is zero; p-value undefined")]
    ZeroStdErr { k: usize, j: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_cycle(cycle: &[usize]) -> String {
    let mut s = String::new();
    for (i, node) in cycle.iter().enumerate() {
        if i > 0 {
            s.push_str(" -> ");
        }
        // 1-based in messages, matching serialized output
        s.push_str(&(node + 1).to_string());
    }
    s
}
