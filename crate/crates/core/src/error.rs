use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error(
        "graph has {n} vertices, above the dense eigendecomposition limit of {limit}; \
         use the Chebyshev engine instead"
    )]
    CapacityExceeded { n: usize, limit: usize },

    #[error("filter value at lambda = {lambda} is not finite; use a positive regularizer")]
    NonFiniteFilter { lambda: f64 },

    #[error("Chebyshev interval upper bound {bound} is below the spectrum estimate {estimate}")]
    IntervalTooSmall { bound: f64, estimate: f64 },

    #[error("column '{label}' has zero total mass")]
    ZeroMassColumn { label: String },

    #[error("negative entry {value} in column '{label}' at row {row}")]
    NegativeEntry {
        label: String,
        row: usize,
        value: f64,
    },

    #[error("witness function is undefined when both distributions are equal")]
    UndefinedWitness,

    #[error("witness function is undefined: distributions have unequal component mass")]
    InfiniteDistance,

    #[error("coupling marginals do not match the distributions (max deviation {deviation:e})")]
    InvalidCoupling { deviation: f64 },

    #[error("rank correlation is undefined: one input has zero rank variance")]
    UndefinedCorrelation,

    #[error(
        "spectrum has {zero_eigenvalues} numerically-zero eigenvalues but the graph has \
         {components} connected components; edge weights are too small to resolve"
    )]
    IllConditioned {
        zero_eigenvalues: usize,
        components: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
