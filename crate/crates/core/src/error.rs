use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("path is not simple: node `{0}` appears more than once")]
    NonSimplePath(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("graph is not complete: {0}")]
    IncompleteGraph(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("refusing exhaustive enumeration over {nodes} nodes (cap is {cap})")]
    OracleCap { nodes: usize, cap: usize },

    #[error("Sinkhorn scaling did not converge after {iterations} sweeps (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape `{id}`: {source}")]
    Shape {
        id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("edge {from} -> {to}: {source}")]
    Pair {
        from: String,
        to: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The innermost error, looking through shape and pair context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Shape { source, .. } | Error::Pair { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit status: 2 for bad input, 3 for infeasible queries,
    /// 4 for convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Infeasible(_) => 3,
            Error::Convergence { .. } => 4,
            _ => 2,
        }
    }

    /// Short machine-readable tag used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self.root() {
            Error::DimensionMismatch { .. } => "dimension",
            Error::InvalidMatrix(_) => "matrix",
            Error::NonSimplePath(_) => "non-simple-path",
            Error::UnknownNode(_) => "unknown-node",
            Error::IncompleteGraph(_) => "incomplete-graph",
            Error::InvalidGraph(_) => "graph",
            Error::Usage(_) => "usage",
            Error::Infeasible(_) => "infeasible",
            Error::OracleCap { .. } => "oracle-cap",
            Error::Convergence { .. } => "convergence",
            Error::InvalidInput(_) => "input",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Shape { .. } | Error::Pair { .. } => unreachable!(),
        }
    }
}
