use std::path::PathBuf;

use litgraph_core::GraphError;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("invalid manifest {}: {reason}", path.display())]
    ManifestInvalid { path: PathBuf, reason: String },

    #[error("{}: header {found:?} does not match the declared columns {expected:?}", file.display())]
    HeaderMismatch { file: PathBuf, expected: Vec<String>, found: Vec<String> },

    #[error("{}:{line}: {message}", path.display())]
    ScriptParse { path: PathBuf, line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("could not start import workers: {0}")]
    Workers(String),

    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io { path: path.into(), source }
    }
}
