use crate::lexer::LexError;
use crate::value::ResultTable;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    /// Token descriptions that would have been accepted here.
    pub expected: Vec<String>,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError { offset: e.offset, message: e.message, expected: Vec::new() }
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum QueryError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),

    #[error("invalid query: {0}")]
    Semantic(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    /// The result had more rows than allowed; carries the first `max_rows`.
    #[error("result exceeds the row cap of {}", .0.rows.len())]
    RowLimitExceeded(Box<ResultTable>),

    #[error("query exceeded its time limit")]
    Timeout,

    #[error("reference executor gave up after exploring {0} node bindings")]
    OracleTooLarge(usize),
}
