//! Query language for litgraph: a read-only openCypher subset.
//!
//! Text is tokenized and parsed into a [`Query`], validated, planned into a
//! pipeline of physical operators and executed over a sealed
//! [`PropertyGraph`](litgraph_core::PropertyGraph). A deliberately naive
//! [`reference`] executor implements the same semantics by exhaustive
//! enumeration and serves as a test oracle.

pub mod ast;
pub mod error;
pub mod exec;
pub mod lexer;
pub mod parser;
pub mod plan;
pub mod reference;
pub mod validate;
pub mod value;

pub use ast::Query;
pub use error::{ParseError, QueryError};
pub use exec::{execute, execute_plan, execute_query, ExecOptions};
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::parse;
pub use plan::{plan, Plan, PlanOptions};
pub use reference::{execute_reference, execute_reference_with};
pub use value::{ResultTable, Value};
