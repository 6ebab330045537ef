//! Spider-subset SQL: parsing, hardness and exact-match evaluation.
//!
//! Queries are parsed against one [`Schema`](crate::dataset::Schema) so
//! aliases resolve to table and column indices. Keywords and identifiers
//! are case-insensitive, a trailing semicolon is accepted, and every literal
//! becomes the same placeholder: comparison is value-insensitive.

mod eval;
mod hardness;
mod lexer;
mod parser;
mod resolve;
mod structure;

pub use eval::{evaluate, exact_match, first_difference, Clause, EvalError, EvalReport, LevelStats, Mismatch};
pub use hardness::{hardness, Components, Hardness};
pub use structure::{
    Agg, CmpOp, ColUnit, CondUnit, Condition, Conj, Direction, From, Operand, OrderBy, Select, SetOp, Source,
    SqlStruct, UnitOp, ValUnit,
};

use crate::dataset::Schema;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SqlError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("cannot resolve {what} at byte {pos}")]
    Resolve { pos: usize, what: String },
}

/// Parse one SELECT statement and bind it to `schema`.
pub fn parse_sql(query: &str, schema: &Schema) -> Result<SqlStruct, SqlError> {
    let raw = parser::parse(query)?;
    resolve::resolve(&raw, schema)
}

#[cfg(test)]
pub(crate) mod tests;
