//! Spider-format datasets: schemas, examples, tokenization and statistics.

mod example;
mod schema;
mod stats;
mod tokenize;

use std::path::PathBuf;

pub use example::{load_examples, load_examples_as, parse_examples, parse_examples_as, Example};
pub use schema::{load_schemas, parse_schemas, schemas_to_json, Column, ColumnType, Schema, SchemaSet, Table};
pub use stats::{check_split_disjoint, corpus_stats, normalize_sql, CorpusStats, SplitReport};
pub use tokenize::{tokenize, Language};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not a JSON array of records: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("record {index}{}: {message}", db_label(.db_id))]
    Record { index: usize, db_id: Option<String>, message: String },
    #[error("duplicate db_id `{0}`")]
    DuplicateDbId(String),
    #[error("example {position}: db_id `{db_id}` not found among loaded schemas")]
    UnknownDb { db_id: String, position: usize },
}

fn db_label(db_id: &Option<String>) -> String {
    match db_id {
        Some(id) => format!(" (db_id `{id}`)"),
        None => String::new(),
    }
}

pub type Result<T, E = DatasetError> = std::result::Result<T, E>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })
}
