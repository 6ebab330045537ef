//! Cross-lingual text-to-SQL preprocessing and evaluation.
//!
//! The crate is split along the workflow a researcher follows:
//!
//! - [`dataset`] loads Spider-format schema and example files, tokenizes
//!   questions and computes corpus statistics.
//! - [`sql`] parses the Spider SQL subset into a canonical clause structure,
//!   classifies hardness and computes exact-match accuracy.
//! - [`embed`] supplies vectors for arbitrary text (file-backed store or a
//!   remote encoder) and the cosine math used for linking.
//! - [`linker`] builds the typed question/schema relation matrix, including
//!   cosine-match relations for questions whose language differs from the
//!   schema's.
//!
//! Batch entry points ([`sql::evaluate`], [`linker::link_corpus`]) fan out
//! with rayon when the `parallel` feature is enabled and fall back to a plain
//! iterator otherwise. Results never depend on the worker count.

pub mod dataset;
pub mod embed;
pub mod linker;
pub mod par;
pub mod sql;
pub mod text;

pub use dataset::{Example, Schema, SchemaSet};
pub use embed::{EmbeddingProvider, EmbeddingVector};
pub use linker::{LinkingConfig, RelationMatrix, RelationType};
pub use par::Exec;
pub use sql::{Hardness, SqlStruct};
