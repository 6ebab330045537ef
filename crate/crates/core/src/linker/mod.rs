//! Question/schema relation matrices.
//!
//! A matrix covers question tokens, tables and columns of one example. Schema
//! structure comes from table membership and primary/foreign keys, question
//! structure from token distance (optionally overridden by supplied
//! dependency edges), and linking cells from name matching followed by a
//! cosine-match pass for cells that name matching left empty. The cosine pass
//! is what gives a question written in one language any link to a schema
//! named in another.

mod csr;
mod matrix;
mod relation;
mod string;

#[cfg(test)]
mod tests;

use serde::Serialize;

use crate::dataset::{Example, Schema, SchemaSet};
use crate::embed::{EmbedError, EmbeddingProvider};
use crate::par::Exec;

pub use csr::{csr_link, csr_texts, CsrCounts, EmbeddingIndex};
pub use matrix::{DepEdge, IntegrityError, MatrixExport, RelationMatrix};
pub use relation::{relation_catalog, CatalogEntry, RelationType};
pub use string::{string_link, Link, Linking};

/// Default cosine threshold.
pub const DEFAULT_TAU: f64 = 0.78;

#[derive(Debug, thiserror::Error)]
pub enum LinkError {
    #[error("invalid linking configuration: {0}")]
    Config(String),
    #[error("unknown database `{0}`")]
    UnknownDb(String),
    #[error("bad dependency edges: {0}")]
    Dependency(String),
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

/// Which question spans the cosine pass compares with schema names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SpanMode {
    #[default]
    SingleToken,
    /// Every contiguous span of 1..=k tokens.
    UpTo(usize),
}

/// Which schema name is embedded for the cosine pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SchemaNaming {
    #[default]
    Display,
    Original,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkingConfig {
    pub tau: f64,
    pub csr_enabled: bool,
    pub span_mode: SpanMode,
    pub schema_naming: SchemaNaming,
}

impl Default for LinkingConfig {
    fn default() -> Self {
        LinkingConfig {
            tau: DEFAULT_TAU,
            csr_enabled: true,
            span_mode: SpanMode::SingleToken,
            schema_naming: SchemaNaming::Display,
        }
    }
}

impl LinkingConfig {
    pub fn validate(&self) -> Result<(), LinkError> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(LinkError::Config(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        if self.span_mode == SpanMode::UpTo(0) {
            return Err(LinkError::Config("span length must be at least 1".into()));
        }
        Ok(())
    }
}

/// Matrix for one example, with an optional precomputed embedding index.
///
/// Without an index, or with CSR disabled, only name matching contributes
/// linking relations.
pub fn build_matrix_with(
    example: &Example,
    schema: &Schema,
    index: Option<&EmbeddingIndex>,
    config: &LinkingConfig,
    deps: &[DepEdge],
) -> Result<(RelationMatrix, CsrCounts), LinkError> {
    config.validate()?;
    if example.db_id != schema.db_id {
        return Err(LinkError::UnknownDb(example.db_id.clone()));
    }
    let mut linking = string_link(&example.question_tokens, schema);
    let counts = match index {
        Some(index) if config.csr_enabled => csr_link(&example.question_tokens, schema, index, config, &mut linking)?,
        _ => CsrCounts::default(),
    };
    Ok((RelationMatrix::assemble(&linking, schema, deps)?, counts))
}

/// Matrix for one example, embedding its texts through `provider` on demand.
pub fn build_matrix(
    example: &Example,
    schema: &Schema,
    provider: Option<&dyn EmbeddingProvider>,
    config: &LinkingConfig,
) -> Result<RelationMatrix, LinkError> {
    let index = match provider {
        Some(p) if config.csr_enabled => {
            Some(EmbeddingIndex::build(p, csr_texts(&example.question_tokens, schema, config))?)
        }
        _ => None,
    };
    Ok(build_matrix_with(example, schema, index.as_ref(), config, &[])?.0)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LinkStats {
    pub n_examples: usize,
    pub n_linked: usize,
    pub n_failed: usize,
    pub n_table_exact: usize,
    pub n_table_partial: usize,
    pub n_column_exact: usize,
    pub n_column_partial: usize,
    pub n_table_cosine: usize,
    pub n_column_cosine: usize,
    /// Over linked examples.
    pub per_example_avg_table: f64,
    pub per_example_avg_column: f64,
    /// Cosine-match relations, counted once per (token, item) pair.
    pub total_relations: usize,
    /// Per-example count of texts that had no vector, summed.
    pub n_skipped_texts: usize,
}

impl LinkStats {
    pub fn to_text(&self) -> String {
        format!(
            "examples {} (linked {}, failed {})\n\
             table links: exact {} / partial {} / cosine {} (avg {:.2} per example)\n\
             column links: exact {} / partial {} / cosine {} (avg {:.2} per example)\n\
             cosine relations total {}\n\
             texts without vectors {}\n",
            self.n_examples,
            self.n_linked,
            self.n_failed,
            self.n_table_exact,
            self.n_table_partial,
            self.n_table_cosine,
            self.per_example_avg_table,
            self.n_column_exact,
            self.n_column_partial,
            self.n_column_cosine,
            self.per_example_avg_column,
            self.total_relations,
            self.n_skipped_texts,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkFailure {
    pub index: usize,
    pub db_id: String,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct CorpusLink {
    /// One entry per input example; `None` where linking failed.
    pub matrices: Vec<Option<RelationMatrix>>,
    pub stats: LinkStats,
    pub failures: Vec<LinkFailure>,
}

/// Link every example.
///
/// All texts of the corpus are embedded in one provider call up front, so a
/// provider that is down fails the whole run; per-example problems (unknown
/// database, bad dependency edges) are collected instead. `deps`, when
/// given, holds one edge list per example.
pub fn link_corpus(
    examples: &[Example],
    schemas: &SchemaSet,
    provider: Option<&dyn EmbeddingProvider>,
    config: &LinkingConfig,
    deps: Option<&[Vec<DepEdge>]>,
    exec: Exec,
) -> Result<CorpusLink, LinkError> {
    config.validate()?;
    if let Some(d) = deps {
        if d.len() != examples.len() {
            return Err(LinkError::Dependency(format!("{} edge lists for {} examples", d.len(), examples.len())));
        }
    }
    let index = match provider {
        Some(p) if config.csr_enabled => {
            let texts = examples
                .iter()
                .filter_map(|ex| schemas.get(&ex.db_id).map(|s| csr_texts(&ex.question_tokens, s, config)))
                .flatten();
            Some(EmbeddingIndex::build(p, texts)?)
        }
        _ => None,
    };

    let results = exec.map(examples, |i, ex| {
        let schema = schemas.get(&ex.db_id).ok_or_else(|| LinkError::UnknownDb(ex.db_id.clone()))?;
        let edges = deps.map(|d| d[i].as_slice()).unwrap_or(&[]);
        let (m, counts) = build_matrix_with(ex, schema, index.as_ref(), config, edges)?;
        Ok::<_, LinkError>((m, counts))
    });

    let mut stats = LinkStats { n_examples: examples.len(), ..LinkStats::default() };
    let mut matrices = Vec::with_capacity(examples.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((m, counts)) => {
                stats.n_linked += 1;
                stats.n_table_exact += m.count(RelationType::QtExact);
                stats.n_table_partial += m.count(RelationType::QtPartial);
                stats.n_column_exact += m.count(RelationType::QcExact);
                stats.n_column_partial += m.count(RelationType::QcPartial);
                stats.n_table_cosine += counts.table;
                stats.n_column_cosine += counts.column;
                stats.n_skipped_texts += counts.skipped;
                matrices.push(Some(m));
            }
            Err(e) => {
                failures.push(LinkFailure { index: i, db_id: examples[i].db_id.clone(), message: e.to_string() });
                matrices.push(None);
            }
        }
    }
    stats.n_failed = failures.len();
    stats.total_relations = stats.n_table_cosine + stats.n_column_cosine;
    if stats.n_linked > 0 {
        stats.per_example_avg_table = stats.n_table_cosine as f64 / stats.n_linked as f64;
        stats.per_example_avg_column = stats.n_column_cosine as f64 / stats.n_linked as f64;
    }
    Ok(CorpusLink { matrices, stats, failures })
}
