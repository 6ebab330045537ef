use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use super::{Example, SchemaSet};

/// Corpus-level counts in the layout of a dataset statistics table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub n_questions: usize,
    pub n_distinct_sql: usize,
    pub n_databases: usize,
    pub avg_tables_per_db: f64,
}

impl fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} / {} / {} / {:.2}",
            self.n_questions, self.n_distinct_sql, self.n_databases, self.avg_tables_per_db
        )
    }
}

/// Collapse whitespace and case-fold everything outside quoted literals.
pub fn normalize_sql(query: &str) -> String {
    let mut out = String::with_capacity(query.len());
    let mut quote: Option<char> = None;
    let mut pending_space = false;
    for c in query.chars() {
        match quote {
            Some(q) => {
                out.push(c);
                if c == q {
                    quote = None;
                }
            }
            None if c.is_whitespace() => pending_space = !out.is_empty(),
            None => {
                if pending_space {
                    out.push(' ');
                    pending_space = false;
                }
                if c == '\'' || c == '"' {
                    quote = Some(c);
                }
                out.extend(c.to_lowercase());
            }
        }
    }
    out
}

/// Counts over `examples`. Databases are those referenced by at least one
/// example; an empty corpus yields all zeros.
pub fn corpus_stats(examples: &[Example], schemas: &SchemaSet) -> CorpusStats {
    let distinct: HashSet<String> = examples.iter().map(|e| normalize_sql(&e.query)).collect();
    let dbs: BTreeSet<&str> = examples.iter().map(|e| e.db_id.as_str()).collect();
    let table_total: usize = dbs.iter().map(|id| schemas.get(id).map_or(0, |s| s.tables.len())).sum();
    CorpusStats {
        n_questions: examples.len(),
        n_distinct_sql: distinct.len(),
        n_databases: dbs.len(),
        avg_tables_per_db: if dbs.is_empty() { 0.0 } else { table_total as f64 / dbs.len() as f64 },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub disjoint: bool,
    pub overlap: BTreeSet<String>,
}

/// Databases shared between two splits.
pub fn check_split_disjoint(train: &[Example], test: &[Example]) -> SplitReport {
    let a: BTreeSet<&str> = train.iter().map(|e| e.db_id.as_str()).collect();
    let overlap: BTreeSet<String> =
        test.iter().map(|e| e.db_id.as_str()).filter(|id| a.contains(id)).map(str::to_owned).collect();
    SplitReport { disjoint: overlap.is_empty(), overlap }
}
