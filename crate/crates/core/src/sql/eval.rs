//! Exact-match comparison and corpus evaluation.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;

use super::hardness::{hardness, Hardness};
use super::structure::SqlStruct;
use super::{parse_sql, SqlError};
use crate::dataset::{Example, SchemaSet};
use crate::par::Exec;

/// Clause at which a prediction first departs from the gold query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// The prediction did not parse against the gold schema.
    Unparsed,
    Select,
    From,
    Where,
    GroupBy,
    Having,
    OrderBy,
    Limit,
    SetOperation,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Unparsed => "unparsed",
            Clause::Select => "select",
            Clause::From => "from",
            Clause::Where => "where",
            Clause::GroupBy => "group_by",
            Clause::Having => "having",
            Clause::OrderBy => "order_by",
            Clause::Limit => "limit",
            Clause::SetOperation => "set_operation",
        })
    }
}

/// First clause where the two queries differ, or `None` on exact match.
pub fn first_difference(pred: &SqlStruct, gold: &SqlStruct) -> Option<Clause> {
    let (p, g) = (pred.comparison_form(), gold.comparison_form());
    if p.select != g.select {
        Some(Clause::Select)
    } else if p.from.sources != g.from.sources {
        Some(Clause::From)
    } else if p.filter != g.filter {
        Some(Clause::Where)
    } else if p.group_by != g.group_by {
        Some(Clause::GroupBy)
    } else if p.having != g.having {
        Some(Clause::Having)
    } else if p.order_by != g.order_by {
        Some(Clause::OrderBy)
    } else if p.limit != g.limit {
        Some(Clause::Limit)
    } else if p.set_op != g.set_op {
        Some(Clause::SetOperation)
    } else {
        None
    }
}

/// Clause-wise equality: unordered clauses compare as sets, order-by as a
/// sequence, set operations recursively. Join conditions and literal values
/// are not compared.
pub fn exact_match(pred: &SqlStruct, gold: &SqlStruct) -> bool {
    first_difference(pred, gold).is_none()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelStats {
    pub count: usize,
    pub matched: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub index: usize,
    pub clause: Clause,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n_examples: usize,
    pub n_matched: usize,
    /// Percentage in [0, 100].
    pub overall_accuracy: f64,
    pub per_level: BTreeMap<Hardness, LevelStats>,
    pub mismatches: Vec<Mismatch>,
}

fn pct(matched: usize, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        100.0 * matched as f64 / count as f64
    }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text table: one row per hardness level, then the total.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8} {:>6} {:>8} {:>9}", "level", "count", "matched", "accuracy");
        for level in Hardness::ALL {
            let s = &self.per_level[&level];
            let _ = writeln!(out, "{:<8} {:>6} {:>8} {:>9.2}", level.as_str(), s.count, s.matched, s.accuracy);
        }
        let _ =
            writeln!(out, "{:<8} {:>6} {:>8} {:>9.2}", "all", self.n_examples, self.n_matched, self.overall_accuracy);
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{predictions} predictions for {gold} gold examples")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("gold example {index}: db_id `{db_id}` has no schema")]
    UnknownDb { index: usize, db_id: String },
    #[error("gold example {index} does not parse: {source}")]
    Gold {
        index: usize,
        #[source]
        source: SqlError,
    },
}

struct Scored {
    level: Hardness,
    difference: Option<(Clause, Option<String>)>,
}

fn score_one(index: usize, predicted: &str, gold: &Example, schemas: &SchemaSet) -> Result<Scored, EvalError> {
    let schema = schemas.get(&gold.db_id).ok_or_else(|| EvalError::UnknownDb { index, db_id: gold.db_id.clone() })?;
    let gold_sql = parse_sql(&gold.query, schema).map_err(|source| EvalError::Gold { index, source })?;
    let level = hardness(&gold_sql);
    let difference = match parse_sql(predicted, schema) {
        Ok(pred) => first_difference(&pred, &gold_sql).map(|c| (c, None)),
        Err(e) => Some((Clause::Unparsed, Some(e.to_string()))),
    };
    Ok(Scored { level, difference })
}

/// Score predictions against gold examples. Predictions that fail to parse
/// count as mismatches; a gold query that fails to parse is an error.
pub fn evaluate<P>(
    predictions: &[P],
    gold: &[Example],
    schemas: &SchemaSet,
    exec: Exec,
) -> Result<EvalReport, EvalError>
where
    P: AsRef<str> + Sync,
{
    if predictions.len() != gold.len() {
        return Err(EvalError::LengthMismatch { predictions: predictions.len(), gold: gold.len() });
    }
    let scored = exec.map(gold, |i, g| score_one(i, predictions[i].as_ref(), g, schemas));

    let mut per_level: BTreeMap<Hardness, (usize, usize)> = Hardness::ALL.iter().map(|&h| (h, (0, 0))).collect();
    let mut mismatches = Vec::new();
    for (index, s) in scored.into_iter().enumerate() {
        let s = s?;
        let slot = per_level.get_mut(&s.level).expect("all levels present");
        slot.0 += 1;
        match s.difference {
            None => slot.1 += 1,
            Some((clause, detail)) => mismatches.push(Mismatch { index, clause, detail }),
        }
    }
    let n_examples = gold.len();
    let n_matched = n_examples - mismatches.len();
    Ok(EvalReport {
        n_examples,
        n_matched,
        overall_accuracy: pct(n_matched, n_examples),
        per_level: per_level
            .into_iter()
            .map(|(h, (count, matched))| (h, LevelStats { count, matched, accuracy: pct(matched, count) }))
            .collect(),
        mismatches,
    })
}
