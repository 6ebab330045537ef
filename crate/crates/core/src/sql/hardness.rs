use std::fmt;

use serde::{Deserialize, Serialize};

use super::structure::{Agg, CmpOp, Conj, SqlStruct};

/// Difficulty level by SQL component counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hardness {
    Easy,
    Medium,
    Hard,
    Extra,
}

impl Hardness {
    pub const ALL: [Hardness; 4] = [Hardness::Easy, Hardness::Medium, Hardness::Hard, Hardness::Extra];

    pub fn as_str(self) -> &'static str {
        match self {
            Hardness::Easy => "easy",
            Hardness::Medium => "medium",
            Hardness::Hard => "hard",
            Hardness::Extra => "extra",
        }
    }
}

impl fmt::Display for Hardness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Top-level component counts that drive the hardness level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Components {
    /// where, group by, order by, limit, each join, each `OR`, each `LIKE`.
    pub simple: usize,
    /// Nested sub-queries in conditions plus a set operation.
    pub nested: usize,
    /// Flags: >1 aggregation, >1 select item, >1 where condition,
    /// >1 group-by column.
    pub others: usize,
}

impl Components {
    pub fn of(sql: &SqlStruct) -> Self {
        let conditions = [&sql.from.conds, &sql.filter, &sql.having];

        let mut simple = usize::from(!sql.filter.is_empty())
            + usize::from(!sql.group_by.is_empty())
            + usize::from(sql.order_by.is_some())
            + usize::from(sql.limit)
            + sql.from.sources.len().saturating_sub(1);
        for c in conditions {
            simple += c.conj.iter().filter(|&&j| j == Conj::Or).count();
            simple += c.units.iter().filter(|u| u.op == CmpOp::Like).count();
        }

        let nested = sql.condition_subqueries().count() + usize::from(sql.set_op.is_some());

        let aggs = sql.select.items.iter().filter(|(agg, vu)| *agg != Agg::None || vu.has_agg()).count()
            + sql.filter.units.iter().filter(|u| u.left.has_agg()).count()
            + sql.group_by.iter().filter(|c| c.agg != Agg::None).count()
            + sql.order_by.as_ref().map_or(0, |o| o.items.iter().filter(|v| v.has_agg()).count())
            + sql.having.units.iter().filter(|u| u.left.has_agg()).count();
        let others = usize::from(aggs > 1)
            + usize::from(sql.select.items.len() > 1)
            + usize::from(sql.filter.units.len() > 1)
            + usize::from(sql.group_by.len() > 1);

        Components { simple, nested, others }
    }

    pub fn level(self) -> Hardness {
        let Components { simple: c1, nested: c2, others } = self;
        if c1 <= 1 && others == 0 && c2 == 0 {
            Hardness::Easy
        } else if c2 == 0 && ((others <= 2 && c1 <= 1) || (c1 <= 2 && others < 2)) {
            Hardness::Medium
        } else if c2 == 0 && ((others >= 2 && c1 <= 2) || (c1 == 3 && others <= 2))
            || (c1 <= 1 && others == 0 && c2 <= 1)
        {
            // `others >= 2` (rather than `> 2`) keeps the cell c1 = 2,
            // others = 2 at hard so that adding a component never lowers the
            // level.
            Hardness::Hard
        } else {
            Hardness::Extra
        }
    }
}

pub fn hardness(sql: &SqlStruct) -> Hardness {
    Components::of(sql).level()
}
