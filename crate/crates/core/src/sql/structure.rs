//! Canonical clause structure of a parsed query.
//!
//! Column and table references are schema indices, so aliases disappear
//! after parsing. Literal values collapse into [`Operand::Value`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::dataset::Schema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Agg {
    None,
    Max,
    Min,
    Count,
    Sum,
    Avg,
}

impl Agg {
    pub(crate) fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "max" => Agg::Max,
            "min" => Agg::Min,
            "count" => Agg::Count,
            "sum" => Agg::Sum,
            "avg" => Agg::Avg,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Agg::None => "",
            Agg::Max => "max",
            Agg::Min => "min",
            Agg::Count => "count",
            Agg::Sum => "sum",
            Agg::Avg => "avg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitOp {
    None,
    Minus,
    Plus,
    Times,
    Divide,
}

impl UnitOp {
    fn symbol(self) -> &'static str {
        match self {
            UnitOp::None => "",
            UnitOp::Minus => "-",
            UnitOp::Plus => "+",
            UnitOp::Times => "*",
            UnitOp::Divide => "/",
        }
    }
}

/// A possibly aggregated column. Column 0 is the all-columns entry `*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ColUnit {
    pub agg: Agg,
    pub column: usize,
    pub distinct: bool,
}

impl ColUnit {
    pub fn plain(column: usize) -> Self {
        ColUnit { agg: Agg::None, column, distinct: false }
    }
}

/// `left` or `left <op> right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ValUnit {
    pub op: UnitOp,
    pub left: ColUnit,
    pub right: Option<ColUnit>,
}

impl ValUnit {
    pub fn col(unit: ColUnit) -> Self {
        ValUnit { op: UnitOp::None, left: unit, right: None }
    }

    pub fn has_agg(&self) -> bool {
        self.left.agg != Agg::None || self.right.is_some_and(|r| r.agg != Agg::None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CmpOp {
    Between,
    Eq,
    Gt,
    Lt,
    Ge,
    Le,
    Ne,
    In,
    Like,
    Is,
}

impl CmpOp {
    fn keyword(self) -> &'static str {
        match self {
            CmpOp::Between => "BETWEEN",
            CmpOp::Eq => "=",
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Le => "<=",
            CmpOp::Ne => "!=",
            CmpOp::In => "IN",
            CmpOp::Like => "LIKE",
            CmpOp::Is => "IS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operand {
    /// Any literal. Values never take part in comparison.
    Value,
    Column(ColUnit),
    Subquery(Box<SqlStruct>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CondUnit {
    pub negated: bool,
    pub op: CmpOp,
    pub left: ValUnit,
    pub right: Operand,
    /// Upper bound of `BETWEEN`.
    pub right2: Option<Operand>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Conj {
    And,
    Or,
}

/// Flat condition list: `units[0] conj[0] units[1] conj[1] ...`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Condition {
    pub units: Vec<CondUnit>,
    pub conj: Vec<Conj>,
}

impl Condition {
    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    fn canonical(&self, strip_joins: bool) -> Condition {
        let mut units: Vec<CondUnit> = self
            .units
            .iter()
            .map(|u| CondUnit {
                right: u.right.canonical(strip_joins),
                right2: u.right2.as_ref().map(|o| o.canonical(strip_joins)),
                ..u.clone()
            })
            .collect();
        units.sort();
        let mut conj = self.conj.clone();
        conj.sort();
        Condition { units, conj }
    }

    fn subqueries(&self) -> impl Iterator<Item = &SqlStruct> {
        self.units.iter().flat_map(|u| std::iter::once(&u.right).chain(u.right2.as_ref())).filter_map(|o| match o {
            Operand::Subquery(q) => Some(q.as_ref()),
            _ => None,
        })
    }
}

impl Operand {
    fn canonical(&self, strip_joins: bool) -> Operand {
        match self {
            Operand::Subquery(q) => Operand::Subquery(Box::new(q.canonical_form(strip_joins))),
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Table(usize),
    Subquery(Box<SqlStruct>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct From {
    pub sources: Vec<Source>,
    /// `ON` conditions of all joins.
    pub conds: Condition,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Select {
    pub distinct: bool,
    pub items: Vec<(Agg, ValUnit)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Asc,
    Desc,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderBy {
    pub direction: Direction,
    pub items: Vec<ValUnit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Intersect,
    Union,
    Except,
}

impl SetOp {
    pub(crate) fn keyword(self) -> &'static str {
        match self {
            SetOp::Intersect => "INTERSECT",
            SetOp::Union => "UNION",
            SetOp::Except => "EXCEPT",
        }
    }
}

/// One query in clause-decomposed form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SqlStruct {
    pub select: Select,
    pub from: From,
    pub filter: Condition,
    pub group_by: Vec<ColUnit>,
    pub having: Condition,
    pub order_by: Option<OrderBy>,
    pub limit: bool,
    /// Right-hand side of `INTERSECT`/`UNION`/`EXCEPT`.
    pub set_op: Option<(SetOp, Box<SqlStruct>)>,
}

impl SqlStruct {
    /// Same query with every unordered clause sorted. Order-by keeps its
    /// sequence.
    pub fn canonical(&self) -> SqlStruct {
        self.canonical_form(false)
    }

    /// Canonical form without join conditions: the shape that exact match
    /// compares.
    pub(crate) fn comparison_form(&self) -> SqlStruct {
        self.canonical_form(true)
    }

    fn canonical_form(&self, strip_joins: bool) -> SqlStruct {
        let mut items = self.select.items.clone();
        items.sort();
        let mut sources: Vec<Source> = self
            .from
            .sources
            .iter()
            .map(|s| match s {
                Source::Subquery(q) => Source::Subquery(Box::new(q.canonical_form(strip_joins))),
                t => t.clone(),
            })
            .collect();
        sources.sort();
        let mut group_by = self.group_by.clone();
        group_by.sort();
        group_by.dedup();
        SqlStruct {
            select: Select { distinct: self.select.distinct, items },
            from: From {
                sources,
                conds: if strip_joins { Condition::default() } else { self.from.conds.canonical(false) },
            },
            filter: self.filter.canonical(strip_joins),
            group_by,
            having: self.having.canonical(strip_joins),
            order_by: self.order_by.clone(),
            limit: self.limit,
            set_op: self.set_op.as_ref().map(|(op, q)| (*op, Box::new(q.canonical_form(strip_joins)))),
        }
    }

    /// Sub-queries nested in join, where and having conditions.
    pub fn condition_subqueries(&self) -> impl Iterator<Item = &SqlStruct> {
        self.from.conds.subqueries().chain(self.filter.subqueries()).chain(self.having.subqueries())
    }

    /// Render back to SQL text. Every literal prints as `'value'`, columns are
    /// qualified with their table's original name.
    pub fn to_sql(&self, schema: &Schema) -> String {
        let mut out = String::new();
        self.write_sql(schema, &mut out);
        out
    }

    fn write_sql(&self, schema: &Schema, out: &mut String) {
        out.push_str("SELECT ");
        if self.select.distinct {
            out.push_str("DISTINCT ");
        }
        for (i, (agg, vu)) in self.select.items.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            if *agg == Agg::None {
                write_val_unit(schema, vu, out);
            } else {
                let _ = write!(out, "{}(", agg.name());
                write_val_unit(schema, vu, out);
                out.push(')');
            }
        }
        out.push_str(" FROM ");
        for (i, src) in self.from.sources.iter().enumerate() {
            if i > 0 {
                out.push_str(" JOIN ");
            }
            match src {
                Source::Table(t) => out.push_str(&schema.tables[*t].name_original),
                Source::Subquery(q) => {
                    out.push('(');
                    q.write_sql(schema, out);
                    out.push(')');
                }
            }
        }
        if !self.from.conds.is_empty() {
            out.push_str(" ON ");
            write_condition(schema, &self.from.conds, out);
        }
        if !self.filter.is_empty() {
            out.push_str(" WHERE ");
            write_condition(schema, &self.filter, out);
        }
        if !self.group_by.is_empty() {
            out.push_str(" GROUP BY ");
            for (i, cu) in self.group_by.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_col_unit(schema, cu, out);
            }
        }
        if !self.having.is_empty() {
            out.push_str(" HAVING ");
            write_condition(schema, &self.having, out);
        }
        if let Some(ob) = &self.order_by {
            out.push_str(" ORDER BY ");
            for (i, vu) in ob.items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_val_unit(schema, vu, out);
            }
            out.push_str(match ob.direction {
                Direction::Asc => " ASC",
                Direction::Desc => " DESC",
            });
        }
        if self.limit {
            out.push_str(" LIMIT 1");
        }
        if let Some((op, q)) = &self.set_op {
            let _ = write!(out, " {} ", op.keyword());
            q.write_sql(schema, out);
        }
    }
}

fn write_column(schema: &Schema, column: usize, out: &mut String) {
    let col = &schema.columns[column];
    match col.table {
        None => out.push('*'),
        Some(t) => {
            let _ = write!(out, "{}.{}", schema.tables[t].name_original, col.name_original);
        }
    }
}

fn write_col_unit(schema: &Schema, cu: &ColUnit, out: &mut String) {
    if cu.agg == Agg::None {
        if cu.distinct {
            out.push_str("DISTINCT ");
        }
        write_column(schema, cu.column, out);
    } else {
        let _ = write!(out, "{}(", cu.agg.name());
        if cu.distinct {
            out.push_str("DISTINCT ");
        }
        write_column(schema, cu.column, out);
        out.push(')');
    }
}

fn write_val_unit(schema: &Schema, vu: &ValUnit, out: &mut String) {
    write_col_unit(schema, &vu.left, out);
    if let Some(r) = &vu.right {
        let _ = write!(out, " {} ", vu.op.symbol());
        write_col_unit(schema, r, out);
    }
}

fn write_operand(schema: &Schema, op: &Operand, out: &mut String) {
    match op {
        Operand::Value => out.push_str("'value'"),
        Operand::Column(cu) => write_col_unit(schema, cu, out),
        Operand::Subquery(q) => {
            out.push('(');
            q.write_sql(schema, out);
            out.push(')');
        }
    }
}

fn write_condition(schema: &Schema, cond: &Condition, out: &mut String) {
    for (i, u) in cond.units.iter().enumerate() {
        if i > 0 {
            out.push_str(match cond.conj[i - 1] {
                Conj::And => " AND ",
                Conj::Or => " OR ",
            });
        }
        write_val_unit(schema, &u.left, out);
        if u.op == CmpOp::Is {
            out.push_str(if u.negated { " IS NOT NULL" } else { " IS NULL" });
            continue;
        }
        out.push(' ');
        if u.negated {
            out.push_str("NOT ");
        }
        out.push_str(u.op.keyword());
        out.push(' ');
        write_operand(schema, &u.right, out);
        if let Some(r2) = &u.right2 {
            out.push_str(" AND ");
            write_operand(schema, r2, out);
        }
    }
}
