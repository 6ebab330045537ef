//! Binds parsed names to schema indices.

use super::parser::{RawColRef, RawColUnit, RawCondition, RawOperand, RawQuery, RawSource, RawValUnit};
use super::structure::{ColUnit, CondUnit, Condition, From, Operand, OrderBy, Select, Source, SqlStruct, ValUnit};
use super::SqlError;
use crate::dataset::Schema;

enum Target {
    Table(usize),
    Subquery(Box<SqlStruct>),
}

struct Entry {
    alias: Option<String>,
    target: Target,
}

/// FROM sources of one query block; inner blocks see outer frames too.
type Frame = Vec<Entry>;

pub(crate) fn resolve(raw: &RawQuery, schema: &Schema) -> Result<SqlStruct, SqlError> {
    Resolver { schema }.query(raw, &[])
}

struct Resolver<'s> {
    schema: &'s Schema,
}

impl Resolver<'_> {
    fn query(&self, raw: &RawQuery, outer: &[&Frame]) -> Result<SqlStruct, SqlError> {
        let body = &raw.body;
        let mut frame: Frame = Vec::with_capacity(body.sources.len());
        let mut sources = Vec::with_capacity(body.sources.len());
        for src in &body.sources {
            match src {
                RawSource::Table { name, alias, pos } => {
                    let t = self
                        .schema
                        .table_by_name(name)
                        .ok_or_else(|| SqlError::Resolve { pos: *pos, what: format!("table `{name}`") })?;
                    sources.push(Source::Table(t));
                    frame.push(Entry { alias: alias.clone(), target: Target::Table(t) });
                }
                RawSource::Subquery { query, alias } => {
                    let q = Box::new(self.query(query, outer)?);
                    sources.push(Source::Subquery(q.clone()));
                    frame.push(Entry { alias: alias.clone(), target: Target::Subquery(q) });
                }
            }
        }

        let mut scope: Vec<&Frame> = outer.to_vec();
        scope.push(&frame);

        let items = body
            .items
            .iter()
            .map(|(agg, vu)| Ok((*agg, self.val_unit(vu, &scope)?)))
            .collect::<Result<Vec<_>, SqlError>>()?;
        let join_conds = self.condition(&body.join_conds, &scope)?;
        let filter = self.condition(&body.filter, &scope)?;
        let group_by =
            body.group_by.iter().map(|cu| self.col_unit(cu, &scope)).collect::<Result<Vec<_>, SqlError>>()?;
        let having = self.condition(&body.having, &scope)?;
        let order_by = match &body.order_by {
            Some((direction, items)) => Some(OrderBy {
                direction: *direction,
                items: items.iter().map(|vu| self.val_unit(vu, &scope)).collect::<Result<Vec<_>, SqlError>>()?,
            }),
            None => None,
        };
        let set_op = match &raw.set_op {
            Some((op, rhs)) => Some((*op, Box::new(self.query(rhs, outer)?))),
            None => None,
        };

        Ok(SqlStruct {
            select: Select { distinct: body.distinct, items },
            from: From { sources, conds: join_conds },
            filter,
            group_by,
            having,
            order_by,
            limit: body.limit,
            set_op,
        })
    }

    fn condition(&self, raw: &RawCondition, scope: &[&Frame]) -> Result<Condition, SqlError> {
        let units = raw
            .units
            .iter()
            .map(|u| {
                Ok(CondUnit {
                    negated: u.negated,
                    op: u.op,
                    left: self.val_unit(&u.left, scope)?,
                    right: self.operand(&u.right, scope)?,
                    right2: u.right2.as_ref().map(|o| self.operand(o, scope)).transpose()?,
                })
            })
            .collect::<Result<Vec<_>, SqlError>>()?;
        Ok(Condition { units, conj: raw.conj.clone() })
    }

    fn operand(&self, raw: &RawOperand, scope: &[&Frame]) -> Result<Operand, SqlError> {
        Ok(match raw {
            RawOperand::Value => Operand::Value,
            RawOperand::Column(cu) => Operand::Column(self.col_unit(cu, scope)?),
            RawOperand::Subquery(q) => Operand::Subquery(Box::new(self.query(q, scope)?)),
        })
    }

    fn val_unit(&self, raw: &RawValUnit, scope: &[&Frame]) -> Result<ValUnit, SqlError> {
        Ok(ValUnit {
            op: raw.op,
            left: self.col_unit(&raw.left, scope)?,
            right: raw.right.as_ref().map(|r| self.col_unit(r, scope)).transpose()?,
        })
    }

    fn col_unit(&self, raw: &RawColUnit, scope: &[&Frame]) -> Result<ColUnit, SqlError> {
        Ok(ColUnit { agg: raw.agg, column: self.column(&raw.col, scope)?, distinct: raw.distinct })
    }

    fn column(&self, raw: &RawColRef, scope: &[&Frame]) -> Result<usize, SqlError> {
        let missing = || SqlError::Resolve {
            pos: raw.pos,
            what: match &raw.qualifier {
                Some(q) => format!("column `{q}.{}`", raw.name),
                None => format!("column `{}`", raw.name),
            },
        };
        if raw.name == "*" {
            if let Some(q) = &raw.qualifier {
                scope.iter().rev().find_map(|f| self.find_qualified(f, q)).ok_or_else(missing)?;
            }
            return Ok(0);
        }
        match &raw.qualifier {
            Some(q) => {
                let entry = scope.iter().rev().find_map(|f| self.find_qualified(f, q)).ok_or_else(missing)?;
                self.column_of(entry, &raw.name).ok_or_else(missing)
            }
            None => {
                scope.iter().rev().find_map(|f| f.iter().find_map(|e| self.column_of(e, &raw.name))).ok_or_else(missing)
            }
        }
    }

    /// Alias match first, then the table's own name.
    fn find_qualified<'f>(&self, frame: &'f Frame, qualifier: &str) -> Option<&'f Entry> {
        frame.iter().find(|e| e.alias.as_deref().is_some_and(|a| a.eq_ignore_ascii_case(qualifier))).or_else(|| {
            frame.iter().find(|e| match e.target {
                Target::Table(t) => self.schema.tables[t].name_original.eq_ignore_ascii_case(qualifier),
                Target::Subquery(_) => false,
            })
        })
    }

    fn column_of(&self, entry: &Entry, name: &str) -> Option<usize> {
        match &entry.target {
            Target::Table(t) => self.schema.column_in_table(*t, name),
            // A sub-query exposes the schema columns it selects.
            Target::Subquery(q) => q.select.items.iter().find_map(|(_, vu)| {
                let c = vu.left.column;
                self.schema.columns[c].name_original.eq_ignore_ascii_case(name).then_some(c)
            }),
        }
    }
}
