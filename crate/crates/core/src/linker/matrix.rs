use serde::{Deserialize, Serialize};

use super::relation::RelationType::{self, *};
use super::string::{Link, Linking};
use super::LinkError;
use crate::dataset::{Example, Schema};

/// A syntactic dependency between two question tokens, supplied externally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepEdge {
    pub head: usize,
    pub dependent: usize,
    #[serde(default)]
    pub label: String,
}

/// Dense relation matrix over question tokens, then tables, then columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrix {
    n_question: usize,
    n_table: usize,
    n_column: usize,
    cells: Vec<RelationType>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntegrityError {
    #[error("matrix has {found} cells, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("cell ({i}, {j}) is {found} but its mirror requires {expected}")]
    Asymmetric { i: usize, j: usize, found: RelationType, expected: RelationType },
    #[error("diagonal cell {i} is {found}")]
    Diagonal { i: usize, found: RelationType },
    #[error("cell ({i}, {j}) holds {found}, which does not belong in that block")]
    Block { i: usize, j: usize, found: RelationType },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Question,
    Table,
    Column,
}

fn link_relation(link: Link, column: bool) -> RelationType {
    match (link, column) {
        (Link::Exact, false) => QtExact,
        (Link::Partial, false) => QtPartial,
        (Link::Cosine, false) => QtCosine,
        (Link::None, false) => QtNone,
        (Link::Exact, true) => QcExact,
        (Link::Partial, true) => QcPartial,
        (Link::Cosine, true) => QcCosine,
        (Link::None, true) => QcNone,
    }
}

fn block_allows(row: Kind, col: Kind, r: RelationType) -> bool {
    use Kind::*;
    match (row, col) {
        (Question, Question) => {
            matches!(r, QqSelf | QqForward | QqBackward | QqDistant | QqDependencyForward | QqDependencyBackward)
        }
        (Question, Table) => matches!(r, QtExact | QtPartial | QtCosine | QtNone),
        (Question, Column) => matches!(r, QcExact | QcPartial | QcCosine | QcNone),
        (Table, Table) => matches!(r, TtSelf | TtForeignKey | TtNone),
        (Table, Column) => matches!(r, TcHasColumn | TcPrimaryKey | TcNone),
        (Column, Column) => matches!(r, CcSelf | CcForeignKeyForward | CcForeignKeyBackward | CcSameTable | CcNone),
        (Table, Question) | (Column, Question) | (Column, Table) => block_allows(col, row, r.inverse()),
    }
}

impl RelationMatrix {
    /// Assemble the matrix from a linking result and the schema structure.
    ///
    /// Question tokens relate by distance (±1 adjacent, else distant) unless
    /// a dependency edge overrides the pair; the first edge listed for a pair
    /// wins.
    pub fn assemble(linking: &Linking, schema: &Schema, deps: &[DepEdge]) -> Result<Self, LinkError> {
        let (nq, nt, nc) = (linking.n_question(), schema.tables.len(), schema.columns.len());
        if linking.n_table() != nt || linking.n_column() != nc {
            return Err(LinkError::Config(format!(
                "linking grid is {}×{} but schema `{}` has {nt} tables and {nc} columns",
                linking.n_table(),
                linking.n_column(),
                schema.db_id
            )));
        }
        let side = nq + nt + nc;
        let mut m = RelationMatrix { n_question: nq, n_table: nt, n_column: nc, cells: vec![QqSelf; side * side] };

        for i in 0..nq {
            for j in 0..nq {
                let r = match j as isize - i as isize {
                    0 => QqSelf,
                    1 => QqForward,
                    -1 => QqBackward,
                    _ => QqDistant,
                };
                m.cells[i * side + j] = r;
            }
        }
        let mut dep_set = vec![false; nq * nq];
        for e in deps {
            if e.head >= nq || e.dependent >= nq {
                return Err(LinkError::Dependency(format!(
                    "edge {}→{} outside a {nq}-token question",
                    e.head, e.dependent
                )));
            }
            if e.head == e.dependent || dep_set[e.head * nq + e.dependent] {
                continue;
            }
            dep_set[e.head * nq + e.dependent] = true;
            dep_set[e.dependent * nq + e.head] = true;
            m.put(e.head, e.dependent, QqDependencyForward);
        }

        for q in 0..nq {
            for t in 0..nt {
                m.put(q, nq + t, link_relation(linking.table(q, t), false));
            }
            for c in 0..nc {
                m.put(q, nq + nt + c, link_relation(linking.column(q, c), true));
            }
        }

        for t in 0..nt {
            for u in 0..nt {
                m.cells[(nq + t) * side + nq + u] = if t == u { TtSelf } else { TtNone };
            }
            for c in 0..nc {
                let r = match schema.columns[c].table {
                    Some(owner) if owner == t && schema.is_primary_key(c) => TcPrimaryKey,
                    Some(owner) if owner == t => TcHasColumn,
                    _ => TcNone,
                };
                m.put(nq + t, nq + nt + c, r);
            }
        }
        for a in 0..nc {
            for b in 0..nc {
                let r = match (schema.columns[a].table, schema.columns[b].table) {
                    _ if a == b => CcSelf,
                    (Some(x), Some(y)) if x == y => CcSameTable,
                    _ => CcNone,
                };
                m.cells[(nq + nt + a) * side + nq + nt + b] = r;
            }
        }
        let mut fk_set = vec![false; nc * nc];
        for &(from, to) in &schema.foreign_keys {
            if from == to || fk_set[from * nc + to] {
                continue;
            }
            fk_set[from * nc + to] = true;
            fk_set[to * nc + from] = true;
            m.put(nq + nt + from, nq + nt + to, CcForeignKeyForward);
            if let (Some(x), Some(y)) = (schema.columns[from].table, schema.columns[to].table) {
                if x != y {
                    m.put(nq + x, nq + y, TtForeignKey);
                }
            }
        }
        Ok(m)
    }

    fn put(&mut self, i: usize, j: usize, r: RelationType) {
        let side = self.side();
        self.cells[i * side + j] = r;
        self.cells[j * side + i] = r.inverse();
    }

    pub fn side(&self) -> usize {
        self.n_question + self.n_table + self.n_column
    }

    pub fn n_question(&self) -> usize {
        self.n_question
    }

    pub fn n_table(&self) -> usize {
        self.n_table
    }

    pub fn n_column(&self) -> usize {
        self.n_column
    }

    pub fn get(&self, i: usize, j: usize) -> RelationType {
        self.cells[i * self.side() + j]
    }

    /// Row-major cells.
    pub fn cells(&self) -> &[RelationType] {
        &self.cells
    }

    pub fn count(&self, r: RelationType) -> usize {
        self.cells.iter().filter(|c| **c == r).count()
    }

    fn kind(&self, i: usize) -> Kind {
        if i < self.n_question {
            Kind::Question
        } else if i < self.n_question + self.n_table {
            Kind::Table
        } else {
            Kind::Column
        }
    }

    /// Full scan: size, mirror symmetry under `inverse`, self types on the
    /// diagonal, and each cell's type belonging to its block.
    pub fn check_integrity(&self) -> Result<(), IntegrityError> {
        let side = self.side();
        if self.cells.len() != side * side {
            return Err(IntegrityError::Dimension { expected: side * side, found: self.cells.len() });
        }
        for i in 0..side {
            let diag = self.get(i, i);
            let expected = match self.kind(i) {
                Kind::Question => QqSelf,
                Kind::Table => TtSelf,
                Kind::Column => CcSelf,
            };
            if diag != expected {
                return Err(IntegrityError::Diagonal { i, found: diag });
            }
            for j in 0..side {
                let r = self.get(i, j);
                if !block_allows(self.kind(i), self.kind(j), r) {
                    return Err(IntegrityError::Block { i, j, found: r });
                }
                let mirror = self.get(j, i);
                if mirror != r.inverse() {
                    return Err(IntegrityError::Asymmetric { i, j, found: mirror, expected: r.inverse() });
                }
            }
        }
        Ok(())
    }

    /// Node labels in matrix order: `q:<token>`, `t:<table>`, `c:<table>.<column>`.
    pub fn labels(&self, tokens: &[String], schema: &Schema) -> Vec<String> {
        let mut out: Vec<String> = tokens.iter().map(|t| format!("q:{t}")).collect();
        out.extend(schema.tables.iter().map(|t| format!("t:{}", t.name_original)));
        out.extend(schema.columns.iter().map(|c| match c.table {
            Some(t) => format!("c:{}.{}", schema.tables[t].name_original, c.name_original),
            None => format!("c:{}", c.name_original),
        }));
        out
    }

    pub fn export(&self, example: &Example, schema: &Schema) -> MatrixExport {
        let side = self.side();
        MatrixExport {
            db_id: schema.db_id.clone(),
            question: example.question.clone(),
            labels: self.labels(&example.question_tokens, schema),
            side,
            n_question: self.n_question,
            n_table: self.n_table,
            n_column: self.n_column,
            cells: self.cells.chunks(side.max(1)).map(|row| row.iter().map(|r| r.id()).collect()).collect(),
        }
    }

    /// Inverse of [`RelationMatrix::export`]'s grid; checks integrity.
    pub fn from_export(doc: &MatrixExport) -> Result<Self, LinkError> {
        let mut cells = Vec::with_capacity(doc.side * doc.side);
        for row in &doc.cells {
            for &id in row {
                cells.push(
                    RelationType::from_id(id).ok_or_else(|| LinkError::Config(format!("unknown relation id {id}")))?,
                );
            }
        }
        let m = RelationMatrix { n_question: doc.n_question, n_table: doc.n_table, n_column: doc.n_column, cells };
        if m.side() != doc.side || doc.labels.len() != doc.side {
            return Err(LinkError::Config(format!("declared side {} disagrees with node counts", doc.side)));
        }
        m.check_integrity().map_err(|e| LinkError::Config(e.to_string()))?;
        Ok(m)
    }
}

/// One example's matrix in the on-disk export format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub db_id: String,
    pub question: String,
    pub labels: Vec<String>,
    pub side: usize,
    pub n_question: usize,
    pub n_table: usize,
    pub n_column: usize,
    pub cells: Vec<Vec<u8>>,
}
