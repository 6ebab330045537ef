use serde::Serialize;

/// Edge label between two nodes of the question/schema graph.
///
/// Names read `<row kind>-<column kind>-<relation>`: the cell at row `i`,
/// column `j` describes how node `i` relates to node `j`. The `*-none`
/// schema-structure variants fill cells that carry no edge so the matrix
/// stays dense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum RelationType {
    QqSelf,
    QqForward,
    QqBackward,
    QqDistant,
    QqDependencyForward,
    QqDependencyBackward,

    QtExact,
    QtPartial,
    QtCosine,
    QtNone,
    TqExact,
    TqPartial,
    TqCosine,
    TqNone,

    QcExact,
    QcPartial,
    QcCosine,
    QcNone,
    CqExact,
    CqPartial,
    CqCosine,
    CqNone,

    TcHasColumn,
    TcPrimaryKey,
    TcNone,
    CtHasColumn,
    CtPrimaryKey,
    CtNone,

    CcSelf,
    CcForeignKeyForward,
    CcForeignKeyBackward,
    CcSameTable,
    CcNone,

    TtSelf,
    TtForeignKey,
    TtNone,
}

use RelationType::*;

impl RelationType {
    pub const ALL: [RelationType; 36] = [
        QqSelf,
        QqForward,
        QqBackward,
        QqDistant,
        QqDependencyForward,
        QqDependencyBackward,
        QtExact,
        QtPartial,
        QtCosine,
        QtNone,
        TqExact,
        TqPartial,
        TqCosine,
        TqNone,
        QcExact,
        QcPartial,
        QcCosine,
        QcNone,
        CqExact,
        CqPartial,
        CqCosine,
        CqNone,
        TcHasColumn,
        TcPrimaryKey,
        TcNone,
        CtHasColumn,
        CtPrimaryKey,
        CtNone,
        CcSelf,
        CcForeignKeyForward,
        CcForeignKeyBackward,
        CcSameTable,
        CcNone,
        TtSelf,
        TtForeignKey,
        TtNone,
    ];

    /// Stable numeric id used in exported grids.
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn inverse(self) -> Self {
        match self {
            QqSelf => QqSelf,
            QqForward => QqBackward,
            QqBackward => QqForward,
            QqDistant => QqDistant,
            QqDependencyForward => QqDependencyBackward,
            QqDependencyBackward => QqDependencyForward,
            QtExact => TqExact,
            QtPartial => TqPartial,
            QtCosine => TqCosine,
            QtNone => TqNone,
            TqExact => QtExact,
            TqPartial => QtPartial,
            TqCosine => QtCosine,
            TqNone => QtNone,
            QcExact => CqExact,
            QcPartial => CqPartial,
            QcCosine => CqCosine,
            QcNone => CqNone,
            CqExact => QcExact,
            CqPartial => QcPartial,
            CqCosine => QcCosine,
            CqNone => QcNone,
            TcHasColumn => CtHasColumn,
            TcPrimaryKey => CtPrimaryKey,
            TcNone => CtNone,
            CtHasColumn => TcHasColumn,
            CtPrimaryKey => TcPrimaryKey,
            CtNone => TcNone,
            CcSelf => CcSelf,
            CcForeignKeyForward => CcForeignKeyBackward,
            CcForeignKeyBackward => CcForeignKeyForward,
            CcSameTable => CcSameTable,
            CcNone => CcNone,
            TtSelf => TtSelf,
            TtForeignKey => TtForeignKey,
            TtNone => TtNone,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QqSelf => "question-question-self",
            QqForward => "question-question-adjacent-forward",
            QqBackward => "question-question-adjacent-backward",
            QqDistant => "question-question-distant",
            QqDependencyForward => "question-question-dependency-forward",
            QqDependencyBackward => "question-question-dependency-backward",
            QtExact => "question-table-exact-match",
            QtPartial => "question-table-partial-match",
            QtCosine => "question-table-cosine-match",
            QtNone => "question-table-no-match",
            TqExact => "table-question-exact-match",
            TqPartial => "table-question-partial-match",
            TqCosine => "table-question-cosine-match",
            TqNone => "table-question-no-match",
            QcExact => "question-column-exact-match",
            QcPartial => "question-column-partial-match",
            QcCosine => "question-column-cosine-match",
            QcNone => "question-column-no-match",
            CqExact => "column-question-exact-match",
            CqPartial => "column-question-partial-match",
            CqCosine => "column-question-cosine-match",
            CqNone => "column-question-no-match",
            TcHasColumn => "table-column-has-column",
            TcPrimaryKey => "table-column-primary-key",
            TcNone => "table-column-none",
            CtHasColumn => "column-table-has-column",
            CtPrimaryKey => "column-table-primary-key",
            CtNone => "column-table-none",
            CcSelf => "column-column-self",
            CcForeignKeyForward => "column-column-foreign-key-forward",
            CcForeignKeyBackward => "column-column-foreign-key-backward",
            CcSameTable => "column-column-same-table",
            CcNone => "column-column-none",
            TtSelf => "table-table-self",
            TtForeignKey => "table-table-foreign-key-link",
            TtNone => "table-table-none",
        }
    }

    /// True for the question/schema cells produced by linking.
    pub fn is_linking(self) -> bool {
        matches!(self, QtExact | QtPartial | QtCosine | QtNone | TqExact | TqPartial | TqCosine | TqNone)
            || matches!(self, QcExact | QcPartial | QcCosine | QcNone | CqExact | CqPartial | CqCosine | CqNone)
    }

    /// Linking relations other than no-match.
    pub fn is_match(self) -> bool {
        self.is_linking() && !matches!(self, QtNone | TqNone | QcNone | CqNone)
    }
}

impl std::fmt::Display for RelationType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RelationType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub id: u8,
    pub name: &'static str,
    pub inverse: u8,
}

/// Id ↔ name table shipped next to exported matrices.
pub fn relation_catalog() -> Vec<CatalogEntry> {
    RelationType::ALL.iter().map(|r| CatalogEntry { id: r.id(), name: r.name(), inverse: r.inverse().id() }).collect()
}
