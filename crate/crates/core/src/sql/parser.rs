//! Recursive-descent parser for the Spider SQL subset.
//!
//! Produces an unresolved syntax tree; names are bound to the schema in
//! [`super::resolve`].

use super::lexer::{lex, Tok, Token};
use super::structure::{Agg, CmpOp, Conj, Direction, SetOp, UnitOp};
use super::SqlError;

#[derive(Debug, Clone)]
pub(crate) struct RawColRef {
    pub qualifier: Option<String>,
    /// `*` for the all-columns entry.
    pub name: String,
    pub pos: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct RawColUnit {
    pub agg: Agg,
    pub distinct: bool,
    pub col: RawColRef,
}

#[derive(Debug, Clone)]
pub(crate) struct RawValUnit {
    pub op: UnitOp,
    pub left: RawColUnit,
    pub right: Option<RawColUnit>,
}

#[derive(Debug, Clone)]
pub(crate) enum RawOperand {
    Value,
    Column(RawColUnit),
    Subquery(Box<RawQuery>),
}

#[derive(Debug, Clone)]
pub(crate) struct RawCondUnit {
    pub negated: bool,
    pub op: CmpOp,
    pub left: RawValUnit,
    pub right: RawOperand,
    pub right2: Option<RawOperand>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RawCondition {
    pub units: Vec<RawCondUnit>,
    pub conj: Vec<Conj>,
}

impl RawCondition {
    fn append(&mut self, link: Option<Conj>, other: RawCondition) {
        if let (Some(c), false) = (link, self.units.is_empty()) {
            self.conj.push(c);
        }
        self.units.extend(other.units);
        self.conj.extend(other.conj);
    }
}

#[derive(Debug, Clone)]
pub(crate) enum RawSource {
    Table { name: String, alias: Option<String>, pos: usize },
    Subquery { query: Box<RawQuery>, alias: Option<String> },
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RawSelect {
    pub distinct: bool,
    pub items: Vec<(Agg, RawValUnit)>,
    pub sources: Vec<RawSource>,
    pub join_conds: RawCondition,
    pub filter: RawCondition,
    pub group_by: Vec<RawColUnit>,
    pub having: RawCondition,
    pub order_by: Option<(Direction, Vec<RawValUnit>)>,
    pub limit: bool,
}

#[derive(Debug, Clone)]
pub(crate) struct RawQuery {
    pub body: RawSelect,
    pub set_op: Option<(SetOp, Box<RawQuery>)>,
}

const RESERVED: &[&str] = &[
    "select",
    "from",
    "where",
    "group",
    "having",
    "order",
    "limit",
    "intersect",
    "union",
    "except",
    "join",
    "on",
    "as",
    "and",
    "or",
    "not",
    "in",
    "like",
    "between",
    "is",
    "inner",
    "left",
    "right",
    "full",
    "outer",
    "cross",
    "natural",
    "by",
    "asc",
    "desc",
    "distinct",
    "null",
];

fn is_reserved(word: &str) -> bool {
    RESERVED.iter().any(|k| k.eq_ignore_ascii_case(word))
}

pub(crate) fn parse(src: &str) -> Result<RawQuery, SqlError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0, end: src.len() };
    let q = p.query()?;
    if let Some(t) = p.peek() {
        return Err(SqlError::Syntax {
            pos: t.pos,
            message: format!("unexpected {} after end of query", t.describe()),
        });
    }
    Ok(q)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    end: usize,
}

/// Select-list expressions may wrap a whole arithmetic unit in one aggregate.
enum AggExpr {
    Col(RawColUnit),
    Wrapped(Agg, RawValUnit),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.toks.get(self.i + k)
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_kw(kw))
    }

    fn at_sym(&self, sym: &str) -> bool {
        self.peek().is_some_and(|t| t.is_sym(sym))
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        let hit = self.at_kw(kw);
        if hit {
            self.i += 1;
        }
        hit
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        let hit = self.at_sym(sym);
        if hit {
            self.i += 1;
        }
        hit
    }

    fn err<T>(&self, expected: &str) -> Result<T, SqlError> {
        let found = self.peek().map_or_else(|| "end of query".to_owned(), Token::describe);
        Err(SqlError::Syntax { pos: self.pos(), message: format!("expected {expected}, found {found}") })
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), SqlError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.err(&kw.to_ascii_uppercase())
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), SqlError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            self.err(&format!("`{sym}`"))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), SqlError> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), pos }) if !is_reserved(s) => {
                let out = (s.clone(), *pos);
                self.i += 1;
                Ok(out)
            }
            _ => self.err("identifier"),
        }
    }

    fn query(&mut self) -> Result<RawQuery, SqlError> {
        if self.at_sym("(") && self.peek_at(1).is_some_and(|t| t.is_kw("select")) {
            self.i += 1;
            let inner = self.query()?;
            self.expect_sym(")")?;
            if inner.set_op.is_none() {
                return self.finish_query(inner.body);
            }
            return Ok(inner);
        }
        let body = self.select_block()?;
        self.finish_query(body)
    }

    fn finish_query(&mut self, body: RawSelect) -> Result<RawQuery, SqlError> {
        let op = if self.eat_kw("intersect") {
            Some(SetOp::Intersect)
        } else if self.eat_kw("union") {
            self.eat_kw("all");
            Some(SetOp::Union)
        } else if self.eat_kw("except") {
            Some(SetOp::Except)
        } else {
            None
        };
        let set_op = match op {
            Some(op) => Some((op, Box::new(self.query()?))),
            None => None,
        };
        Ok(RawQuery { body, set_op })
    }

    fn select_block(&mut self) -> Result<RawSelect, SqlError> {
        self.expect_kw("select")?;
        let mut sel = RawSelect { distinct: self.eat_kw("distinct"), ..Default::default() };
        loop {
            sel.items.push(self.select_item()?);
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_kw("from")?;
        self.parse_from(&mut sel)?;
        if self.eat_kw("where") {
            sel.filter = self.condition()?;
        }
        if self.eat_kw("group") {
            self.expect_kw("by")?;
            loop {
                sel.group_by.push(self.col_unit()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        if self.eat_kw("having") {
            sel.having = self.condition()?;
        }
        if self.eat_kw("order") {
            self.expect_kw("by")?;
            let mut direction = Direction::Asc;
            let mut items = Vec::new();
            loop {
                items.push(self.val_unit()?);
                if self.eat_kw("desc") {
                    direction = Direction::Desc;
                } else if self.eat_kw("asc") {
                    direction = Direction::Asc;
                }
                if !self.eat_sym(",") {
                    break;
                }
            }
            sel.order_by = Some((direction, items));
        }
        if self.eat_kw("limit") {
            match self.peek() {
                Some(Token { tok: Tok::Number(_), .. }) => self.i += 1,
                _ => return self.err("number after LIMIT"),
            }
            sel.limit = true;
        }
        Ok(sel)
    }

    fn select_item(&mut self) -> Result<(Agg, RawValUnit), SqlError> {
        let item = match self.agg_expr()? {
            Some(AggExpr::Wrapped(agg, vu)) => (agg, vu),
            Some(AggExpr::Col(cu)) => {
                let vu = self.val_unit_tail(cu)?;
                // A lone aggregated column lifts its aggregate to the item.
                if vu.right.is_none() && vu.left.agg != Agg::None {
                    let agg = vu.left.agg;
                    let left = RawColUnit { agg: Agg::None, ..vu.left };
                    (agg, RawValUnit { left, ..vu })
                } else {
                    (Agg::None, vu)
                }
            }
            None => (Agg::None, self.val_unit()?),
        };
        if self.eat_kw("as") {
            self.ident()?;
        }
        Ok(item)
    }

    /// `agg ( [DISTINCT] unit )` when the next tokens start an aggregate.
    fn agg_expr(&mut self) -> Result<Option<AggExpr>, SqlError> {
        let agg = match (self.peek(), self.peek_at(1)) {
            (Some(Token { tok: Tok::Ident(name), .. }), Some(next)) if next.is_sym("(") => match Agg::from_name(name) {
                Some(a) => a,
                None => return Ok(None),
            },
            _ => return Ok(None),
        };
        self.i += 2;
        let distinct = self.eat_kw("distinct");
        let inner = self.val_unit()?;
        self.expect_sym(")")?;
        if inner.right.is_none() && inner.left.agg == Agg::None {
            Ok(Some(AggExpr::Col(RawColUnit { agg, distinct: distinct || inner.left.distinct, col: inner.left.col })))
        } else {
            Ok(Some(AggExpr::Wrapped(agg, inner)))
        }
    }

    fn col_ref(&mut self) -> Result<RawColRef, SqlError> {
        let pos = self.pos();
        if self.eat_sym("*") {
            return Ok(RawColRef { qualifier: None, name: "*".into(), pos });
        }
        let (first, _) = self.ident()?;
        if self.eat_sym(".") {
            if self.eat_sym("*") {
                return Ok(RawColRef { qualifier: Some(first), name: "*".into(), pos });
            }
            let (name, _) = self.ident()?;
            return Ok(RawColRef { qualifier: Some(first), name, pos });
        }
        Ok(RawColRef { qualifier: None, name: first, pos })
    }

    fn col_unit(&mut self) -> Result<RawColUnit, SqlError> {
        let pos = self.pos();
        match self.agg_expr()? {
            Some(AggExpr::Col(cu)) => Ok(cu),
            Some(AggExpr::Wrapped(..)) => Err(SqlError::Syntax {
                pos,
                message: "aggregate over an arithmetic expression is only supported in SELECT".into(),
            }),
            None => {
                if self.at_sym("(") {
                    self.i += 1;
                    let cu = self.col_unit()?;
                    self.expect_sym(")")?;
                    return Ok(cu);
                }
                let distinct = self.eat_kw("distinct");
                Ok(RawColUnit { agg: Agg::None, distinct, col: self.col_ref()? })
            }
        }
    }

    fn unit_op(&mut self) -> UnitOp {
        let op = match self.peek().map(|t| &t.tok) {
            Some(Tok::Sym("+")) => UnitOp::Plus,
            Some(Tok::Sym("-")) => UnitOp::Minus,
            Some(Tok::Sym("*")) => UnitOp::Times,
            Some(Tok::Sym("/")) => UnitOp::Divide,
            _ => return UnitOp::None,
        };
        self.i += 1;
        op
    }

    fn val_unit(&mut self) -> Result<RawValUnit, SqlError> {
        if self.at_sym("(") && !self.peek_at(1).is_some_and(|t| t.is_kw("select")) {
            let save = self.i;
            self.i += 1;
            if let Ok(vu) = self.val_unit() {
                if self.eat_sym(")") {
                    return Ok(vu);
                }
            }
            self.i = save;
        }
        let left = self.col_unit()?;
        self.val_unit_tail(left)
    }

    fn val_unit_tail(&mut self, left: RawColUnit) -> Result<RawValUnit, SqlError> {
        let op = self.unit_op();
        if op == UnitOp::None {
            return Ok(RawValUnit { op, left, right: None });
        }
        let right = self.col_unit()?;
        Ok(RawValUnit { op, left, right: Some(right) })
    }

    fn alias(&mut self) -> Result<Option<String>, SqlError> {
        if self.eat_kw("as") {
            return Ok(Some(self.ident()?.0));
        }
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) if !is_reserved(s) => Ok(Some(self.ident()?.0)),
            _ => Ok(None),
        }
    }

    fn source(&mut self) -> Result<RawSource, SqlError> {
        if self.eat_sym("(") {
            let query = Box::new(self.query()?);
            self.expect_sym(")")?;
            let alias = self.alias()?;
            return Ok(RawSource::Subquery { query, alias });
        }
        let (name, pos) = self.ident()?;
        let alias = self.alias()?;
        Ok(RawSource::Table { name, alias, pos })
    }

    fn parse_from(&mut self, sel: &mut RawSelect) -> Result<(), SqlError> {
        sel.sources.push(self.source()?);
        loop {
            if self.eat_sym(",") {
                sel.sources.push(self.source()?);
                continue;
            }
            let save = self.i;
            let _ = self.eat_kw("natural");
            let _ = self.eat_kw("inner") || self.eat_kw("cross") || {
                let side = self.eat_kw("left") || self.eat_kw("right") || self.eat_kw("full");
                if side {
                    self.eat_kw("outer");
                }
                side
            };
            if !self.eat_kw("join") {
                self.i = save;
                break;
            }
            sel.sources.push(self.source()?);
            if self.eat_kw("on") {
                let cond = self.condition()?;
                sel.join_conds.append(Some(Conj::And), cond);
            }
        }
        Ok(())
    }

    fn condition(&mut self) -> Result<RawCondition, SqlError> {
        let mut cond = RawCondition::default();
        let mut link = None;
        loop {
            let item = self.condition_item()?;
            cond.append(link, item);
            link = if self.eat_kw("and") {
                Some(Conj::And)
            } else if self.eat_kw("or") {
                Some(Conj::Or)
            } else {
                break;
            };
        }
        Ok(cond)
    }

    /// One comparison, or a parenthesized group flattened into the list.
    fn condition_item(&mut self) -> Result<RawCondition, SqlError> {
        if self.at_sym("(") && !self.peek_at(1).is_some_and(|t| t.is_kw("select")) {
            let save = self.i;
            if let Ok(unit) = self.cond_unit() {
                return Ok(RawCondition { units: vec![unit], conj: vec![] });
            }
            self.i = save + 1;
            let inner = self.condition()?;
            self.expect_sym(")")?;
            return Ok(inner);
        }
        let unit = self.cond_unit()?;
        Ok(RawCondition { units: vec![unit], conj: vec![] })
    }

    fn cond_unit(&mut self) -> Result<RawCondUnit, SqlError> {
        let left = self.val_unit()?;
        if self.eat_kw("is") {
            let negated = self.eat_kw("not");
            self.expect_kw("null")?;
            return Ok(RawCondUnit { negated, op: CmpOp::Is, left, right: RawOperand::Value, right2: None });
        }
        let negated = self.eat_kw("not");
        let op = match self.peek().map(|t| &t.tok) {
            Some(Tok::Sym("=")) => CmpOp::Eq,
            Some(Tok::Sym("!=")) | Some(Tok::Sym("<>")) => CmpOp::Ne,
            Some(Tok::Sym(">")) => CmpOp::Gt,
            Some(Tok::Sym("<")) => CmpOp::Lt,
            Some(Tok::Sym(">=")) => CmpOp::Ge,
            Some(Tok::Sym("<=")) => CmpOp::Le,
            Some(Tok::Ident(k)) if k.eq_ignore_ascii_case("between") => CmpOp::Between,
            Some(Tok::Ident(k)) if k.eq_ignore_ascii_case("in") => CmpOp::In,
            Some(Tok::Ident(k)) if k.eq_ignore_ascii_case("like") => CmpOp::Like,
            _ => return self.err("comparison operator"),
        };
        if negated && !matches!(op, CmpOp::Between | CmpOp::In | CmpOp::Like) {
            return Err(SqlError::Syntax {
                pos: self.pos(),
                message: "NOT only combines with IN, LIKE, BETWEEN or IS NULL".into(),
            });
        }
        self.i += 1;
        let right = self.operand()?;
        let right2 = if op == CmpOp::Between {
            self.expect_kw("and")?;
            Some(self.operand()?)
        } else {
            None
        };
        Ok(RawCondUnit { negated, op, left, right, right2 })
    }

    fn operand(&mut self) -> Result<RawOperand, SqlError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Str(_)) | Some(Tok::Number(_)) => {
                self.i += 1;
                Ok(RawOperand::Value)
            }
            Some(Tok::Sym("-")) | Some(Tok::Sym("+"))
                if matches!(self.peek_at(1).map(|t| &t.tok), Some(Tok::Number(_))) =>
            {
                self.i += 2;
                Ok(RawOperand::Value)
            }
            Some(Tok::Sym("(")) => {
                if self.peek_at(1).is_some_and(|t| t.is_kw("select")) {
                    self.i += 1;
                    let q = self.query()?;
                    self.expect_sym(")")?;
                    return Ok(RawOperand::Subquery(Box::new(q)));
                }
                self.i += 1;
                loop {
                    self.operand()?;
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(")")?;
                Ok(RawOperand::Value)
            }
            Some(Tok::Ident(w)) if ["null", "true", "false"].iter().any(|k| w.eq_ignore_ascii_case(k)) => {
                self.i += 1;
                Ok(RawOperand::Value)
            }
            Some(_) => Ok(RawOperand::Column(self.col_unit()?)),
            None => self.err("value"),
        }
    }
}
