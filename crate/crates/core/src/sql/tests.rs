use std::path::Path;

use proptest::prelude::*;

use super::*;
use crate::dataset::{parse_schemas, Example, Schema, SchemaSet};
use crate::par::Exec;

pub(crate) const MANUFACTORY: &str = r#"[{
    "db_id": "manufactory_1",
    "table_names": ["manufacturers", "products"],
    "table_names_original": ["Manufacturers", "Products"],
    "column_names": [[-1, "*"], [0, "code"], [0, "name"], [0, "headquarter"], [0, "founder"], [0, "revenue"],
                     [1, "code"], [1, "name"], [1, "price"], [1, "manufacturer"]],
    "column_names_original": [[-1, "*"], [0, "Code"], [0, "Name"], [0, "Headquarter"], [0, "Founder"], [0, "Revenue"],
                              [1, "Code"], [1, "Name"], [1, "Price"], [1, "Manufacturer"]],
    "column_types": ["text", "number", "text", "text", "text", "number", "number", "text", "number", "number"],
    "primary_keys": [1, 6],
    "foreign_keys": [[9, 1]]
}]"#;

const SAMPLE_1: &str = "SELECT count(*) FROM products";
const SAMPLE_2: &str = "SELECT count(*) , T2.name FROM products AS T1 JOIN manufacturers AS T2 ON T1.Manufacturer = T2.code GROUP BY T2.name";

const MANUFACTURERS: usize = 0;
const PRODUCTS: usize = 1;
const M_NAME: usize = 2;
const P_PRICE: usize = 8;

fn schemas() -> SchemaSet {
    parse_schemas(MANUFACTORY, Path::new("manufactory.json")).unwrap()
}

fn schema() -> Schema {
    schemas().into_vec().remove(0)
}

fn p(q: &str) -> SqlStruct {
    parse_sql(q, &schema()).unwrap_or_else(|e| panic!("{q}: {e}"))
}

fn matches(a: &str, b: &str) -> bool {
    exact_match(&p(a), &p(b))
}

#[test]
fn sample_one_structure() {
    let s = p(SAMPLE_1);
    assert_eq!(s.select.items, vec![(Agg::Count, ValUnit::col(ColUnit::plain(0)))]);
    assert!(!s.select.distinct);
    assert_eq!(s.from.sources, vec![Source::Table(PRODUCTS)]);
    assert!(s.from.conds.is_empty() && s.filter.is_empty() && s.having.is_empty());
    assert!(s.group_by.is_empty() && s.order_by.is_none() && !s.limit && s.set_op.is_none());
}

#[test]
fn sample_two_structure() {
    let s = p(SAMPLE_2);
    assert_eq!(
        s.select.items,
        vec![(Agg::Count, ValUnit::col(ColUnit::plain(0))), (Agg::None, ValUnit::col(ColUnit::plain(M_NAME))),]
    );
    assert_eq!(s.from.sources, vec![Source::Table(PRODUCTS), Source::Table(MANUFACTURERS)]);
    assert_eq!(
        s.from.conds.units,
        vec![CondUnit {
            negated: false,
            op: CmpOp::Eq,
            left: ValUnit::col(ColUnit::plain(9)),
            right: Operand::Column(ColUnit::plain(1)),
            right2: None,
        }]
    );
    assert_eq!(s.group_by, vec![ColUnit::plain(M_NAME)]);
}

#[test]
fn literal_values_are_placeholders() {
    assert_eq!(p("SELECT name FROM products WHERE code = 5"), p("SELECT name FROM products WHERE code = 7"));
    assert_eq!(
        p("SELECT name FROM products WHERE name = 'a' OR price BETWEEN 1 AND 2.5"),
        p("select NAME from PRODUCTS where NAME = \"zzz\" or PRICE between -3 and 9;")
    );
}

/// Every permutation of the select list matches every other.
#[test]
fn select_order_is_a_set() {
    let cols = ["name", "price", "code"];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let queries: Vec<String> = perms
        .iter()
        .map(|pm| format!("SELECT {}, {}, {} FROM products", cols[pm[0]], cols[pm[1]], cols[pm[2]]))
        .collect();
    for a in &queries {
        for b in &queries {
            assert!(matches(a, b), "{a} vs {b}");
        }
    }
    assert!(matches("SELECT name, price FROM products", "SELECT price, name FROM products"));
}

#[test]
fn distinct_samples_do_not_match() {
    assert!(!matches(SAMPLE_1, SAMPLE_2));
    assert!(matches(SAMPLE_2, SAMPLE_2));
}

#[test]
fn alias_renaming_and_join_order() {
    assert!(matches(
        SAMPLE_2,
        "SELECT X.name, count(*) FROM manufacturers AS X JOIN products AS Y ON Y.manufacturer = X.code GROUP BY X.name"
    ));
    assert!(matches(
        SAMPLE_2,
        "SELECT count(*), manufacturers.name FROM products JOIN manufacturers ON products.manufacturer = manufacturers.code GROUP BY manufacturers.name"
    ));
}

#[test]
fn mutations_break_the_match() {
    let base = "SELECT name FROM products WHERE price > 10 ORDER BY price DESC LIMIT 3";
    assert!(!matches(base, "SELECT name FROM products WHERE price > 10 ORDER BY price ASC LIMIT 3"));
    assert!(!matches(base, "SELECT DISTINCT name FROM products WHERE price > 10 ORDER BY price DESC LIMIT 3"));
    assert!(!matches(base, "SELECT name FROM products WHERE price > 10 ORDER BY price DESC"));
    assert!(!matches(base, "SELECT name FROM products WHERE price < 10 ORDER BY price DESC LIMIT 3"));
    assert!(!matches("SELECT max(price) FROM products", "SELECT min(price) FROM products"));
    assert!(!matches("SELECT name FROM products", "SELECT name FROM manufacturers"));
}

#[test]
fn order_by_is_a_sequence() {
    assert!(!matches(
        "SELECT name FROM products ORDER BY name, price",
        "SELECT name FROM products ORDER BY price, name"
    ));
}

#[test]
fn first_difference_reports_clause() {
    let d = |a: &str, b: &str| first_difference(&p(a), &p(b));
    assert_eq!(d(SAMPLE_1, SAMPLE_1), None);
    assert_eq!(d(SAMPLE_1, "SELECT count(*) FROM manufacturers"), Some(Clause::From));
    assert_eq!(d("SELECT name FROM products", "SELECT name FROM products WHERE price > 1"), Some(Clause::Where));
    assert_eq!(
        d("SELECT name FROM products ORDER BY price", "SELECT name FROM products ORDER BY price LIMIT 1"),
        Some(Clause::Limit)
    );
    assert_eq!(
        d("SELECT name FROM products", "SELECT name FROM products UNION SELECT name FROM manufacturers"),
        Some(Clause::SetOperation)
    );
}

#[test]
fn nested_queries_resolve_with_outer_scope() {
    let s = p("SELECT name FROM products WHERE price > (SELECT avg(price) FROM products) AND manufacturer IN (SELECT code FROM manufacturers WHERE revenue > 100)");
    assert_eq!(s.condition_subqueries().count(), 2);
    let sub = s.condition_subqueries().next().unwrap();
    assert_eq!(sub.select.items, vec![(Agg::Avg, ValUnit::col(ColUnit::plain(P_PRICE)))]);
    // correlated reference to the outer alias
    let c = p("SELECT T1.name FROM manufacturers AS T1 WHERE T1.code IN (SELECT manufacturer FROM products AS T2 WHERE T2.price > T1.revenue)");
    let inner = c.condition_subqueries().next().unwrap();
    assert_eq!(inner.filter.units[0].right, Operand::Column(ColUnit::plain(5)));
}

#[test]
fn from_subquery_columns_resolve() {
    let s = p("SELECT T.name FROM (SELECT name, price FROM products) AS T WHERE T.price > 3");
    assert!(matches!(s.from.sources[0], Source::Subquery(_)));
    assert_eq!(s.select.items[0].1.left.column, 7);
}

#[test]
fn resolution_errors() {
    let sch = schema();
    assert!(matches!(parse_sql("SELECT name FROM nowhere", &sch), Err(SqlError::Resolve { pos: 17, .. })));
    assert!(matches!(parse_sql("SELECT colour FROM products", &sch), Err(SqlError::Resolve { pos: 7, .. })));
    assert!(matches!(parse_sql("SELECT T9.name FROM products AS T1", &sch), Err(SqlError::Resolve { .. })));
    assert!(matches!(parse_sql("SELECT 1", &sch), Err(SqlError::Syntax { .. })));
}

const ROUND_TRIP: &[&str] = &[
    SAMPLE_1,
    SAMPLE_2,
    "SELECT DISTINCT name FROM products WHERE price BETWEEN 1 AND 2 OR name LIKE '%x%' ORDER BY price DESC LIMIT 5",
    "SELECT name, max(price) - min(price), sum(price * code) FROM products GROUP BY name HAVING count(*) > 2",
    "SELECT name FROM products WHERE manufacturer NOT IN (SELECT code FROM manufacturers) INTERSECT SELECT name FROM products WHERE price IS NOT NULL",
    "SELECT count(DISTINCT founder) FROM manufacturers WHERE revenue >= (SELECT avg(revenue) FROM manufacturers)",
    "SELECT T1.name FROM manufacturers AS T1 JOIN products AS T2 ON T1.code = T2.manufacturer AND T2.price > 3 EXCEPT SELECT name FROM manufacturers",
];

#[test]
fn unparse_reparse_is_idempotent() {
    let sch = schema();
    for q in ROUND_TRIP {
        let c = p(q).canonical();
        let text = c.to_sql(&sch);
        let again = parse_sql(&text, &sch).unwrap_or_else(|e| panic!("{text}: {e}")).canonical();
        assert_eq!(c, again, "{text}");
        assert!(exact_match(&p(q), &again));
    }
}

#[test]
fn hardness_examples() {
    assert_eq!(hardness(&p(SAMPLE_1)), Hardness::Easy);
    assert_eq!(hardness(&p(SAMPLE_2)), Hardness::Medium);
    let extra = "SELECT name FROM products WHERE price > (SELECT avg(price) FROM products) \
                 AND code NOT IN (SELECT code FROM products WHERE price < 10) AND name LIKE '%a%' \
                 EXCEPT SELECT name FROM products WHERE manufacturer = 1";
    let c = Components::of(&p(extra));
    assert_eq!(c.nested, 3);
    assert_eq!(hardness(&p(extra)), Hardness::Extra);
}

#[test]
fn hardness_grows_with_components() {
    let chain = [
        "SELECT name FROM products",
        "SELECT name FROM products WHERE price > 1",
        "SELECT name FROM products WHERE price > 1 AND code < 3",
        "SELECT name, count(*) FROM products WHERE price > 1 AND code < 3 GROUP BY name",
        "SELECT name, count(*) FROM products WHERE price > 1 AND code < 3 GROUP BY name, code",
        "SELECT name, count(*) FROM products WHERE price > 1 AND code < 3 AND code IN (SELECT code FROM products) GROUP BY name, code",
    ];
    let levels: Vec<Hardness> = chain.iter().map(|q| hardness(&p(q))).collect();
    assert!(levels.windows(2).all(|w| w[0] <= w[1]), "{levels:?}");
}

fn gold(query: &str) -> Example {
    Example {
        question: "q".into(),
        question_tokens: vec!["q".into()],
        query: query.into(),
        db_id: "manufactory_1".into(),
    }
}

fn fixture_golds() -> Vec<Example> {
    ROUND_TRIP
        .iter()
        .chain(&[
            "SELECT name FROM manufacturers",
            "SELECT price FROM products ORDER BY price",
            "SELECT founder FROM manufacturers WHERE revenue > 5",
        ])
        .map(|q| gold(q))
        .collect()
}

#[test]
fn evaluate_gold_against_itself() {
    let golds = fixture_golds();
    let preds: Vec<&str> = golds.iter().map(|g| g.query.as_str()).collect();
    for exec in [Exec::Sequential, Exec::Parallel] {
        let r = evaluate(&preds, &golds, &schemas(), exec).unwrap();
        assert_eq!(r.overall_accuracy, 100.0);
        assert!(r.mismatches.is_empty());
        assert_eq!(r.per_level.len(), 4);
    }
}

#[test]
fn evaluate_half_right() {
    let golds = fixture_golds();
    assert_eq!(golds.len(), 10);
    let preds: Vec<String> = golds
        .iter()
        .enumerate()
        .map(|(i, g)| if i % 2 == 0 { g.query.clone() } else { "SELECT code FROM products WHERE name = 'nope'".into() })
        .collect();
    let r = evaluate(&preds, &golds, &schemas(), Exec::Parallel).unwrap();
    assert_eq!(r.overall_accuracy, 50.0);
    assert_eq!(r.mismatches.iter().map(|m| m.index).collect::<Vec<_>>(), vec![1, 3, 5, 7, 9]);
    let weighted: f64 = r.per_level.values().map(|l| l.accuracy * l.count as f64).sum::<f64>() / r.n_examples as f64;
    assert!((weighted - r.overall_accuracy).abs() < 1e-9);
}

#[test]
fn unparseable_predictions_are_mismatches() {
    let golds = fixture_golds();
    let preds = vec!["SELECT 1"; golds.len()];
    let r = evaluate(&preds, &golds, &schemas(), Exec::Sequential).unwrap();
    assert_eq!(r.overall_accuracy, 0.0);
    assert!(r.mismatches.iter().all(|m| m.clause == Clause::Unparsed && m.detail.is_some()));
    assert!(r.to_text().lines().count() == 6);
}

#[test]
fn bad_gold_is_an_error() {
    let golds = vec![gold("SELECT nonsense FROM products")];
    assert!(matches!(
        evaluate(&["SELECT name FROM products"], &golds, &schemas(), Exec::Sequential),
        Err(EvalError::Gold { index: 0, .. })
    ));
    assert!(matches!(
        evaluate(&["a", "b"], &golds, &schemas(), Exec::Sequential),
        Err(EvalError::LengthMismatch { .. })
    ));
}

// Generated queries over `products`: permuting select items and where
// conjuncts, renaming the alias and changing literals must preserve the match.
type QueryParts = (Vec<(usize, usize)>, Vec<(usize, usize)>, String, u32, u32);

fn query_parts() -> impl Strategy<Value = QueryParts> {
    let item = (0usize..4, 0usize..4);
    let cond = (0usize..4, 0usize..3);
    (
        prop::collection::btree_set(item, 1..4).prop_map(|s| s.into_iter().collect::<Vec<_>>()),
        prop::collection::btree_set(cond, 0..4).prop_map(|s| s.into_iter().collect::<Vec<_>>()),
        "[A-Z][a-z]{0,3}[0-9]",
        any::<u32>(),
        any::<u32>(),
    )
}

fn render(items: &[(usize, usize)], conds: &[(usize, usize)], alias: &str, seed: u32) -> String {
    const COLS: [&str; 4] = ["code", "name", "price", "manufacturer"];
    const AGGS: [&str; 4] = ["", "max", "min", "count"];
    const OPS: [&str; 3] = ["=", ">", "<"];
    let sel: Vec<String> = items
        .iter()
        .map(|&(a, c)| match AGGS[a] {
            "" => format!("{alias}.{}", COLS[c]),
            f => format!("{f}({alias}.{})", COLS[c]),
        })
        .collect();
    let mut q = format!("SELECT {} FROM products AS {alias}", sel.join(", "));
    if !conds.is_empty() {
        let w: Vec<String> = conds
            .iter()
            .enumerate()
            .map(|(i, &(c, o))| format!("{alias}.{} {} {}", COLS[c], OPS[o], seed.wrapping_add(i as u32) % 1000))
            .collect();
        q.push_str(" WHERE ");
        q.push_str(&w.join(" AND "));
    }
    q
}

proptest! {
    #[test]
    fn match_invariances((items, conds, alias, s1, s2) in query_parts(), rot in 0usize..4) {
        let a = render(&items, &conds, "T1", s1);
        let mut items2 = items.clone();
        items2.reverse();
        let mut conds2 = conds.clone();
        if !conds2.is_empty() {
            let k = rot % conds2.len();
            conds2.rotate_left(k);
        }
        let b = render(&items2, &conds2, &alias, s2);
        prop_assert!(matches(&a, &b), "{} vs {}", a, b);
        prop_assert!(matches(&b, &a));
    }

    #[test]
    fn distinct_and_aggregate_mutations_flip((items, conds, _alias, s1, _s2) in query_parts()) {
        let a = render(&items, &conds, "T1", s1);
        let with_distinct = a.replacen("SELECT ", "SELECT DISTINCT ", 1);
        prop_assert!(!matches(&a, &with_distinct));
        let mut swapped = items.clone();
        swapped[0].0 = (swapped[0].0 + 1) % 4;
        if !items.contains(&swapped[0]) {
            prop_assert!(!matches(&a, &render(&swapped, &conds, "T1", s1)));
        }
    }
}
