use std::collections::HashMap;
use std::path::Path;
use std::sync::Mutex;

use proptest::prelude::*;

use super::RelationType::*;
use super::*;
use crate::dataset::{parse_schemas, tokenize, Language};
use crate::embed::{EmbeddingVector, FileStore, ProviderInfo};
use crate::sql::tests::MANUFACTORY;
use crate::text;

const STORES: &str = r#"[{
    "db_id": "stores",
    "table_names": ["customers", "store name", "orders"],
    "table_names_original": ["Customers", "StoreName", "Orders"],
    "column_names": [[-1, "*"], [0, "customer id"], [0, "name"], [1, "store id"], [1, "number of products"],
                     [2, "order id"], [2, "customer id"]],
    "column_names_original": [[-1, "*"], [0, "CustomerId"], [0, "Name"], [1, "StoreId"], [1, "NumProducts"],
                              [2, "OrderId"], [2, "CustomerId"]],
    "column_types": ["text", "number", "text", "number", "number", "number", "number"],
    "primary_keys": [1, 3, 5],
    "foreign_keys": [[6, 1]]
}]"#;

fn schema(json: &str) -> Schema {
    parse_schemas(json, Path::new("t.json")).unwrap().into_vec().remove(0)
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_owned).collect()
}

fn example(tokens: Vec<String>, db_id: &str) -> Example {
    Example { question: tokens.join(" "), question_tokens: tokens, query: String::new(), db_id: db_id.into() }
}

/// Every distinct normalized text gets its own basis vector, except texts
/// listed in `aliases`, which share the vector of their partner.
struct BasisStub {
    dim: usize,
    aliases: HashMap<String, String>,
    assigned: Mutex<HashMap<String, usize>>,
}

impl BasisStub {
    fn new(dim: usize, aliases: &[(&str, &str)]) -> Self {
        BasisStub {
            dim,
            aliases: aliases.iter().map(|(a, b)| (text::normalize(a), text::normalize(b))).collect(),
            assigned: Mutex::new(HashMap::new()),
        }
    }
}

impl EmbeddingProvider for BasisStub {
    fn info(&self) -> ProviderInfo {
        ProviderInfo { name: "basis".into(), dim: Some(self.dim), languages: vec![] }
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Option<EmbeddingVector>>, EmbedError> {
        let mut assigned = self.assigned.lock().unwrap();
        Ok(texts
            .iter()
            .map(|t| {
                let key = text::normalize(t);
                let key = self.aliases.get(&key).cloned().unwrap_or(key);
                let next = assigned.len();
                let slot = *assigned.entry(key).or_insert(next);
                assert!(slot < self.dim, "stub ran out of dimensions");
                let mut v = vec![0.0; self.dim];
                v[slot] = 1.0;
                Some(EmbeddingVector::new(v).unwrap())
            })
            .collect())
    }
}

#[test]
fn exact_partial_and_cross_lingual_string_links() {
    let s = schema(STORES);
    let l = string_link(&toks("list all customers"), &s);
    assert_eq!(l.table(2, 0), Link::Exact);
    assert_eq!(l.column(2, 1), Link::None);

    let l = string_link(&toks("which store sells most"), &s);
    assert_eq!(l.table(1, 1), Link::Partial);
    assert_eq!(l.count_tables(Link::Partial), 1);

    let l = string_link(&toks("كم عدد المنتجات"), &schema(MANUFACTORY));
    assert_eq!(l.count_tables(Link::None), 3 * 2);
    assert_eq!(l.count_columns(Link::None), 3 * 10);
}

#[test]
fn longest_span_and_stopwords() {
    let s = schema(STORES);
    let l = string_link(&toks("the store name of the shop"), &s);
    assert_eq!((l.table(1, 1), l.table(2, 1)), (Link::Exact, Link::Exact));
    assert_eq!(l.column(3, 4), Link::None, "a lone stopword never links");
    assert_eq!(l.column(1, 3), Link::Partial);

    let l = string_link(&toks("number of products"), &s);
    assert!((0..3).all(|q| l.column(q, 4) == Link::Exact));
    assert_eq!(l.column(1, 4), Link::Exact, "stopword inside an exact span still links");

    let l = string_link(&toks("* customer id"), &s);
    assert!((0..3).all(|q| l.column(q, 0) == Link::None));
    assert_eq!((l.column(1, 1), l.column(2, 6)), (Link::Exact, Link::Exact));
}

#[test]
fn dimensions_and_schema_structure() {
    let tiny = r#"[{"db_id": "tiny", "table_names": ["people"], "table_names_original": ["People"],
        "column_names": [[-1, "*"], [0, "name"]], "column_names_original": [[-1, "*"], [0, "Name"]],
        "column_types": ["text", "text"], "primary_keys": [], "foreign_keys": []}]"#;
    let s = schema(tiny);
    let m = build_matrix(&example(toks("who is there"), "tiny"), &s, None, &LinkingConfig::default()).unwrap();
    assert_eq!(m.side(), 6);
    assert_eq!(m.cells().len(), 36);
    m.check_integrity().unwrap();
    assert_eq!(m.get(0, 1), QqForward);
    assert_eq!(m.get(2, 1), QqBackward);
    assert_eq!(m.get(0, 2), QqDistant);
    assert_eq!(m.get(3, 5), TcHasColumn);
    assert_eq!(m.get(3, 4), TcNone);

    let s = schema(STORES);
    let m = build_matrix(&example(toks("x"), "stores"), &s, None, &LinkingConfig::default()).unwrap();
    let col = |c: usize| 1 + 3 + c;
    assert_eq!(m.get(col(6), col(1)), CcForeignKeyForward);
    assert_eq!(m.get(col(1), col(6)), CcForeignKeyBackward);
    assert_eq!(m.get(col(5), col(6)), CcSameTable);
    assert_eq!(m.get(col(0), col(1)), CcNone);
    assert_eq!((m.get(1 + 2, 1), m.get(1, 1 + 2)), (TtForeignKey, TtForeignKey));
    assert_eq!(m.get(1 + 1, 1 + 2), TtNone);
    assert_eq!(m.get(1, col(1)), TcPrimaryKey);
    assert_eq!(m.get(col(2), 1), CtHasColumn);
}

#[test]
fn dependency_edges_override_distance() {
    let s = schema(STORES);
    let ex = example(toks("a b c d"), "stores");
    let mut linking = string_link(&ex.question_tokens, &s);
    let deps = [
        DepEdge { head: 1, dependent: 3, label: "nsubj".into() },
        DepEdge { head: 3, dependent: 1, label: "dup".into() },
    ];
    let m = RelationMatrix::assemble(&linking, &s, &deps).unwrap();
    m.check_integrity().unwrap();
    assert_eq!((m.get(1, 3), m.get(3, 1)), (QqDependencyForward, QqDependencyBackward));
    assert_eq!(m.get(0, 1), QqForward);
    let bad = [DepEdge { head: 0, dependent: 4, label: String::new() }];
    assert!(matches!(RelationMatrix::assemble(&linking, &s, &bad), Err(LinkError::Dependency(_))));
    linking.set_table(0, 0, Link::Cosine);
    assert!(RelationMatrix::assemble(&linking, &schema(MANUFACTORY), &[]).is_err());
}

#[test]
fn sample_two_arabic_question_gets_one_cosine_link() {
    let s = schema(MANUFACTORY);
    let question = "كم من المنتجات لكل شركة صناعية؟";
    let ex = example(tokenize(question, Language::Arabic), "manufactory_1");
    let stub = BasisStub::new(64, &[("المنتجات", "products")]);
    let config = LinkingConfig::default();

    let m = build_matrix(&ex, &s, Some(&stub), &config).unwrap();
    m.check_integrity().unwrap();
    let nq = ex.question_tokens.len();

    // Brute force over every token × item pair with the same stub.
    let mut oracle = Vec::new();
    for (q, tok) in ex.question_tokens.iter().enumerate() {
        let tv = stub.embed(std::slice::from_ref(tok)).unwrap()[0].clone().unwrap();
        for (t, table) in s.tables.iter().enumerate() {
            let v = stub.embed(std::slice::from_ref(&table.name_display)).unwrap()[0].clone().unwrap();
            if crate::embed::cosine_similarity(&tv, &v).unwrap() >= 0.78 {
                oracle.push((q, nq + t));
            }
        }
        for (c, column) in s.columns.iter().enumerate().skip(1) {
            let v = stub.embed(std::slice::from_ref(&column.name_display)).unwrap()[0].clone().unwrap();
            if crate::embed::cosine_similarity(&tv, &v).unwrap() >= 0.78 {
                oracle.push((q, nq + 2 + c));
            }
        }
    }
    let found: Vec<(usize, usize)> = (0..nq)
        .flat_map(|q| (nq..m.side()).map(move |j| (q, j)))
        .filter(|&(q, j)| matches!(m.get(q, j), QtCosine | QcCosine))
        .collect();
    assert_eq!(found, oracle);
    assert_eq!(found.len(), 1);
    let q = ex.question_tokens.iter().position(|t| t == "المنتجات").unwrap();
    assert_eq!(found[0], (q, nq + 1));
    assert_eq!(m.get(nq + 1, q), TqCosine);

    let plain = build_matrix(&ex, &s, None, &config).unwrap();
    assert_eq!(plain.cells().iter().filter(|r| r.is_match()).count(), 0);
}

#[test]
fn cosine_never_overrides_string_links() {
    let s = schema(STORES);
    let ex = example(toks("customers of the store"), "stores");
    // Every text shares one vector, so every empty cell qualifies.
    let store = {
        let mut f = FileStore::new("flat");
        for t in csr_texts(&ex.question_tokens, &s, &LinkingConfig::default()) {
            f.insert(&t, EmbeddingVector::new(vec![1.0, 1.0]).unwrap()).unwrap();
        }
        f
    };
    let config = LinkingConfig::default();
    let with = build_matrix(&ex, &s, Some(&store), &config).unwrap();
    let without = build_matrix(&ex, &s, Some(&store), &LinkingConfig { csr_enabled: false, ..config }).unwrap();
    for i in 0..with.side() {
        for j in 0..with.side() {
            let (a, b) = (with.get(i, j), without.get(i, j));
            if a != b {
                assert!(matches!(b, QtNone | QcNone | TqNone | CqNone), "({i},{j}) {b} -> {a}");
                assert!(matches!(a, QtCosine | QcCosine | TqCosine | CqCosine));
            }
        }
    }
    assert_eq!(with.get(0, 4), QtExact);
    assert_eq!(with.get(3, 4 + 1), QtPartial);
    assert_eq!(with.get(2, 4 + 1), QtCosine, "stopwords still take part in the cosine pass");
    assert_eq!(with.get(0, 4 + 3), QcNone, "the * column is never embedded");
}

#[test]
fn missing_vectors_are_counted_not_fatal() {
    let s = schema(STORES);
    let ex = example(toks("customers"), "stores");
    let store = FileStore::parse("partial", "2\ncustomers\t1 0\n").unwrap();
    let index = EmbeddingIndex::build(&store, csr_texts(&ex.question_tokens, &s, &LinkingConfig::default())).unwrap();
    let (_, counts) = build_matrix_with(&ex, &s, Some(&index), &LinkingConfig::default(), &[]).unwrap();
    // 3 table names + 6 column names, "customer id" twice.
    assert_eq!(counts.skipped, 2 + 5);
    assert_eq!((counts.table, counts.column), (0, 0));
}

#[test]
fn span_mode_links_every_token_of_a_matching_span() {
    let s = schema(STORES);
    let ex = example(toks("زبائن المتجر كلهم"), "stores");
    let stub = BasisStub::new(64, &[("زبائن المتجر", "store name")]);
    let single = build_matrix(&ex, &s, Some(&stub), &LinkingConfig::default()).unwrap();
    assert_eq!(single.cells().iter().filter(|r| r.is_match()).count(), 0);
    let config = LinkingConfig { span_mode: SpanMode::UpTo(2), ..LinkingConfig::default() };
    let spans = build_matrix(&ex, &s, Some(&stub), &config).unwrap();
    spans.check_integrity().unwrap();
    assert_eq!((spans.get(0, 3 + 1), spans.get(1, 3 + 1), spans.get(2, 3 + 1)), (QtCosine, QtCosine, QtNone));
}

#[test]
fn config_validation() {
    for tau in [0.0, -0.1, 1.5, f64::NAN] {
        assert!(LinkingConfig { tau, ..LinkingConfig::default() }.validate().is_err(), "{tau}");
    }
    assert!(LinkingConfig { tau: 1.0, ..LinkingConfig::default() }.validate().is_ok());
    assert!(LinkingConfig { span_mode: SpanMode::UpTo(0), ..LinkingConfig::default() }.validate().is_err());
}

#[test]
fn corpus_stats_and_failures() {
    let schemas = parse_schemas(STORES, Path::new("t.json")).unwrap();
    let empty = link_corpus(&[], &schemas, None, &LinkingConfig::default(), None, Exec::Sequential).unwrap();
    assert!(empty.matrices.is_empty());
    assert_eq!(empty.stats, LinkStats::default());

    let exs =
        vec![example(toks("عملاء"), "stores"), example(toks("x"), "nowhere"), example(toks("عملاء طلبات"), "stores")];
    let stub = BasisStub::new(64, &[("عملاء", "customers"), ("طلبات", "order id")]);
    let out = link_corpus(&exs, &schemas, Some(&stub), &LinkingConfig::default(), None, Exec::Sequential).unwrap();
    assert_eq!(out.failures.len(), 1);
    assert_eq!(out.failures[0].index, 1);
    assert!(out.matrices[1].is_none());
    let st = &out.stats;
    assert_eq!((st.n_examples, st.n_linked, st.n_failed), (3, 2, 1));
    assert_eq!((st.n_table_cosine, st.n_column_cosine, st.total_relations), (2, 1, 3));
    assert_eq!(st.per_example_avg_table, 1.0);
    assert_eq!(st.per_example_avg_column, 0.5);

    let parallel = link_corpus(&exs, &schemas, Some(&stub), &LinkingConfig::default(), None, Exec::Parallel).unwrap();
    assert_eq!(parallel.matrices, out.matrices);
    assert_eq!(parallel.stats, out.stats);

    let short = [vec![]];
    assert!(link_corpus(&exs, &schemas, None, &LinkingConfig::default(), Some(&short), Exec::Sequential).is_err());
}

#[test]
fn export_round_trip() {
    let s = schema(MANUFACTORY);
    let ex = example(toks("how many products"), "manufactory_1");
    let m = build_matrix(&ex, &s, None, &LinkingConfig::default()).unwrap();
    let doc = m.export(&ex, &s);
    assert_eq!(doc.labels[0], "q:how");
    assert_eq!(doc.labels[3 + 1], "t:Products");
    assert_eq!(doc.labels[3 + 2 + 9], "c:Products.Manufacturer");
    assert_eq!(doc.labels[3 + 2], "c:*");
    let json = serde_json::to_string(&doc).unwrap();
    let back: MatrixExport = serde_json::from_str(&json).unwrap();
    assert_eq!(RelationMatrix::from_export(&back).unwrap(), m);

    let mut broken = doc.clone();
    broken.cells[0][1] = QqForward.id();
    broken.cells[1][0] = QqForward.id();
    assert!(RelationMatrix::from_export(&broken).is_err());
}

fn unit_vectors(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrices_are_inverse_symmetric(
        words in prop::collection::vec(prop::sample::select(vec!["customers", "store", "name", "id", "of", "order", "x", "متجر"]), 1..12),
        seed in any::<u64>(),
        tau in 0.05f64..1.0,
    ) {
        let s = schema(STORES);
        let ex = example(words.iter().map(|w| w.to_string()).collect(), "stores");
        let texts = csr_texts(&ex.question_tokens, &s, &LinkingConfig::default());
        let vecs = unit_vectors(texts.len(), 3, seed);
        let mut store = FileStore::new("rand");
        for (t, v) in texts.iter().zip(vecs) {
            if store.lookup(t).is_none() {
                store.insert(t, EmbeddingVector::new(v).unwrap()).unwrap();
            }
        }
        let config = LinkingConfig { tau, ..LinkingConfig::default() };
        let m = build_matrix(&ex, &s, Some(&store), &config).unwrap();
        prop_assert!(m.check_integrity().is_ok());
        prop_assert_eq!(m.side(), words.len() + 3 + 7);
    }
}
