use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};

use schemalink::dataset::{check_split_disjoint, corpus_stats, load_examples_as, load_schemas, Example, SchemaSet};
use schemalink::embed::{
    similarity_matrix_report, EmbedError, EmbeddingProvider, EmbeddingVector, FileStore, ProviderInfo,
};
use schemalink::linker::{link_corpus, relation_catalog, DepEdge, MatrixExport};
use schemalink::sql::evaluate as evaluate_corpus;
use serde::Serialize;

use crate::config::{write, CliError, Result, RunConfig};

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn load(
    config: &RunConfig,
    schemas: Option<PathBuf>,
    examples: Option<PathBuf>,
    key: &str,
) -> Result<(SchemaSet, Vec<Example>)> {
    let schemas = load_schemas(config.path(schemas, "schemas")?)?;
    let examples = load_examples_as(config.path(examples, key)?, &schemas, config.language)?;
    Ok((schemas, examples))
}

pub fn stats(
    config: &RunConfig,
    schemas: Option<PathBuf>,
    train: Option<PathBuf>,
    test: Option<PathBuf>,
) -> Result<()> {
    let schemas = load_schemas(config.path(schemas, "schemas")?)?;
    let train = config.optional_path(train, "train")?;
    let test = config.optional_path(test, "test")?;
    if train.is_none() && test.is_none() {
        return Err(CliError::Validation("stats needs --train, --test or both".into()));
    }
    let load = |p: &Option<PathBuf>| -> Result<Option<Vec<Example>>> {
        p.as_ref().map(|p| load_examples_as(p, &schemas, config.language)).transpose().map_err(Into::into)
    };
    let (train, test) = (load(&train)?, load(&test)?);

    #[derive(Serialize)]
    struct Doc<'a> {
        rows: Vec<(&'a str, schemalink::dataset::CorpusStats)>,
        split: Option<schemalink::dataset::SplitReport>,
    }
    let mut doc = Doc { rows: Vec::new(), split: None };
    if let Some(t) = &train {
        doc.rows.push(("train", corpus_stats(t, &schemas)));
    }
    if let Some(t) = &test {
        doc.rows.push(("test", corpus_stats(t, &schemas)));
    }
    if let (Some(a), Some(b)) = (&train, &test) {
        let all: Vec<Example> = a.iter().chain(b).cloned().collect();
        doc.rows.push(("all", corpus_stats(&all, &schemas)));
        doc.split = Some(check_split_disjoint(a, b));
    }

    let mut text = format!("{:<6} #Q / #SQL / #DB / tables per DB\n", "split");
    for (name, s) in &doc.rows {
        let _ = writeln!(text, "{name:<6} {s}");
    }
    if let Some(split) = &doc.split {
        if split.disjoint {
            text.push_str("train/test databases disjoint: yes\n");
        } else {
            let shared: Vec<&str> = split.overlap.iter().map(String::as_str).collect();
            let _ = writeln!(text, "train/test databases disjoint: no (shared: {})", shared.join(", "));
        }
    }
    print!("{text}");
    write(&config.out_file("stats.txt")?, &text)?;
    write(&config.out_file("stats.json")?, &to_json(&doc))?;
    match doc.split {
        Some(split) if !split.disjoint => {
            Err(CliError::Validation(format!("train and test share {} database(s)", split.overlap.len())))
        }
        _ => Ok(()),
    }
}

fn load_deps(path: &Path) -> Result<Vec<Vec<DepEdge>>> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Validation(format!("bad dependency file {}: {e}", path.display())))
}

#[derive(Serialize)]
struct IndexedMatrix<'a> {
    index: usize,
    #[serde(flatten)]
    matrix: &'a MatrixExport,
}

pub fn link(
    config: &RunConfig,
    schemas: Option<PathBuf>,
    examples: Option<PathBuf>,
    deps: Option<PathBuf>,
) -> Result<()> {
    let (schemas, examples) = load(config, schemas, examples, "examples")?;
    let deps = config.optional_path(deps, "deps")?.map(|p| load_deps(&p)).transpose()?;
    let provider = config.provider()?;
    let out = link_corpus(&examples, &schemas, provider.as_deref(), &config.linking, deps.as_deref(), config.exec())?;

    let mut lines = String::new();
    for (index, (ex, m)) in examples.iter().zip(&out.matrices).enumerate() {
        if let Some(m) = m {
            let schema = schemas.get(&ex.db_id).expect("linked examples have schemas");
            let doc = m.export(ex, schema);
            lines.push_str(&serde_json::to_string(&IndexedMatrix { index, matrix: &doc }).expect("serializable"));
            lines.push('\n');
        }
    }
    write(&config.out_file("matrices.jsonl")?, &lines)?;
    write(&config.out_file("relations.json")?, &to_json(&relation_catalog()))?;

    #[derive(Serialize)]
    struct Summary<'a> {
        config: &'a schemalink::linker::LinkingConfig,
        stats: &'a schemalink::linker::LinkStats,
        failures: &'a [schemalink::linker::LinkFailure],
    }
    let summary = Summary { config: &config.linking, stats: &out.stats, failures: &out.failures };
    write(&config.out_file("link_stats.json")?, &to_json(&summary))?;

    print!("{}", out.stats.to_text());
    for f in &out.failures {
        eprintln!("warning: example {} ({}): {}", f.index, f.db_id, f.message);
    }
    Ok(())
}

pub fn export_matrix(
    config: &RunConfig,
    schemas: Option<PathBuf>,
    examples: Option<PathBuf>,
    index: Vec<usize>,
) -> Result<()> {
    let (schemas, examples) = load(config, schemas, examples, "examples")?;
    let selected: Vec<usize> = if index.is_empty() { (0..examples.len()).collect() } else { index };
    if let Some(&bad) = selected.iter().find(|&&i| i >= examples.len()) {
        return Err(CliError::Validation(format!("--index {bad} out of range for {} examples", examples.len())));
    }
    let subset: Vec<Example> = selected.iter().map(|&i| examples[i].clone()).collect();
    let provider = config.provider()?;
    let out = link_corpus(&subset, &schemas, provider.as_deref(), &config.linking, None, config.exec())?;
    if let Some(f) = out.failures.first() {
        return Err(CliError::Validation(format!("example {}: {}", selected[f.index], f.message)));
    }
    for ((&i, ex), m) in selected.iter().zip(&subset).zip(&out.matrices) {
        let m = m.as_ref().expect("no failures");
        let doc = m.export(ex, schemas.get(&ex.db_id).expect("linked examples have schemas"));
        write(&config.out_file(&format!("matrix_{i:05}.json"))?, &to_json(&doc))?;
    }
    write(&config.out_file("relations.json")?, &to_json(&relation_catalog()))?;
    println!("exported {} matrices to {}", selected.len(), config.out.display());
    Ok(())
}

pub fn evaluate(
    config: &RunConfig,
    schemas: Option<PathBuf>,
    gold: Option<PathBuf>,
    predictions: Option<PathBuf>,
) -> Result<()> {
    let (schemas, gold) = load(config, schemas, gold, "gold")?;
    let body = read(&config.path(predictions, "predictions")?)?;
    // A tab starts an optional trailing db_id column.
    let predictions: Vec<&str> = body.lines().map(|l| l.split('\t').next().unwrap_or("")).collect();
    let report = evaluate_corpus(&predictions, &gold, &schemas, config.exec())?;
    let text = report.to_text();
    print!("{text}");
    write(&config.out_file("eval.txt")?, &text)?;
    write(&config.out_file("eval.json")?, &report.to_json())?;
    Ok(())
}

fn parse_pairs(path: &Path) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in read(path)?.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = line.split_once('\t').ok_or_else(|| {
            CliError::Validation(format!("{}:{}: expected two tab-separated texts", path.display(), i + 1))
        })?;
        pairs.push((a.trim().to_owned(), b.trim().to_owned()));
    }
    Ok(pairs)
}

/// Remembers whether the wrapped provider failed on the network path.
struct Tracked {
    inner: Box<dyn EmbeddingProvider>,
    unreachable: AtomicBool,
}

impl EmbeddingProvider for Tracked {
    fn info(&self) -> ProviderInfo {
        self.inner.info()
    }

    fn embed(&self, texts: &[String]) -> std::result::Result<Vec<Option<EmbeddingVector>>, EmbedError> {
        self.inner.embed(texts).inspect_err(|e| {
            if e.is_transport() {
                self.unreachable.store(true, Ordering::SeqCst);
            }
        })
    }
}

pub fn simcheck(
    config: &RunConfig,
    pairs: Option<PathBuf>,
    compare_vectors: Vec<PathBuf>,
    compare_endpoints: Vec<String>,
) -> Result<()> {
    let pairs = parse_pairs(&config.path(pairs, "pairs")?)?;
    let mut providers: Vec<Box<dyn EmbeddingProvider>> = Vec::new();
    match config.provider {
        crate::ProviderKind::File => {
            if let Some(v) = &config.vectors {
                providers.push(Box::new(FileStore::load(v)?));
            }
        }
        crate::ProviderKind::Remote => providers.push(Box::new(config.remote(None)?)),
    }
    for v in &compare_vectors {
        providers.push(Box::new(FileStore::load(v)?));
    }
    for e in &compare_endpoints {
        providers.push(Box::new(config.remote(Some(e))?));
    }
    if providers.is_empty() {
        return Err(CliError::Validation("simcheck needs --vectors, --endpoint or a --compare-* provider".into()));
    }
    let tracked: Vec<Tracked> =
        providers.into_iter().map(|inner| Tracked { inner, unreachable: AtomicBool::new(false) }).collect();
    let refs: Vec<&Tracked> = tracked.iter().collect();
    let report = similarity_matrix_report(&refs, &pairs);

    let text = report.to_text();
    print!("{text}");
    write(&config.out_file("similarity.txt")?, &text)?;
    write(&config.out_file("similarity.json")?, &report.to_json())?;
    for row in report.rows.iter().filter(|r| r.similarity.is_none()) {
        eprintln!("warning: {} {}: {}", row.provider, row.label(), row.note.as_deref().unwrap_or("no score"));
    }
    if tracked.iter().all(|t| t.unreachable.load(Ordering::SeqCst)) {
        return Err(CliError::Transport("no embedding provider was reachable".into()));
    }
    Ok(())
}
