use std::path::Path;

use serde::Deserialize;

use super::{read_file, tokenize, DatasetError, Language, Result, SchemaSet};

/// One question/SQL pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub question: String,
    pub question_tokens: Vec<String>,
    pub query: String,
    pub db_id: String,
}

#[derive(Deserialize)]
struct ExampleRecord {
    db_id: String,
    question: String,
    #[serde(default)]
    question_toks: Option<Vec<String>>,
    query: String,
}

/// Parse an example file. Pre-tokenized `question_toks` are kept as given;
/// otherwise the question is tokenized with the detected language.
pub fn parse_examples(json: &str, path: &Path, schemas: &SchemaSet) -> Result<Vec<Example>> {
    parse_examples_as(json, path, schemas, None)
}

/// Like [`parse_examples`], tokenizing untokenized questions as `language`
/// when given.
pub fn parse_examples_as(
    json: &str,
    path: &Path,
    schemas: &SchemaSet,
    language: Option<Language>,
) -> Result<Vec<Example>> {
    let raw: Vec<serde_json::Value> =
        serde_json::from_str(json).map_err(|source| DatasetError::Json { path: path.to_path_buf(), source })?;
    raw.into_iter()
        .enumerate()
        .map(|(index, value)| {
            let db_hint = value.get("db_id").and_then(|v| v.as_str()).map(str::to_owned);
            let rec: ExampleRecord = serde_json::from_value(value).map_err(|e| DatasetError::Record {
                index,
                db_id: db_hint,
                message: e.to_string(),
            })?;
            if schemas.get(&rec.db_id).is_none() {
                return Err(DatasetError::UnknownDb { db_id: rec.db_id, position: index });
            }
            let question_tokens = match rec.question_toks {
                Some(toks) if !toks.is_empty() => toks,
                _ => tokenize(&rec.question, language.unwrap_or_else(|| Language::detect(&rec.question))),
            };
            if question_tokens.is_empty() {
                return Err(DatasetError::Record {
                    index,
                    db_id: Some(rec.db_id),
                    message: "question has no tokens".into(),
                });
            }
            Ok(Example { question: rec.question, question_tokens, query: rec.query, db_id: rec.db_id })
        })
        .collect()
}

pub fn load_examples(path: impl AsRef<Path>, schemas: &SchemaSet) -> Result<Vec<Example>> {
    load_examples_as(path, schemas, None)
}

pub fn load_examples_as(
    path: impl AsRef<Path>,
    schemas: &SchemaSet,
    language: Option<Language>,
) -> Result<Vec<Example>> {
    let path = path.as_ref();
    parse_examples_as(&read_file(path)?, path, schemas, language)
}
