use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{EmbedError, EmbeddingProvider, EmbeddingVector, ProviderInfo};
use crate::text;

/// Vectors keyed by normalized text, loaded from or written to a text file.
///
/// File layout: the first line holds the dimension; every further line is
/// `key<TAB>v1 v2 ... vn`. Keys are normalized on load, so two raw keys that
/// normalize identically are a format error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileStore {
    name: String,
    dim: Option<usize>,
    vectors: BTreeMap<String, EmbeddingVector>,
}

impl FileStore {
    pub fn new(name: impl Into<String>) -> Self {
        FileStore { name: name.into(), dim: None, vectors: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    /// Insert under the normalized key, replacing any previous vector.
    pub fn insert(&mut self, key: &str, vector: EmbeddingVector) -> Result<(), EmbedError> {
        match self.dim {
            Some(d) if d != vector.dim() => {
                return Err(EmbedError::DimensionMismatch { expected: d, found: vector.dim() })
            }
            _ => self.dim = Some(vector.dim()),
        }
        self.vectors.insert(text::normalize(key), vector);
        Ok(())
    }

    pub fn lookup(&self, text: &str) -> Option<&EmbeddingVector> {
        self.vectors.get(&text::normalize(text))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    pub fn parse(name: impl Into<String>, body: &str) -> Result<Self, EmbedError> {
        let mut store = FileStore::new(name);
        let mut lines = body.lines().enumerate();
        let dim = match lines.next() {
            None => return Ok(store),
            Some((_, header)) => header.trim().parse::<usize>().ok().filter(|&d| d > 0).ok_or_else(|| {
                EmbedError::Format { line: 1, message: format!("expected a positive dimension, found `{header}`") }
            })?,
        };
        store.dim = Some(dim);
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (key, values) = line
                .split_once('\t')
                .ok_or_else(|| EmbedError::Format { line: line_no, message: "missing tab after key".into() })?;
            let values = values
                .split_whitespace()
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EmbedError::Format { line: line_no, message: e.to_string() })?;
            if values.len() != dim {
                return Err(EmbedError::Format {
                    line: line_no,
                    message: format!("expected {dim} values, found {}", values.len()),
                });
            }
            let vector = EmbeddingVector::new(values)
                .map_err(|e| EmbedError::Format { line: line_no, message: e.to_string() })?;
            let key = text::normalize(key);
            if store.vectors.insert(key.clone(), vector).is_some() {
                return Err(EmbedError::Format { line: line_no, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(store)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbedError> {
        let path = path.as_ref();
        let body =
            std::fs::read_to_string(path).map_err(|source| EmbedError::Io { path: path.to_path_buf(), source })?;
        FileStore::parse(format!("file:{}", path.display()), &body)
    }

    /// Serialized form; keys in sorted order so output is byte-stable.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let Some(dim) = self.dim else { return out };
        let _ = writeln!(out, "{dim}");
        for (k, v) in &self.vectors {
            out.push_str(k);
            out.push('\t');
            for (i, x) in v.values().iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{x}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), EmbedError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| EmbedError::Io { path: path.to_path_buf(), source })
    }
}

impl EmbeddingProvider for FileStore {
    fn info(&self) -> ProviderInfo {
        ProviderInfo { name: self.name.clone(), dim: self.dim, languages: vec![] }
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Option<EmbeddingVector>>, EmbedError> {
        Ok(texts.iter().map(|t| self.lookup(t).cloned()).collect())
    }
}
