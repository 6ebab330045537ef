use std::collections::{BTreeSet, HashMap};

use super::string::{Link, Linking};
use super::{LinkError, LinkingConfig, SchemaNaming, SpanMode};
use crate::dataset::Schema;
use crate::embed::{EmbedError, EmbeddingProvider, UnitVector};
use crate::text;

/// Unit vectors for a fixed set of texts, fetched from a provider once.
///
/// Keys are normalized text. A text the provider could not embed (or that
/// came back as the zero vector) maps to `None`.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingIndex {
    vectors: HashMap<String, Option<UnitVector>>,
    dim: Option<usize>,
}

impl EmbeddingIndex {
    pub fn build<P, I, S>(provider: &P, texts: I) -> Result<Self, EmbedError>
    where
        P: EmbeddingProvider + ?Sized,
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let keys: Vec<String> =
            texts.into_iter().map(|t| text::normalize(t.as_ref())).collect::<BTreeSet<_>>().into_iter().collect();
        let mut index = EmbeddingIndex::default();
        if keys.is_empty() {
            return Ok(index);
        }
        let vectors = provider.embed(&keys)?;
        if vectors.len() != keys.len() {
            return Err(EmbedError::Protocol(format!("{} vectors for {} texts", vectors.len(), keys.len())));
        }
        for (key, v) in keys.into_iter().zip(vectors) {
            let unit = match v {
                Some(v) => {
                    match index.dim {
                        Some(d) if d != v.dim() => {
                            return Err(EmbedError::DimensionMismatch { expected: d, found: v.dim() })
                        }
                        _ => index.dim = Some(v.dim()),
                    }
                    v.normalized().ok()
                }
                None => None,
            };
            index.vectors.insert(key, unit);
        }
        Ok(index)
    }

    /// `None` both for unknown texts and for texts without a vector.
    pub fn get(&self, text: &str) -> Option<&UnitVector> {
        self.vectors.get(&text::normalize(text)).and_then(Option::as_ref)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Text embedded for a schema item under the configured naming.
pub(crate) fn table_text(schema: &Schema, t: usize, naming: SchemaNaming) -> &str {
    let table = &schema.tables[t];
    match naming {
        SchemaNaming::Display => &table.name_display,
        SchemaNaming::Original => &table.name_original,
    }
}

pub(crate) fn column_text(schema: &Schema, c: usize, naming: SchemaNaming) -> &str {
    let column = &schema.columns[c];
    match naming {
        SchemaNaming::Display => &column.name_display,
        SchemaNaming::Original => &column.name_original,
    }
}

/// Question spans compared against schema items, as `(start, len)`.
pub(crate) fn spans(n_tokens: usize, mode: SpanMode) -> Vec<(usize, usize)> {
    let k = match mode {
        SpanMode::SingleToken => 1,
        SpanMode::UpTo(k) => k.max(1),
    };
    (1..=k.min(n_tokens)).flat_map(|len| (0..=n_tokens - len).map(move |s| (s, len))).collect()
}

pub(crate) fn span_text(tokens: &[String], start: usize, len: usize) -> String {
    tokens[start..start + len].join(" ")
}

/// Every text [`csr_link`] will look up for one question over one schema.
pub fn csr_texts(tokens: &[String], schema: &Schema, config: &LinkingConfig) -> Vec<String> {
    let mut out: Vec<String> =
        spans(tokens.len(), config.span_mode).into_iter().map(|(s, l)| span_text(tokens, s, l)).collect();
    out.extend((0..schema.tables.len()).map(|t| table_text(schema, t, config.schema_naming).to_owned()));
    out.extend(
        (0..schema.columns.len())
            .filter(|&c| !schema.columns[c].is_all_columns())
            .map(|c| column_text(schema, c, config.schema_naming).to_owned()),
    );
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsrCounts {
    pub table: usize,
    pub column: usize,
    /// Distinct texts of this example that had no vector.
    pub skipped: usize,
}

/// Overlay cosine-match links onto `linking`.
///
/// A cell becomes [`Link::Cosine`] when it is still [`Link::None`] and some
/// question span covering the token has cosine ≥ `config.tau` with the
/// item's name. With the default single-token spans that is exactly the
/// token's own cosine. All qualifying items link, not just the best one.
pub fn csr_link(
    tokens: &[String],
    schema: &Schema,
    index: &EmbeddingIndex,
    config: &LinkingConfig,
    linking: &mut Linking,
) -> Result<CsrCounts, LinkError> {
    config.validate()?;
    let mut missing = BTreeSet::new();
    let mut lookup = |s: &str| {
        let v = index.get(s);
        if v.is_none() {
            missing.insert(text::normalize(s));
        }
        v
    };
    let span_vecs: Vec<((usize, usize), Option<&UnitVector>)> = spans(tokens.len(), config.span_mode)
        .into_iter()
        .map(|(s, l)| ((s, l), lookup(&span_text(tokens, s, l))))
        .collect();
    let table_vecs: Vec<Option<&UnitVector>> =
        (0..schema.tables.len()).map(|t| lookup(table_text(schema, t, config.schema_naming))).collect();
    let column_vecs: Vec<Option<&UnitVector>> = (0..schema.columns.len())
        .map(|c| {
            if schema.columns[c].is_all_columns() {
                None
            } else {
                lookup(column_text(schema, c, config.schema_naming))
            }
        })
        .collect();

    let mut counts = CsrCounts::default();
    for &((start, len), sv) in &span_vecs {
        let Some(sv) = sv else { continue };
        for (t, tv) in table_vecs.iter().enumerate() {
            if tv.is_some_and(|tv| sv.cosine(tv) >= config.tau) {
                for q in start..start + len {
                    if linking.table(q, t) == Link::None {
                        linking.set_table(q, t, Link::Cosine);
                        counts.table += 1;
                    }
                }
            }
        }
        for (c, cv) in column_vecs.iter().enumerate() {
            if cv.is_some_and(|cv| sv.cosine(cv) >= config.tau) {
                for q in start..start + len {
                    if linking.column(q, c) == Link::None {
                        linking.set_column(q, c, Link::Cosine);
                        counts.column += 1;
                    }
                }
            }
        }
    }
    counts.skipped = missing.len();
    Ok(counts)
}
