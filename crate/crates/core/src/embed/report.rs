use std::fmt::Write as _;

use serde::Serialize;

use super::{cosine_similarity, EmbeddingProvider};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityRow {
    pub provider: String,
    pub left: String,
    pub right: String,
    /// `100 × cosine`, or `None` when the provider could not score the pair.
    pub similarity: Option<f64>,
    /// Why `similarity` is absent.
    pub note: Option<String>,
}

impl SimilarityRow {
    pub fn label(&self) -> String {
        format!("{} / {}", self.left, self.right)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub rows: Vec<SimilarityRow>,
}

impl SimilarityReport {
    pub fn get(&self, provider: &str, left: &str, right: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.provider == provider && r.left == left && r.right == right)
            .and_then(|r| r.similarity)
    }

    /// Rows without a score.
    pub fn n_absent(&self) -> usize {
        self.rows.iter().filter(|r| r.similarity.is_none()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let pw = self.rows.iter().map(|r| r.provider.chars().count()).max().unwrap_or(0).max(8);
        let lw = self.rows.iter().map(|r| r.label().chars().count()).max().unwrap_or(0).max(4);
        let mut out = String::new();
        let _ = writeln!(out, "{:<pw$}  {:<lw$}  {:>7}", "provider", "pair", "sim %");
        for r in &self.rows {
            let _ = match r.similarity {
                Some(s) => writeln!(out, "{:<pw$}  {:<lw$}  {:>7.2}", r.provider, r.label(), s),
                None => writeln!(
                    out,
                    "{:<pw$}  {:<lw$}  {:>7}  {}",
                    r.provider,
                    r.label(),
                    "-",
                    r.note.as_deref().unwrap_or("")
                ),
            };
        }
        out
    }
}

/// Score every pair under every provider; one row per (provider, pair).
///
/// A provider that fails outright yields absent rows carrying the error, and
/// the remaining providers are still scored.
pub fn similarity_matrix_report<P: EmbeddingProvider>(providers: &[P], pairs: &[(String, String)]) -> SimilarityReport {
    let mut rows = Vec::with_capacity(providers.len() * pairs.len());
    let texts: Vec<String> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    for p in providers {
        let name = p.info().name;
        let absent = |left: &str, right: &str, note: String| SimilarityRow {
            provider: name.clone(),
            left: left.to_owned(),
            right: right.to_owned(),
            similarity: None,
            note: Some(note),
        };
        let vectors = match p.embed(&texts) {
            Ok(v) if v.len() == texts.len() => v,
            Ok(v) => {
                let note = format!("provider returned {} vectors for {} texts", v.len(), texts.len());
                rows.extend(pairs.iter().map(|(a, b)| absent(a, b, note.clone())));
                continue;
            }
            Err(e) => {
                log::warn!("provider {name} failed: {e}");
                rows.extend(pairs.iter().map(|(a, b)| absent(a, b, e.to_string())));
                continue;
            }
        };
        for (i, (a, b)) in pairs.iter().enumerate() {
            let row = match (&vectors[2 * i], &vectors[2 * i + 1]) {
                (Some(va), Some(vb)) => match cosine_similarity(va, vb) {
                    Ok(c) => SimilarityRow {
                        provider: name.clone(),
                        left: a.clone(),
                        right: b.clone(),
                        similarity: Some((100.0 * c).clamp(-100.0, 100.0)),
                        note: None,
                    },
                    Err(e) => absent(a, b, e.to_string()),
                },
                (None, _) => absent(a, b, format!("no vector for `{a}`")),
                (_, None) => absent(a, b, format!("no vector for `{b}`")),
            };
            rows.push(row);
        }
    }
    SimilarityReport { rows }
}
