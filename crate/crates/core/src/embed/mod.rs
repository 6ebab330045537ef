//! Text embeddings for cross-lingual linking.
//!
//! Providers hand out raw vectors for arbitrary text; consumers normalize
//! them once with [`EmbeddingVector::normalized`] so cosine reduces to a dot
//! product. Lookup keys always go through [`crate::text::normalize`].

mod remote;
mod report;
mod store;
mod vector;

use std::path::PathBuf;

use serde::Serialize;

pub use remote::{Health, RemoteClient, RetryPolicy, ENDPOINT_ENV};
pub use report::{similarity_matrix_report, SimilarityReport, SimilarityRow};
pub use store::FileStore;
pub use vector::{cosine_similarity, EmbeddingVector, UnitVector};

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("vector has no components")]
    EmptyVector,
    #[error("vector has a non-finite component")]
    NonFinite,
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("vector file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("embedding service unreachable at {endpoint}: {message}")]
    Transport { endpoint: String, message: String },
    #[error("embedding service protocol error: {0}")]
    Protocol(String),
}

impl EmbedError {
    /// Failures of the network path rather than of the data.
    pub fn is_transport(&self) -> bool {
        matches!(self, EmbedError::Transport { .. })
    }
}

/// What a provider is. `dim` is `None` until a remote provider has answered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProviderInfo {
    pub name: String,
    pub dim: Option<usize>,
    pub languages: Vec<String>,
}

/// Source of vectors for arbitrary text.
///
/// The same text must map to the same vector for the lifetime of the
/// provider, and all vectors share one dimension. `embed` returns one entry
/// per input, in order; `None` marks a text the provider could not embed.
/// An `Err` means the provider as a whole failed.
pub trait EmbeddingProvider: Send + Sync {
    fn info(&self) -> ProviderInfo;

    fn embed(&self, texts: &[String]) -> Result<Vec<Option<EmbeddingVector>>, EmbedError>;
}

impl<P: EmbeddingProvider + ?Sized> EmbeddingProvider for &P {
    fn info(&self) -> ProviderInfo {
        (**self).info()
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Option<EmbeddingVector>>, EmbedError> {
        (**self).embed(texts)
    }
}
