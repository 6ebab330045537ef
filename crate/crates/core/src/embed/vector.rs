use super::EmbedError;

/// A dense embedding. Construction rejects empty and non-finite input.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, EmbedError> {
        if values.is_empty() {
            return Err(EmbedError::EmptyVector);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite);
        }
        Ok(Self { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        dot(&self.values, &self.values).sqrt()
    }

    /// Unit-length copy. Fails on the zero vector.
    pub fn normalized(&self) -> Result<UnitVector, EmbedError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(EmbedError::ZeroVector);
        }
        Ok(UnitVector(self.values.iter().map(|v| v / n).collect()))
    }
}

/// An L2-normalized vector; cosine between two of these is their dot product.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Dot product; callers guarantee equal dimension.
    pub fn cosine(&self, other: &UnitVector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        dot(&self.0, &other.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a·b / (|a| |b|)`.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, EmbedError> {
    if a.dim() != b.dim() {
        return Err(EmbedError::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(EmbedError::ZeroVector);
    }
    Ok(dot(&a.values, &b.values) / (na * nb))
}
