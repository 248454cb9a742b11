//! Per-catchment embedding feature tables.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Embedding provenance. Each named source carries a fixed dimensionality;
/// `Multi` is the concatenation produced by fusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum EmbeddingSource {
    Pdfm,
    AlphaEarth,
    Cdr,
    Multi,
}

impl EmbeddingSource {
    /// Dimensionality contract for tables loaded from disk.
    pub fn expected_dim(self) -> usize {
        match self {
            EmbeddingSource::Pdfm => 16,
            EmbeddingSource::AlphaEarth => 64,
            EmbeddingSource::Cdr => 10,
            EmbeddingSource::Multi => 90,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingSource::Pdfm => "PDFM",
            EmbeddingSource::AlphaEarth => "ALPHAEARTH",
            EmbeddingSource::Cdr => "CDR",
            EmbeddingSource::Multi => "MULTI",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "PDFM" => Some(EmbeddingSource::Pdfm),
            "ALPHAEARTH" => Some(EmbeddingSource::AlphaEarth),
            "CDR" => Some(EmbeddingSource::Cdr),
            "MULTI" => Some(EmbeddingSource::Multi),
            _ => None,
        }
    }

    /// The three single sources in fusion concatenation order.
    pub const SINGLE_SOURCES: [EmbeddingSource; 3] =
        [EmbeddingSource::Pdfm, EmbeddingSource::AlphaEarth, EmbeddingSource::Cdr];
}

impl fmt::Display for EmbeddingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TableError {
    DimMismatch { source: EmbeddingSource, expected: usize, got: usize },
    WrongVectorLength { id: String, expected: usize, got: usize },
    NonFinite { id: String },
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::DimMismatch { source, expected, got } => {
                write!(f, "{source} tables must be {expected}-dimensional, got {got}")
            }
            TableError::WrongVectorLength { id, expected, got } => {
                write!(f, "catchment {id}: vector has {got} entries, expected {expected}")
            }
            TableError::NonFinite { id } => write!(f, "catchment {id}: non-finite embedding value"),
        }
    }
}

impl core::error::Error for TableError {}

/// Catchment id -> feature vector, with a declared source and dimension.
/// A `BTreeMap` keeps iteration (and everything derived from it) ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    pub source: EmbeddingSource,
    pub dim: usize,
    pub rows: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(source: EmbeddingSource, dim: usize) -> Self {
        EmbeddingTable { source, dim, rows: BTreeMap::new() }
    }

    /// Checks the declared dimension against the source contract; fused
    /// tables are exempt because degenerate fusions are legal.
    pub fn check_source_dim(&self) -> Result<(), TableError> {
        if self.source != EmbeddingSource::Multi && self.dim != self.source.expected_dim() {
            return Err(TableError::DimMismatch {
                source: self.source,
                expected: self.source.expected_dim(),
                got: self.dim,
            });
        }
        Ok(())
    }

    pub fn insert(&mut self, id: String, vector: Vec<f64>) -> Result<(), TableError> {
        if vector.len() != self.dim {
            return Err(TableError::WrongVectorLength { id, expected: self.dim, got: vector.len() });
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(TableError::NonFinite { id });
        }
        self.rows.insert(id, vector);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.rows.get(id).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &String> {
        self.rows.keys()
    }
}
