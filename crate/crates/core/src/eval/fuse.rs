//! Embedding fusion: row-wise concatenation over the common catchment set.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::table::{EmbeddingSource, EmbeddingTable};

use super::EvalError;

#[derive(Debug, Clone, PartialEq)]
pub struct FusionResult {
    pub table: EmbeddingTable,
    /// Ids present in at least one input but not all of them, dropped by the
    /// intersection semantics.
    pub dropped_ids: Vec<String>,
}

/// Concatenates tables in fixed source order (PDFM, then AlphaEarth, then
/// CDR) over the intersection of their catchment ids. A single-table fusion
/// is a legal degenerate case.
pub fn fuse_embeddings(tables: &[&EmbeddingTable]) -> Result<FusionResult, EvalError> {
    if tables.is_empty() {
        return Err(EvalError::InvalidInput(String::from("no tables to fuse")));
    }
    let mut ordered: Vec<&EmbeddingTable> = tables.to_vec();
    ordered.sort_by_key(|t| t.source);

    let mut common: BTreeSet<String> = ordered[0].rows.keys().cloned().collect();
    let mut union: BTreeSet<String> = common.clone();
    for t in &ordered[1..] {
        let ids: BTreeSet<String> = t.rows.keys().cloned().collect();
        common = common.intersection(&ids).cloned().collect();
        union = union.union(&ids).cloned().collect();
    }
    if common.is_empty() {
        return Err(EvalError::InvalidInput(String::from(
            "fused tables share no catchment ids",
        )));
    }

    let dim = ordered.iter().map(|t| t.dim).sum();
    let mut fused = EmbeddingTable::new(EmbeddingSource::Multi, dim);
    for id in &common {
        let mut row = Vec::with_capacity(dim);
        for t in &ordered {
            row.extend_from_slice(t.get(id).expect("id in intersection"));
        }
        fused
            .insert(id.clone(), row)
            .map_err(|e| EvalError::InvalidInput(alloc::format!("{e}")))?;
    }

    let dropped_ids = union.difference(&common).cloned().collect();
    Ok(FusionResult { table: fused, dropped_ids })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn table(source: EmbeddingSource, dim: usize, ids: &[&str], fill: f64) -> EmbeddingTable {
        let mut t = EmbeddingTable::new(source, dim);
        for id in ids {
            t.insert(id.to_string(), vec![fill; dim]).unwrap();
        }
        t
    }

    #[test]
    fn three_sources_give_ninety_dims() {
        let p = table(EmbeddingSource::Pdfm, 16, &["A", "B"], 1.0);
        let a = table(EmbeddingSource::AlphaEarth, 64, &["A", "B"], 2.0);
        let c = table(EmbeddingSource::Cdr, 10, &["A", "B"], 3.0);
        // Argument order must not matter; source rank fixes the layout.
        let fused = fuse_embeddings(&[&c, &p, &a]).unwrap();
        assert_eq!(fused.table.dim, 90);
        assert_eq!(fused.table.source, EmbeddingSource::Multi);
        assert!(fused.dropped_ids.is_empty());
        let row = fused.table.get("A").unwrap();
        assert!(row[..16].iter().all(|&v| v == 1.0));
        assert!(row[16..80].iter().all(|&v| v == 2.0));
        assert!(row[80..].iter().all(|&v| v == 3.0));
    }

    #[test]
    fn intersection_drops_partial_ids() {
        let p = table(EmbeddingSource::Pdfm, 16, &["A", "B", "C"], 1.0);
        let c = table(EmbeddingSource::Cdr, 10, &["A", "B"], 3.0);
        let fused = fuse_embeddings(&[&p, &c]).unwrap();
        assert_eq!(fused.table.len(), 2);
        assert_eq!(fused.dropped_ids, vec!["C".to_string()]);
    }

    #[test]
    fn degenerate_single_table_allowed() {
        let p = table(EmbeddingSource::Pdfm, 16, &["A"], 1.0);
        let fused = fuse_embeddings(&[&p]).unwrap();
        assert_eq!(fused.table.dim, 16);
        assert_eq!(fused.table.source, EmbeddingSource::Multi);
    }

    #[test]
    fn empty_intersection_rejected() {
        let p = table(EmbeddingSource::Pdfm, 16, &["A"], 1.0);
        let c = table(EmbeddingSource::Cdr, 10, &["B"], 3.0);
        assert!(fuse_embeddings(&[&p, &c]).is_err());
    }
}
