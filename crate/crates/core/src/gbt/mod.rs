//! Gradient-boosted regression trees with squared-error loss, exact greedy
//! splits, and mean-residual leaves.
//!
//! Design notes that carry observable behaviour:
//! - thresholds are midpoints of consecutive distinct sorted feature values;
//!   rows with `value == threshold` route right;
//! - rows are brought into a canonical order before any accumulation, so a
//!   fitted model is bit-identical under any permutation of training rows;
//! - the model for `n_rounds = k` equals the first `k` trees of a longer fit
//!   with the same learning rate and depth, which the cross-validation layer
//!   exploits to score several round counts from one fit.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

mod tree;

pub use tree::{Node, RegressionTree};

#[derive(Debug, Clone, PartialEq)]
pub enum GbtError {
    InvalidInput(String),
    DimensionMismatch { expected: usize, got: usize },
    BadModelJson(String),
}

impl fmt::Display for GbtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GbtError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            GbtError::DimensionMismatch { expected, got } => {
                write!(f, "feature dimension mismatch: model expects {expected}, got {got}")
            }
            GbtError::BadModelJson(msg) => write!(f, "cannot parse model JSON: {msg}"),
        }
    }
}

impl core::error::Error for GbtError {}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GBTParams {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub n_rounds: usize,
    pub min_samples_leaf: usize,
}

impl GBTParams {
    pub fn new(learning_rate: f64, max_depth: usize, n_rounds: usize) -> Self {
        GBTParams { learning_rate, max_depth, n_rounds, min_samples_leaf: 1 }
    }

    pub fn validate(&self) -> Result<(), GbtError> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(GbtError::InvalidInput(alloc::format!(
                "learning_rate must be in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if self.max_depth == 0 || self.n_rounds == 0 || self.min_samples_leaf == 0 {
            return Err(GbtError::InvalidInput(String::from(
                "max_depth, n_rounds, and min_samples_leaf must all be >= 1",
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GBTModel {
    pub base_score: f64,
    pub params: GBTParams,
    pub n_features: usize,
    pub trees: Vec<RegressionTree>,
}

/// Serialization envelope so saved models are self-describing.
#[derive(serde::Serialize, serde::Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    model: GBTModel,
}

const MODEL_FORMAT: &str = "gbt-regression";
const MODEL_VERSION: u32 = 1;

impl GBTModel {
    /// Fits a boosted ensemble on a row-major `n_rows x n_features` matrix.
    pub fn fit(x: &[f64], n_rows: usize, n_features: usize, y: &[f64], params: &GBTParams) -> Result<Self, GbtError> {
        Ok(FitContext::new(x, n_rows, n_features, y)?.fit(params))
    }

    pub fn predict(&self, x: &[f64], n_rows: usize) -> Result<Vec<f64>, GbtError> {
        self.predict_prefix(x, n_rows, self.trees.len())
    }

    /// Predicts using only the first `n_trees` trees. Because boosting is
    /// sequential, this equals a model fitted with `n_rounds = n_trees`.
    pub fn predict_prefix(&self, x: &[f64], n_rows: usize, n_trees: usize) -> Result<Vec<f64>, GbtError> {
        if n_rows * self.n_features != x.len() {
            return Err(GbtError::DimensionMismatch {
                expected: self.n_features,
                got: if n_rows == 0 { 0 } else { x.len() / n_rows },
            });
        }
        let n_trees = n_trees.min(self.trees.len());
        let mut out = Vec::with_capacity(n_rows);
        for r in 0..n_rows {
            let row = &x[r * self.n_features..(r + 1) * self.n_features];
            let mut acc = self.base_score;
            for tree in &self.trees[..n_trees] {
                acc += self.params.learning_rate * tree.predict_row(row);
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format: String::from(MODEL_FORMAT),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_string(&doc).expect("model serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, GbtError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| GbtError::BadModelJson(alloc::format!("{e}")))?;
        if doc.format != MODEL_FORMAT || doc.version != MODEL_VERSION {
            return Err(GbtError::BadModelJson(alloc::format!(
                "unsupported format {}/{}",
                doc.format,
                doc.version
            )));
        }
        Ok(doc.model)
    }
}

/// Shared per-dataset state (canonical row order, per-feature sort order)
/// reused across fits with different hyperparameters on the same data.
pub struct FitContext {
    /// Targets in canonical row order.
    y: Vec<f64>,
    n: usize,
    d: usize,
    /// Per-feature sorted row indices (canonical ids), feature-major blocks.
    sorted_rows: Vec<u32>,
    /// Feature values matching `sorted_rows`.
    sorted_vals: Vec<f64>,
    /// Reciprocal table 1/k for k in 0..=n (index 0 unused).
    recip: Vec<f64>,
}

impl FitContext {
    pub fn new(x: &[f64], n_rows: usize, n_features: usize, y: &[f64]) -> Result<Self, GbtError> {
        if n_rows < 2 {
            return Err(GbtError::InvalidInput(alloc::format!("need at least 2 rows, got {n_rows}")));
        }
        if n_features == 0 {
            return Err(GbtError::InvalidInput(String::from("need at least 1 feature")));
        }
        if x.len() != n_rows * n_features {
            return Err(GbtError::InvalidInput(alloc::format!(
                "matrix buffer is {} values, expected {}",
                x.len(),
                n_rows * n_features
            )));
        }
        if y.len() != n_rows {
            return Err(GbtError::InvalidInput(alloc::format!(
                "target has {} values, expected {n_rows}",
                y.len()
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(GbtError::InvalidInput(String::from("non-finite value in inputs")));
        }

        // Canonical order: lexicographic by feature row then target. Makes
        // every downstream accumulation independent of input row order.
        let mut order: Vec<u32> = (0..n_rows as u32).collect();
        order.sort_by(|&a, &b| {
            let ra = &x[a as usize * n_features..(a as usize + 1) * n_features];
            let rb = &x[b as usize * n_features..(b as usize + 1) * n_features];
            for (va, vb) in ra.iter().zip(rb) {
                match va.partial_cmp(vb).unwrap() {
                    core::cmp::Ordering::Equal => continue,
                    other => return other,
                }
            }
            y[a as usize].partial_cmp(&y[b as usize]).unwrap()
        });

        let mut cx = Vec::with_capacity(n_rows * n_features);
        let mut cy = Vec::with_capacity(n_rows);
        for &o in &order {
            cx.extend_from_slice(&x[o as usize * n_features..(o as usize + 1) * n_features]);
            cy.push(y[o as usize]);
        }

        let mut sorted_rows = Vec::with_capacity(n_features * n_rows);
        let mut sorted_vals = Vec::with_capacity(n_features * n_rows);
        let mut idx: Vec<u32> = (0..n_rows as u32).collect();
        for f in 0..n_features {
            idx.sort_by(|&a, &b| {
                cx[a as usize * n_features + f]
                    .partial_cmp(&cx[b as usize * n_features + f])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            for &r in &idx {
                sorted_rows.push(r);
                sorted_vals.push(cx[r as usize * n_features + f]);
            }
            for (i, v) in idx.iter_mut().enumerate() {
                *v = i as u32;
            }
        }

        let mut recip = Vec::with_capacity(n_rows + 1);
        recip.push(0.0);
        for k in 1..=n_rows {
            recip.push(1.0 / k as f64);
        }

        Ok(FitContext { y: cy, n: n_rows, d: n_features, sorted_rows, sorted_vals, recip })
    }

    pub fn fit(&self, params: &GBTParams) -> GBTModel {
        self.fit_traced(params).0
    }

    /// Fits and returns the per-round training MSE alongside the model.
    pub fn fit_traced(&self, params: &GBTParams) -> (GBTModel, Vec<f64>) {
        params.validate().expect("invalid GBT parameters");
        let n = self.n;

        let all_equal = self.y.windows(2).all(|w| w[0] == w[1]);
        let base_score = if all_equal {
            self.y[0]
        } else {
            self.y.iter().sum::<f64>() / n as f64
        };

        let mut residuals: Vec<f64> = self.y.iter().map(|v| v - base_score).collect();
        let mut ws = tree::Workspace::new(n, self.d);
        let mut trees = Vec::with_capacity(params.n_rounds);
        let mut trace = Vec::with_capacity(params.n_rounds);
        for _ in 0..params.n_rounds {
            let t = tree::grow(self, params, &mut residuals, &mut ws);
            trees.push(t);
            trace.push(residuals.iter().map(|r| r * r).sum::<f64>() / n as f64);
        }

        (GBTModel { base_score, params: *params, n_features: self.d, trees }, trace)
    }

    pub(crate) fn n_rows(&self) -> usize {
        self.n
    }
    pub(crate) fn n_features(&self) -> usize {
        self.d
    }
    pub(crate) fn sorted_block(&self, f: usize) -> (&[u32], &[f64]) {
        (&self.sorted_rows[f * self.n..(f + 1) * self.n], &self.sorted_vals[f * self.n..(f + 1) * self.n])
    }
    pub(crate) fn recip(&self) -> &[f64] {
        &self.recip
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(seed)
    }

    fn random_matrix(n: usize, d: usize, seed: u64) -> Vec<f64> {
        let mut r = rng(seed);
        (0..n * d).map(|_| r.gen_range(-1.0..1.0)).collect()
    }

    fn mse(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
    }

    #[test]
    fn constant_target_predicted_exactly() {
        let x = random_matrix(40, 3, 1);
        let y = vec![0.1f64; 40];
        let m = GBTModel::fit(&x, 40, 3, &y, &GBTParams::new(0.3, 4, 50)).unwrap();
        let preds = m.predict(&x, 40).unwrap();
        assert!(preds.iter().all(|&p| p == 0.1), "constant target must be exact");
    }

    #[test]
    fn single_stump_solves_threshold_target() {
        let n = 100;
        let x = random_matrix(n, 2, 2);
        let y: Vec<f64> = (0..n).map(|i| if x[i * 2] > 0.5 { 1.0 } else { 0.0 }).collect();
        let m = GBTModel::fit(&x, n, 2, &y, &GBTParams::new(1.0, 2, 1)).unwrap();
        let preds = m.predict(&x, n).unwrap();
        assert!(mse(&preds, &y) < 1e-12, "mse {}", mse(&preds, &y));

        // The learned root threshold must sit in the gap around 0.5.
        let mut below = f64::NEG_INFINITY;
        let mut above = f64::INFINITY;
        for i in 0..n {
            let v = x[i * 2];
            if v <= 0.5 {
                below = below.max(v);
            } else {
                above = above.min(v);
            }
        }
        let root = &m.trees[0].nodes[0];
        match root {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert!(*threshold > below && *threshold <= above, "threshold {threshold}");
            }
            Node::Leaf { .. } => panic!("expected a split at the root"),
        }
    }

    #[test]
    fn xor_needs_depth_two() {
        let n = 200;
        let x = random_matrix(n, 2, 3);
        let y: Vec<f64> = (0..n)
            .map(|i| if (x[i * 2] > 0.0) != (x[i * 2 + 1] > 0.0) { 1.0 } else { 0.0 })
            .collect();
        let shallow = GBTModel::fit(&x, n, 2, &y, &GBTParams::new(0.3, 1, 400)).unwrap();
        let deep = GBTModel::fit(&x, n, 2, &y, &GBTParams::new(0.3, 2, 400)).unwrap();
        let mse_shallow = mse(&shallow.predict(&x, n).unwrap(), &y);
        let mse_deep = mse(&deep.predict(&x, n).unwrap(), &y);
        assert!(mse_deep < 1e-3, "depth 2 should interpolate, mse {mse_deep}");
        assert!(mse_shallow > 0.05, "depth 1 cannot express xor, mse {mse_shallow}");
    }

    #[test]
    fn training_mse_non_increasing() {
        let n = 120;
        let x = random_matrix(n, 5, 4);
        let mut r = rng(5);
        let y: Vec<f64> = (0..n).map(|_| r.gen_range(-2.0..2.0)).collect();
        for &(lr, depth) in &[(0.01, 2), (0.3, 4), (1.0, 8)] {
            let ctx = FitContext::new(&x, n, 5, &y).unwrap();
            let (_, trace) = ctx.fit_traced(&GBTParams::new(lr, depth, 120));
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-15, "mse increased: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn vanishing_learning_rate_predicts_base_score() {
        let n = 60;
        let x = random_matrix(n, 3, 6);
        let mut r = rng(7);
        let y: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..10.0)).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let params = GBTParams { learning_rate: 1e-12, max_depth: 4, n_rounds: 200, min_samples_leaf: 1 };
        let m = GBTModel::fit(&x, n, 3, &y, &params).unwrap();
        for p in m.predict(&x, n).unwrap() {
            assert!((p - mean).abs() < 1e-6);
        }
    }

    #[test]
    fn model_invariant_under_row_permutation() {
        let n = 80;
        let d = 4;
        let x = random_matrix(n, d, 8);
        let mut r = rng(9);
        let y: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();

        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                p.swap(i, r.gen_range(0..=i));
            }
            p
        };
        let mut xp = vec![0.0; n * d];
        let mut yp = vec![0.0; n];
        for (new, &old) in perm.iter().enumerate() {
            xp[new * d..(new + 1) * d].copy_from_slice(&x[old * d..(old + 1) * d]);
            yp[new] = y[old];
        }

        let params = GBTParams::new(0.1, 3, 40);
        let a = GBTModel::fit(&x, n, d, &y, &params).unwrap();
        let b = GBTModel::fit(&xp, n, d, &yp, &params).unwrap();
        assert_eq!(a.to_json(), b.to_json(), "model must not depend on row order");
    }

    #[test]
    fn tree_structure_invariant_under_feature_scaling() {
        let n = 100;
        let d = 3;
        let x = random_matrix(n, d, 10);
        let mut r = rng(11);
        let y: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();

        let mut xs = x.clone();
        for row in 0..n {
            xs[row * d + 1] *= 37.5;
        }
        let params = GBTParams::new(0.3, 4, 60);
        let a = GBTModel::fit(&x, n, d, &y, &params).unwrap();
        let b = GBTModel::fit(&xs, n, d, &y, &params).unwrap();
        let pa = a.predict(&x, n).unwrap();
        let pb = b.predict(&xs, n).unwrap();
        for (u, v) in pa.iter().zip(&pb) {
            assert!((u - v).abs() < 1e-9, "{u} vs {v}");
        }
    }

    #[test]
    fn prefix_prediction_equals_shorter_fit() {
        let n = 90;
        let d = 4;
        let x = random_matrix(n, d, 12);
        let mut r = rng(13);
        let y: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let long = GBTModel::fit(&x, n, d, &y, &GBTParams::new(0.1, 3, 50)).unwrap();
        let short = GBTModel::fit(&x, n, d, &y, &GBTParams::new(0.1, 3, 20)).unwrap();
        let via_prefix = long.predict_prefix(&x, n, 20).unwrap();
        let direct = short.predict(&x, n).unwrap();
        assert_eq!(via_prefix, direct);
    }

    #[test]
    fn empty_tree_list_predicts_base_score() {
        let m = GBTModel {
            base_score: 2.5,
            params: GBTParams::new(0.1, 2, 1),
            n_features: 2,
            trees: vec![],
        };
        assert_eq!(m.predict(&[0.0, 1.0, 3.0, 4.0], 2).unwrap(), vec![2.5, 2.5]);
    }

    #[test]
    fn contract_errors() {
        assert!(GBTModel::fit(&[1.0, 2.0], 1, 2, &[1.0], &GBTParams::new(0.1, 2, 1)).is_err());
        assert!(GBTModel::fit(&[1.0, f64::NAN], 2, 1, &[1.0, 2.0], &GBTParams::new(0.1, 2, 1)).is_err());
        let m = GBTModel::fit(&[0.0, 1.0, 2.0, 3.0], 4, 1, &[0.0, 1.0, 2.0, 3.0], &GBTParams::new(0.3, 2, 5))
            .unwrap();
        assert!(matches!(
            m.predict(&[0.0, 1.0], 1),
            Err(GbtError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let x = random_matrix(30, 2, 14);
        let mut r = rng(15);
        let y: Vec<f64> = (0..30).map(|_| r.gen_range(-1.0..1.0)).collect();
        let m = GBTModel::fit(&x, 30, 2, &y, &GBTParams::new(0.3, 3, 10)).unwrap();
        let back = GBTModel::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        assert!(GBTModel::from_json("{\"format\":\"other\",\"version\":9}").is_err());
    }
}
