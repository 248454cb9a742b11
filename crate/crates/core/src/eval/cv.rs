//! Cross-validated hyperparameter grid search for the boosted models.
//!
//! Boosting is sequential, so a model trained for the largest round count
//! contains every smaller-round model as a prefix. One fit per
//! (learning rate, depth, fold) therefore scores all round counts exactly,
//! which keeps the 80-cell sweep tractable.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::gbt::{FitContext, GBTModel, GBTParams};
use crate::qc::{inverse_transform, transform, IndicatorTarget};
use crate::table::EmbeddingTable;

use super::{metrics::r_squared, EvalError, SplitPlan};

/// The tuned hyperparameter space: 4 learning rates x 5 depths x 4 round
/// counts = 80 cells by default.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub learning_rates: Vec<f64>,
    pub max_depths: Vec<usize>,
    pub n_rounds: Vec<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            learning_rates: vec![0.01, 0.05, 0.1, 0.3],
            max_depths: vec![2, 3, 4, 6, 8],
            n_rounds: vec![50, 100, 200, 400],
        }
    }
}

impl GridSpec {
    pub fn n_cells(&self) -> usize {
        self.learning_rates.len() * self.max_depths.len() * self.n_rounds.len()
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.learning_rates.is_empty() || self.max_depths.is_empty() || self.n_rounds.is_empty() {
            return Err(EvalError::InvalidInput(String::from("grid axes must be non-empty")));
        }
        for &lr in &self.learning_rates {
            if !(lr > 0.0 && lr <= 1.0) {
                return Err(EvalError::InvalidInput(format!("learning rate {lr} out of (0, 1]")));
            }
        }
        if self.max_depths.iter().any(|&d| d == 0) || self.n_rounds.iter().any(|&r| r == 0) {
            return Err(EvalError::InvalidInput(String::from("depths and rounds must be >= 1")));
        }
        Ok(())
    }
}

/// Counts test-set ids touched by any model-fitting call. A clean run
/// reports zero contacts.
pub struct LeakageGuard {
    test_ids: BTreeSet<String>,
    contacts: AtomicU64,
}

impl LeakageGuard {
    pub fn new<I: IntoIterator<Item = String>>(test_ids: I) -> Self {
        LeakageGuard { test_ids: test_ids.into_iter().collect(), contacts: AtomicU64::new(0) }
    }

    pub fn for_plan(plan: &SplitPlan) -> Self {
        Self::new(plan.test_ids.iter().cloned())
    }

    /// Records the ids a fit is about to train on.
    pub fn record_fit<'a, I: IntoIterator<Item = &'a str>>(&self, train_ids: I) {
        let hits = train_ids.into_iter().filter(|id| self.test_ids.contains(*id)).count() as u64;
        if hits > 0 {
            self.contacts.fetch_add(hits, Ordering::Relaxed);
        }
    }

    pub fn contacts(&self) -> u64 {
        self.contacts.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchOutcome {
    pub best: GBTParams,
    /// R² per fold at the winning cell; `None` marks a skipped fold.
    pub per_fold_r2: Vec<Option<f64>>,
    /// Mean over evaluated folds at the winning cell.
    pub mean_r2: f64,
    pub skipped_folds: usize,
    /// Training ids dropped across folds for lacking a target value or an
    /// embedding row.
    pub dropped_train_rows: usize,
}

struct FoldData {
    ctx: FitContext,
    x_val: Vec<f64>,
    n_val: usize,
    y_val_raw: Vec<f64>,
}

/// Runs the full grid over the plan's folds: train on four folds, validate
/// on the fifth, on transformed targets; predictions are inverse-transformed
/// before R². Ties break toward fewer rounds, then shallower trees, then
/// smaller learning rates.
pub fn cv_grid_search(
    features: &EmbeddingTable,
    target: &IndicatorTarget,
    plan: &SplitPlan,
    grid: &GridSpec,
    guard: Option<&LeakageGuard>,
) -> Result<GridSearchOutcome, EvalError> {
    grid.validate()?;
    let kind = target.spec.kind;
    let dim = features.dim;

    let total_train: usize = plan.folds.iter().map(|f| f.len()).sum();
    let covered = plan.train_ids().filter(|id| target.values.contains_key(*id)).count();
    if (covered as f64) < 0.8 * total_train as f64 {
        return Err(EvalError::InsufficientCoverage { covered, total: total_train });
    }

    let mut folds: Vec<Option<FoldData>> = Vec::with_capacity(plan.n_folds());
    let mut dropped_train_rows = 0usize;
    for f in 0..plan.n_folds() {
        let mut x_train: Vec<f64> = Vec::new();
        let mut y_train: Vec<f64> = Vec::new();
        let mut used_ids: Vec<&str> = Vec::new();
        let mut candidates = 0usize;
        for id in plan.train_ids_excluding(f) {
            candidates += 1;
            if let (Some(&v), Some(e)) = (target.values.get(id), features.get(id)) {
                x_train.extend_from_slice(e);
                y_train.push(transform(v, kind).map_err(|e| EvalError::InvalidInput(format!("{e}")))?);
                used_ids.push(id);
            }
        }
        dropped_train_rows += candidates - used_ids.len();

        let mut x_val: Vec<f64> = Vec::new();
        let mut y_val_raw: Vec<f64> = Vec::new();
        for id in &plan.folds[f] {
            if let (Some(&v), Some(e)) = (target.values.get(id), features.get(id)) {
                x_val.extend_from_slice(e);
                y_val_raw.push(v);
            }
        }

        let val_constant =
            y_val_raw.windows(2).all(|w| w[0] == w[1]);
        if y_val_raw.len() < 2 || val_constant || y_train.len() < 2 {
            folds.push(None);
            continue;
        }
        if let Some(g) = guard {
            g.record_fit(used_ids.iter().copied());
        }
        let ctx = FitContext::new(&x_train, y_train.len(), dim, &y_train)
            .map_err(|e| EvalError::InvalidInput(format!("{e}")))?;
        folds.push(Some(FoldData { ctx, n_val: y_val_raw.len(), x_val, y_val_raw }));
    }

    let skipped_folds = folds.iter().filter(|f| f.is_none()).count();
    if skipped_folds == plan.n_folds() {
        return Err(EvalError::Unevaluable(String::from("all folds skipped")));
    }

    let max_rounds = *grid.n_rounds.iter().max().unwrap();
    let mut cells: Vec<(GBTParams, Vec<Option<f64>>, f64)> = Vec::with_capacity(grid.n_cells());
    for &lr in &grid.learning_rates {
        for &depth in &grid.max_depths {
            let models: Vec<Option<GBTModel>> = folds
                .iter()
                .map(|fd| fd.as_ref().map(|fd| fd.ctx.fit(&GBTParams::new(lr, depth, max_rounds))))
                .collect();
            for &rounds in &grid.n_rounds {
                let mut per_fold = vec![None; plan.n_folds()];
                let mut acc = 0.0;
                let mut cnt = 0usize;
                for (i, (fd, model)) in folds.iter().zip(&models).enumerate() {
                    let (Some(fd), Some(model)) = (fd, model) else { continue };
                    let raw_preds = model
                        .predict_prefix(&fd.x_val, fd.n_val, rounds)
                        .expect("validation matrix matches training dim");
                    let preds: Vec<f64> =
                        raw_preds.iter().map(|&p| inverse_transform(p, kind)).collect();
                    let r2 = r_squared(&fd.y_val_raw, &preds).expect("fold usability pre-checked");
                    per_fold[i] = Some(r2);
                    acc += r2;
                    cnt += 1;
                }
                cells.push((GBTParams::new(lr, depth, rounds), per_fold, acc / cnt as f64));
            }
        }
    }

    let mut best = 0usize;
    for i in 1..cells.len() {
        let (bp, _, bm) = &cells[best];
        let (cp, _, cm) = &cells[i];
        let wins = cm > bm
            || (cm == bm
                && (cp.n_rounds < bp.n_rounds
                    || (cp.n_rounds == bp.n_rounds
                        && (cp.max_depth < bp.max_depth
                            || (cp.max_depth == bp.max_depth && cp.learning_rate < bp.learning_rate)))));
        if wins {
            best = i;
        }
    }
    let (params, per_fold_r2, mean_r2) = cells.swap_remove(best);
    Ok(GridSearchOutcome { best: params, per_fold_r2, mean_r2, skipped_folds, dropped_train_rows })
}
