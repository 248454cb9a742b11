//! Fold-wise evaluation of the deterministic interpolation baselines.
//!
//! The same folds as the boosted models are reused so that the reported
//! standard deviation is variation across spatial folds. Kriging refits its
//! variogram inside every fold on that fold's training points only.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::geo::{DistanceMetric, GeoPoint};
use crate::interp::{
    empirical_variogram, fit_spherical, idw_predict, IdwConfig, InterpError, KrigingSystem, SamplePoint,
};
use crate::qc::IndicatorTarget;

use super::{cv::LeakageGuard, metrics::r_squared, EvalError, SplitPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Idw,
    Kriging,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub idw: IdwConfig,
    pub variogram_bins: usize,
    pub metric: DistanceMetric,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { idw: IdwConfig::default(), variogram_bins: 15, metric: DistanceMetric::HaversineKm }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineOutcome {
    /// R² per fold on the raw target scale; `None` marks a fold that could
    /// not be scored (too few or constant validation values).
    pub per_fold_r2: Vec<Option<f64>>,
    pub test_r2: Option<f64>,
    /// Folds (plus possibly the test evaluation) where the kriging pipeline
    /// failed and predictions fell back to the training mean.
    pub fallback_evaluations: usize,
}

fn kriging_predictions(
    train: &[SamplePoint],
    queries: &[GeoPoint],
    cfg: &BaselineConfig,
) -> Result<Vec<f64>, InterpError> {
    let mut max_pair = 0.0f64;
    for i in 0..train.len() {
        for j in (i + 1)..train.len() {
            max_pair = max_pair.max(cfg.metric.distance(train[i].location, train[j].location));
        }
    }
    if max_pair <= 0.0 {
        return Err(InterpError::InvalidInput(String::from("training points are coincident")));
    }
    let ev = empirical_variogram(train, cfg.variogram_bins, max_pair / 2.0, cfg.metric)?;
    let model = fit_spherical(&ev)?;
    let system = KrigingSystem::new(train, model, cfg.metric)?;
    Ok(queries.iter().map(|&q| system.predict(q).value).collect())
}

/// Predicts all queries, falling back to the training mean when the kriging
/// pipeline fails. Returns the predictions and whether the fallback fired.
fn predict_all(
    method: BaselineMethod,
    train: &[SamplePoint],
    queries: &[GeoPoint],
    cfg: &BaselineConfig,
) -> Result<(Vec<f64>, bool), EvalError> {
    match method {
        BaselineMethod::Idw => {
            let preds = queries
                .iter()
                .map(|&q| idw_predict(train, q, &cfg.idw))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| EvalError::InvalidInput(alloc::format!("{e}")))?;
            Ok((preds, false))
        }
        BaselineMethod::Kriging => match kriging_predictions(train, queries, cfg) {
            Ok(preds) => Ok((preds, false)),
            Err(_) => {
                let mean = train.iter().map(|s| s.value).sum::<f64>() / train.len() as f64;
                Ok((vec![mean; queries.len()], true))
            }
        },
    }
}

fn gather<'a>(
    ids: impl Iterator<Item = &'a String>,
    target: &IndicatorTarget,
    centroids: &BTreeMap<String, GeoPoint>,
) -> Vec<SamplePoint> {
    let mut out = Vec::new();
    for id in ids {
        if let (Some(&value), Some(&location)) = (target.values.get(id), centroids.get(id)) {
            out.push(SamplePoint { location, value });
        }
    }
    out
}

/// Evaluates one baseline over every fold plus the held-out test set.
pub fn evaluate_baseline(
    method: BaselineMethod,
    target: &IndicatorTarget,
    centroids: &BTreeMap<String, GeoPoint>,
    plan: &SplitPlan,
    cfg: &BaselineConfig,
    guard: Option<&LeakageGuard>,
) -> Result<BaselineOutcome, EvalError> {
    let usable = target.values.keys().filter(|id| centroids.contains_key(*id)).count();
    if usable < 8 {
        return Err(EvalError::InvalidInput(alloc::format!(
            "baseline needs >= 8 catchments with target values, got {usable}"
        )));
    }

    let mut per_fold_r2 = Vec::with_capacity(plan.n_folds());
    let mut fallback_evaluations = 0usize;
    for f in 0..plan.n_folds() {
        let train = gather(plan.train_ids_excluding(f), target, centroids);
        let mut queries = Vec::new();
        let mut y_val = Vec::new();
        for id in &plan.folds[f] {
            if let (Some(&value), Some(&location)) = (target.values.get(id), centroids.get(id)) {
                queries.push(location);
                y_val.push(value);
            }
        }
        if train.is_empty() || y_val.len() < 2 || y_val.windows(2).all(|w| w[0] == w[1]) {
            per_fold_r2.push(None);
            continue;
        }
        if let Some(g) = guard {
            g.record_fit(
                plan.train_ids_excluding(f)
                    .filter(|id| target.values.contains_key(*id) && centroids.contains_key(*id))
                    .map(|s| s.as_str()),
            );
        }
        let (preds, fell_back) = predict_all(method, &train, &queries, cfg)?;
        if fell_back {
            fallback_evaluations += 1;
        }
        per_fold_r2.push(Some(r_squared(&y_val, &preds).expect("fold usability pre-checked")));
    }

    // Test-set evaluation trains on the full 80%.
    let train = gather(plan.train_ids(), target, centroids);
    let mut queries = Vec::new();
    let mut y_test = Vec::new();
    for id in &plan.test_ids {
        if let (Some(&value), Some(&location)) = (target.values.get(id), centroids.get(id)) {
            queries.push(location);
            y_test.push(value);
        }
    }
    let test_r2 = if train.is_empty() || y_test.len() < 2 || y_test.windows(2).all(|w| w[0] == w[1]) {
        None
    } else {
        if let Some(g) = guard {
            g.record_fit(
                plan.train_ids()
                    .filter(|id| target.values.contains_key(*id) && centroids.contains_key(*id))
                    .map(|s| s.as_str()),
            );
        }
        let (preds, fell_back) = predict_all(method, &train, &queries, cfg)?;
        if fell_back {
            fallback_evaluations += 1;
        }
        Some(r_squared(&y_test, &preds).expect("test usability pre-checked"))
    };

    Ok(BaselineOutcome { per_fold_r2, test_r2, fallback_evaluations })
}
