//! The experimental protocol: seeded 80/20 split with 5 training folds,
//! cross-validated grid search for the boosted models, spatial-fold
//! evaluation for the deterministic baselines, embedding fusion, and the
//! R² metric. One [`SplitPlan`] is shared across every method of a run so
//! method comparisons stay paired.

use alloc::string::String;
use core::fmt;

mod baseline;
mod cv;
mod fuse;
mod metrics;
mod split;

pub use baseline::{evaluate_baseline, BaselineConfig, BaselineMethod, BaselineOutcome};
pub use cv::{cv_grid_search, GridSearchOutcome, GridSpec, LeakageGuard};
pub use fuse::{fuse_embeddings, FusionResult};
pub use metrics::r_squared;
pub use split::{make_split, make_split_with, SplitPlan};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    InvalidInput(String),
    /// R² is undefined for a constant truth vector; reported as
    /// not-applicable, never silently coerced to 0.
    ConstantTruth,
    /// Target coverage over the plan's training ids fell below the floor.
    InsufficientCoverage { covered: usize, total: usize },
    /// Every fold was skipped; the target cannot be evaluated.
    Unevaluable(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            EvalError::ConstantTruth => write!(f, "r-squared undefined: truth vector is constant"),
            EvalError::InsufficientCoverage { covered, total } => {
                write!(f, "target covers {covered} of {total} training catchments (< 80%)")
            }
            EvalError::Unevaluable(msg) => write!(f, "target unevaluable: {msg}"),
        }
    }
}

impl core::error::Error for EvalError {}
