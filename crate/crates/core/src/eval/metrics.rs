//! Coefficient of determination.

use super::EvalError;

/// R² = 1 - SS_res / SS_tot. Negative for predictors worse than the mean.
/// A constant truth vector makes the metric undefined and is an error.
pub fn r_squared(y_true: &[f64], y_pred: &[f64]) -> Result<f64, EvalError> {
    if y_true.len() != y_pred.len() || y_true.len() < 2 {
        return Err(EvalError::InvalidInput(alloc::format!(
            "need two equal-length vectors of >= 2 values, got {} and {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let mut ss_tot = 0.0;
    let mut ss_res = 0.0;
    for (t, p) in y_true.iter().zip(y_pred) {
        ss_tot += (t - mean) * (t - mean);
        ss_res += (t - p) * (t - p);
    }
    if ss_tot == 0.0 {
        return Err(EvalError::ConstantTruth);
    }
    Ok(1.0 - ss_res / ss_tot)
}
