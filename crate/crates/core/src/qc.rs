//! Data-quality exclusions, facility-to-catchment aggregation, and the
//! log/inverse transform applied to count-type targets.
//!
//! Filter order is part of the contract: `missingness_filter` first, then
//! `zero_filter` over the non-missing values only.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum QcError {
    WrongSeriesLength { expected: usize, got: usize },
    AllMissing,
    EmptyInput,
    UndefinedRate,
    NegativeCount(f64),
    MissingDenominator,
}

impl fmt::Display for QcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QcError::WrongSeriesLength { expected, got } => {
                write!(f, "series has {got} periods, cadence expects {expected}")
            }
            QcError::AllMissing => write!(f, "series has no non-missing values"),
            QcError::EmptyInput => write!(f, "no values to aggregate"),
            QcError::UndefinedRate => write!(f, "rate undefined: pooled denominator is zero"),
            QcError::NegativeCount(v) => write!(f, "count value must be nonnegative, got {v}"),
            QcError::MissingDenominator => write!(f, "rate aggregation requires denominators"),
        }
    }
}

impl core::error::Error for QcError {}

/// Reporting cadence; fixes both the series length and the missingness cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Cadence {
    Monthly,
    Quarterly,
}

impl Cadence {
    pub fn n_periods(self) -> usize {
        match self {
            Cadence::Monthly => 29,
            Cadence::Quarterly => 10,
        }
    }

    /// Largest tolerated missing count ("more than N" is exclusive).
    pub fn max_missing(self) -> usize {
        match self {
            Cadence::Monthly => 23,
            Cadence::Quarterly => 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum IndicatorKind {
    Rate,
    Count,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IndicatorSpec {
    pub name: String,
    pub kind: IndicatorKind,
    pub cadence: Cadence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformState {
    None,
    Log1p,
}

/// One cross-sectional prediction target: a value per usable catchment.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTarget {
    pub spec: IndicatorSpec,
    pub values: BTreeMap<String, f64>,
    /// Scale the stored values are on. Targets circulate raw; the modelling
    /// layer transforms on entry and inverse-transforms before scoring.
    pub transform: TransformState,
}

impl IndicatorTarget {
    pub fn n_catchments(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcReason {
    None,
    TooMissing,
    TooManyZeros,
}

impl QcReason {
    pub fn as_str(self) -> &'static str {
        match self {
            QcReason::None => "NONE",
            QcReason::TooMissing => "TOO_MISSING",
            QcReason::TooManyZeros => "TOO_MANY_ZEROS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcOutcome {
    pub kept: bool,
    pub reason: QcReason,
}

/// Drops a facility series with more missing periods than the cadence
/// tolerates (strictly more than 23 of 29 months, or 7 of 10 quarters).
pub fn missingness_filter(series: &[Option<f64>], cadence: Cadence) -> Result<QcOutcome, QcError> {
    if series.len() != cadence.n_periods() {
        return Err(QcError::WrongSeriesLength { expected: cadence.n_periods(), got: series.len() });
    }
    let missing = series.iter().filter(|v| v.is_none()).count();
    if missing > cadence.max_missing() {
        Ok(QcOutcome { kept: false, reason: QcReason::TooMissing })
    } else {
        Ok(QcOutcome { kept: true, reason: QcReason::None })
    }
}

/// Drops a series when >= 75% of its non-missing values are zero. Must run
/// after [`missingness_filter`]; an all-missing series is a contract error.
pub fn zero_filter(series: &[Option<f64>]) -> Result<QcOutcome, QcError> {
    let present: Vec<f64> = series.iter().filter_map(|v| *v).collect();
    if present.is_empty() {
        return Err(QcError::AllMissing);
    }
    let zeros = present.iter().filter(|&&v| v == 0.0).count();
    if zeros as f64 / present.len() as f64 >= 0.75 {
        Ok(QcOutcome { kept: false, reason: QcReason::TooManyZeros })
    } else {
        Ok(QcOutcome { kept: true, reason: QcReason::None })
    }
}

/// Fraction of zeros among non-missing values; audit-trail companion to
/// [`zero_filter`].
pub fn zero_fraction(series: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = series.iter().filter_map(|v| *v).collect();
    if present.is_empty() {
        return None;
    }
    Some(present.iter().filter(|&&v| v == 0.0).count() as f64 / present.len() as f64)
}

/// Collapses a per-period series to one number: mean of the non-missing
/// periods for rates, sum for counts.
pub fn reduce_time(series: &[Option<f64>], kind: IndicatorKind) -> Result<f64, QcError> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in series.iter().flatten() {
        sum += v;
        count += 1;
    }
    if count == 0 {
        return Err(QcError::AllMissing);
    }
    Ok(match kind {
        IndicatorKind::Rate => sum / count as f64,
        IndicatorKind::Count => sum,
    })
}

/// Time-reduced numerator (and denominator, for rates) of one kept facility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacilityValue {
    pub numerator: f64,
    pub denominator: Option<f64>,
}

/// How facility rates combine into a catchment rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateWeighting {
    /// Pooled numerators over pooled denominators: the denominator-weighted
    /// mean of facility rates. The default.
    PooledDenominator,
    /// Unweighted mean of facility rates; sensitivity switch only.
    EqualWeight,
}

/// Aggregates kept facilities to one catchment value: denominator-weighted
/// mean for rates, plain sum for counts.
pub fn aggregate_catchment(
    values: &[FacilityValue],
    kind: IndicatorKind,
    weighting: RateWeighting,
) -> Result<f64, QcError> {
    if values.is_empty() {
        return Err(QcError::EmptyInput);
    }
    match kind {
        IndicatorKind::Count => Ok(values.iter().map(|v| v.numerator).sum()),
        IndicatorKind::Rate => match weighting {
            RateWeighting::PooledDenominator => {
                let mut num = 0.0;
                let mut den = 0.0;
                for v in values {
                    num += v.numerator;
                    den += v.denominator.ok_or(QcError::MissingDenominator)?;
                }
                if den == 0.0 {
                    return Err(QcError::UndefinedRate);
                }
                Ok(num / den)
            }
            RateWeighting::EqualWeight => {
                let mut acc = 0.0;
                for v in values {
                    let den = v.denominator.ok_or(QcError::MissingDenominator)?;
                    if den == 0.0 {
                        return Err(QcError::UndefinedRate);
                    }
                    acc += v.numerator / den;
                }
                Ok(acc / values.len() as f64)
            }
        },
    }
}

/// Forward transform applied before model inclusion: `log(1+x)` for counts
/// (zeros are legitimate after QC), identity for rates.
pub fn transform(value: f64, kind: IndicatorKind) -> Result<f64, QcError> {
    match kind {
        IndicatorKind::Rate => Ok(value),
        IndicatorKind::Count => {
            if value < 0.0 {
                Err(QcError::NegativeCount(value))
            } else {
                Ok(math::ln_1p(value))
            }
        }
    }
}

/// Inverse of [`transform`], applied to predictions before evaluation.
pub fn inverse_transform(value: f64, kind: IndicatorKind) -> f64 {
    match kind {
        IndicatorKind::Rate => value,
        IndicatorKind::Count => math::exp_m1(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn series(n: usize, missing: usize, zeros: usize) -> Vec<Option<f64>> {
        // missing first, then zeros, then ones
        let mut s = Vec::with_capacity(n);
        for i in 0..n {
            if i < missing {
                s.push(None);
            } else if i < missing + zeros {
                s.push(Some(0.0));
            } else {
                s.push(Some(1.0));
            }
        }
        s
    }

    #[test]
    fn missingness_boundary_monthly() {
        let kept = missingness_filter(&series(29, 23, 0), Cadence::Monthly).unwrap();
        assert!(kept.kept);
        let dropped = missingness_filter(&series(29, 24, 0), Cadence::Monthly).unwrap();
        assert!(!dropped.kept);
        assert_eq!(dropped.reason, QcReason::TooMissing);
    }

    #[test]
    fn missingness_boundary_quarterly() {
        assert!(missingness_filter(&series(10, 7, 0), Cadence::Quarterly).unwrap().kept);
        assert!(!missingness_filter(&series(10, 8, 0), Cadence::Quarterly).unwrap().kept);
        assert!(missingness_filter(&series(10, 0, 0), Cadence::Quarterly).unwrap().kept);
    }

    #[test]
    fn wrong_length_is_contract_error() {
        assert!(matches!(
            missingness_filter(&series(28, 0, 0), Cadence::Monthly),
            Err(QcError::WrongSeriesLength { expected: 29, got: 28 })
        ));
    }

    #[test]
    fn zero_filter_inclusive_threshold() {
        // 22 zeros of 29 non-missing = 75.9% -> dropped.
        assert!(!zero_filter(&series(29, 0, 22)).unwrap().kept);
        // Exactly 75% (3 of 4) -> dropped, the threshold is inclusive.
        assert!(!zero_filter(&series(4, 0, 3)).unwrap().kept);
        // Just under: 2 of 4.
        assert!(zero_filter(&series(4, 0, 2)).unwrap().kept);
        // All non-missing, all nonzero.
        assert!(zero_filter(&series(29, 0, 0)).unwrap().kept);
    }

    #[test]
    fn zero_fraction_ignores_missing() {
        // 3 missing, 2 zeros, 2 ones: fraction is 2/4 not 2/7.
        let s = series(7, 3, 2);
        assert_eq!(zero_fraction(&s), Some(0.5));
        assert!(zero_filter(&s).unwrap().kept);
    }

    #[test]
    fn zero_filter_requires_survivors() {
        assert!(matches!(zero_filter(&series(29, 29, 0)), Err(QcError::AllMissing)));
    }

    #[test]
    fn filters_compose_idempotently() {
        let s = series(29, 10, 5);
        let first = missingness_filter(&s, Cadence::Monthly).unwrap();
        let second = zero_filter(&s).unwrap();
        assert!(first.kept && second.kept);
        // Re-running the composition gives the identical outcome.
        assert_eq!(missingness_filter(&s, Cadence::Monthly).unwrap(), first);
        assert_eq!(zero_filter(&s).unwrap(), second);
    }

    #[test]
    fn reduce_time_examples() {
        let rate = vec![Some(0.2), None, Some(0.4)];
        assert!((reduce_time(&rate, IndicatorKind::Rate).unwrap() - 0.3).abs() < 1e-12);
        let count = vec![Some(5.0), Some(5.0), None, Some(10.0)];
        assert_eq!(reduce_time(&count, IndicatorKind::Count).unwrap(), 20.0);
        let constant = vec![Some(2.5); 4];
        assert_eq!(reduce_time(&constant, IndicatorKind::Rate).unwrap(), 2.5);
        assert_eq!(reduce_time(&constant, IndicatorKind::Count).unwrap(), 10.0);
        assert!(matches!(reduce_time(&[None, None], IndicatorKind::Rate), Err(QcError::AllMissing)));
    }

    #[test]
    fn rate_aggregation_pools_denominators() {
        let vals = [
            FacilityValue { numerator: 10.0, denominator: Some(100.0) },
            FacilityValue { numerator: 30.0, denominator: Some(100.0) },
        ];
        let pooled = aggregate_catchment(&vals, IndicatorKind::Rate, RateWeighting::PooledDenominator).unwrap();
        assert!((pooled - 0.20).abs() < 1e-15);
        // With equal denominators the pooled mean equals the per-facility
        // weighted mean 0.5*0.1 + 0.5*0.3.
        let check = 0.5 * 0.1 + 0.5 * 0.3;
        assert!((pooled - check).abs() < 1e-15);
    }

    #[test]
    fn rate_aggregation_split_invariance() {
        // Splitting one facility's totals across two facilities must not
        // change the pooled rate.
        let whole = [FacilityValue { numerator: 40.0, denominator: Some(200.0) }];
        let split = [
            FacilityValue { numerator: 15.0, denominator: Some(120.0) },
            FacilityValue { numerator: 25.0, denominator: Some(80.0) },
        ];
        let a = aggregate_catchment(&whole, IndicatorKind::Rate, RateWeighting::PooledDenominator).unwrap();
        let b = aggregate_catchment(&split, IndicatorKind::Rate, RateWeighting::PooledDenominator).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn count_aggregation_sums() {
        let vals = [
            FacilityValue { numerator: 5.0, denominator: None },
            FacilityValue { numerator: 7.0, denominator: None },
        ];
        assert_eq!(aggregate_catchment(&vals, IndicatorKind::Count, RateWeighting::PooledDenominator).unwrap(), 12.0);
        let single = [FacilityValue { numerator: 3.5, denominator: Some(10.0) }];
        assert_eq!(
            aggregate_catchment(&single, IndicatorKind::Rate, RateWeighting::PooledDenominator).unwrap(),
            0.35
        );
    }

    #[test]
    fn rate_aggregation_error_paths() {
        assert!(matches!(
            aggregate_catchment(&[], IndicatorKind::Count, RateWeighting::PooledDenominator),
            Err(QcError::EmptyInput)
        ));
        let zero_den = [FacilityValue { numerator: 1.0, denominator: Some(0.0) }];
        assert!(matches!(
            aggregate_catchment(&zero_den, IndicatorKind::Rate, RateWeighting::PooledDenominator),
            Err(QcError::UndefinedRate)
        ));
        let no_den = [FacilityValue { numerator: 1.0, denominator: None }];
        assert!(matches!(
            aggregate_catchment(&no_den, IndicatorKind::Rate, RateWeighting::PooledDenominator),
            Err(QcError::MissingDenominator)
        ));
    }

    #[test]
    fn transform_round_trips() {
        assert_eq!(transform(0.0, IndicatorKind::Count).unwrap(), 0.0);
        assert_eq!(inverse_transform(0.0, IndicatorKind::Count), 0.0);
        // count e-1 -> 1 -> e-1
        let e1 = core::f64::consts::E - 1.0;
        let t = transform(e1, IndicatorKind::Count).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        assert!((inverse_transform(t, IndicatorKind::Count) - e1).abs() < 1e-12);
        // rates are identity
        assert_eq!(transform(0.37, IndicatorKind::Rate).unwrap(), 0.37);
        assert_eq!(inverse_transform(0.37, IndicatorKind::Rate), 0.37);
        assert!(matches!(transform(-1.0, IndicatorKind::Count), Err(QcError::NegativeCount(_))));
    }

    #[test]
    fn transform_round_trip_wide_range() {
        for i in 0..200 {
            let x = math_pow10(-3.0 + i as f64 * 0.06); // up to ~1e9
            let t = transform(x, IndicatorKind::Count).unwrap();
            let back = inverse_transform(t, IndicatorKind::Count);
            assert!((back - x).abs() <= 1e-9 * x.max(1.0), "{x} -> {back}");
        }
    }

    fn math_pow10(e: f64) -> f64 {
        10f64.powf(e)
    }
}
